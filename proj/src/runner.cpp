#include "gemeit/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "gemeit/csv.hpp"
#include "gemeit/solver.hpp"
#include "gemeit/stats.hpp"
#include "gemeit/svg_plot.hpp"

namespace gemeit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double window_energy(const ComplexEnvelope& env, double t_lo, double t_hi) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < env.size(); ++i) {
        const double t = env.t_at(i);
        if (t < t_lo || t >= t_hi) continue;
        acc += 0.5 * (std::norm(env.samples[i]) + std::norm(env.samples[i + 1]));
    }
    return acc * env.dt;
}

AcceptanceCheck make_check(const std::string& name, double value, double threshold,
                           const std::string& op) {
    AcceptanceCheck c{name, value, threshold, op, false};
    c.pass = op == ">=" ? value >= threshold : value <= threshold;
    return c;
}

json check_to_json(const AcceptanceCheck& c) {
    return json{{"name", c.name}, {"value", c.value}, {"threshold", c.threshold},
                {"op", c.op}, {"pass", c.pass}};
}

json fringe_to_json(const FringeResult& f) {
    return json{{"found", f.found}, {"freq_cycles_per_us", f.freq}, {"phase_rad", f.phase},
                {"visibility", f.visibility}};
}

json summary_to_json(const RunSummary& s) {
    json j{
        {"input_energy", s.input_energy},
        {"output_energy", s.output_energy},
        {"recall_energy", s.recall_energy},
        {"efficiency", s.efficiency},
        {"recall_efficiency", s.recall_efficiency},
        {"leakage", s.leakage},
        {"peak_transmission", s.peak_transmission},
        {"steps_accepted", s.stats.steps_accepted},
        {"steps_rejected", s.stats.steps_rejected},
        {"rhs_evaluations", s.stats.rhs_evaluations},
        {"wall_seconds", s.wall_seconds},
    };
    if (s.fidelity) {
        j["fidelity"] = s.fidelity->fidelity;
        j["fidelity_scale"] = s.fidelity->scale;
        j["fidelity_time_offset"] = s.fidelity->time_offset;
    }
    if (s.fringe) j["fringe"] = fringe_to_json(*s.fringe);
    if (s.pair_separation) j["pair_separation_us"] = *s.pair_separation;
    if (s.dsp) {
        j["dsp"] = json{{"recovered_l2_error", s.dsp->recovered_l2_error}};
        if (s.dsp->fringe) j["dsp"]["fringe"] = fringe_to_json(*s.dsp->fringe);
        if (s.dsp->fit) {
            const auto& f = *s.dsp->fit;
            j["dsp"]["chirped_gaussian_fit"] =
                json{{"amplitude", f.amplitude}, {"t0_us", f.t0},       {"sigma_us", f.sigma},
                     {"freq_mhz", f.freq},       {"phase_rad", f.phase}, {"chirp_mhz_per_us", f.chirp},
                     {"residual_rms", f.residual_rms}};
        }
    }
    j["checks"] = json::array();
    for (const auto& c : s.checks) j["checks"].push_back(check_to_json(c));
    j["all_checks_pass"] = s.all_checks_pass();
    return j;
}

std::vector<double> magnitude_of(const ComplexEnvelope& env) {
    std::vector<double> m(env.size());
    for (std::size_t i = 0; i < env.size(); ++i) m[i] = std::abs(env.samples[i]);
    return m;
}

void write_map_artifacts(const SpinwaveMap& map, const std::string& stem, bool plots,
                         const std::string& axis_name, const std::string& title) {
    // stride the map down to a manageable table
    const std::size_t max_axis = 256, max_time = 256;
    const std::size_t sa = std::max<std::size_t>(1, map.axis.size() / max_axis);
    const std::size_t st = std::max<std::size_t>(1, map.times.size() / max_time);
    std::vector<double> axis, times, vals;
    for (std::size_t ia = 0; ia < map.axis.size(); ia += sa) axis.push_back(map.axis[ia]);
    for (std::size_t it = 0; it < map.times.size(); it += st) times.push_back(map.times[it]);
    vals.reserve(axis.size() * times.size());
    for (std::size_t ia = 0; ia < map.axis.size(); ia += sa)
        for (std::size_t it = 0; it < map.times.size(); it += st)
            vals.push_back(map.at(ia, it));
    write_matrix_csv(stem + ".csv", axis_name, axis, times, vals);
    if (plots)
        save_heatmap_svg(stem + ".svg", title, times, axis, vals, "time (us)", axis_name);
}

} // namespace

bool RunSummary::all_checks_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

bool SweepOutcome::all_checks_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    for (const auto& p : points)
        if (!p.summary.all_checks_pass()) return false;
    return true;
}

double fidelity_scale_hint(const ExperimentConfig& cfg, const EnsembleParams& ensemble) {
    const auto kappa = ensemble.coupling_on_grid(cfg.grid);
    double kmax = 0.0;
    for (double k : kappa) kmax = std::max(kmax, k);
    if (kmax <= 0.0 || cfg.eit.omega == 0.0 || cfg.gem.eta == 0.0) return 1.0;
    const double v_group = cfg.eit.omega * cfg.eit.omega / kmax; // mm/us
    return std::abs(cfg.gem.eta) * v_group;                      // rad/us per us
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    RunResult res;
    res.config = cfg;
    res.grid = cfg.grid;
    res.ensemble = cfg.make_ensemble();
    res.schedule = cfg.make_protocol();
    res.input = cfg.make_input();

    IntegrationResult integ;
    try {
        integ = integrate(res.input, res.schedule, res.ensemble, res.grid, cfg.solver);
    } catch (const std::exception& ex) {
        throw std::runtime_error(std::string("run failed during integration: ") + ex.what());
    }
    res.state = std::move(integ.state);
    res.summary.stats = integ.stats;

    res.output_full = output_envelope(res.state, res.grid, 0.0);
    const double read_from = cfg.schedule.mode == ScheduleMode::gem_echo
                                 ? cfg.schedule.write_end
                                 : cfg.schedule.read_start;
    res.output_read = envelope_tail(res.output_full, read_from);

    RunSummary& sum = res.summary;
    sum.input_energy = envelope_energy(res.input);
    sum.output_energy = envelope_energy(res.output_full);
    sum.recall_energy = envelope_energy(res.output_read);
    if (sum.input_energy > 0.0) {
        sum.efficiency = sum.output_energy / sum.input_energy;
        sum.recall_efficiency = sum.recall_energy / sum.input_energy;
        sum.leakage = window_energy(res.output_full, 0.0, cfg.schedule.write_end) / sum.input_energy;
        const double peak_in = envelope_peak(res.input);
        const double peak_out = envelope_peak(res.output_full);
        sum.peak_transmission = (peak_out / peak_in) * (peak_out / peak_in);
    }

    const bool has_signal = sum.recall_energy > 1e-30;
    if (has_signal && cfg.schedule.mode != ScheduleMode::gem_echo && cfg.eit.omega != 0.0) {
        const double hint = fidelity_scale_hint(cfg, res.ensemble);
        sum.fidelity = fourier_fidelity(res.output_read, analytic_ft(cfg.pulse), hint);
    }
    if (has_signal) {
        const FringeResult fr = fringe_analysis(res.output_read);
        if (fr.found) sum.fringe = fr;
        if (cfg.pulse.kind == PulseKind::modulated_gaussian)
            sum.pair_separation = pulse_pair_separation(res.output_read);
    }

    if (cfg.dsp.enabled && has_signal) {
        DspOutcome dsp;
        std::mt19937_64 jitter_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        std::normal_distribution<double> jitter(0.0, cfg.dsp.phase_jitter);
        std::vector<ComplexEnvelope> shots;
        for (int j = 0; j < cfg.dsp.shots; ++j) {
            ComplexEnvelope src = res.output_read;
            if (j > 0 && cfg.dsp.phase_jitter > 0.0) {
                const cplx rot = std::polar(1.0, jitter(jitter_rng));
                for (auto& v : src.samples) v *= rot;
            }
            HeterodyneTrace tr = synthesize_trace(src, cfg.dsp.lo_detuning, cfg.dsp.sample_rate,
                                                  cfg.dsp.noise_rms, cfg.seed + 17 * j + 1, j);
            tr = bandpass(tr, std::abs(cfg.dsp.lo_detuning), cfg.dsp.bandpass_half_width,
                          cfg.dsp.bandpass_order);
            shots.push_back(demodulate(tr, std::abs(cfg.dsp.lo_detuning), cfg.dsp.lp_cutoff,
                                       cfg.dsp.analysis_rate));
        }
        const PhaseAlignment aligned = phase_reference(shots);
        const ComplexEnvelope avg = average_shots(aligned.shots);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < avg.size(); ++i) {
            const cplx ref = res.output_read.eval(avg.t_at(i));
            num += std::norm(avg.samples[i] - ref);
            den += std::norm(ref);
        }
        dsp.recovered_l2_error = den > 0.0 ? std::sqrt(num / den) : 0.0;
        const FringeResult fr = fringe_analysis(avg);
        if (fr.found) dsp.fringe = fr;
        if (cfg.pulse.kind == PulseKind::gaussian) {
            try {
                dsp.fit = fit_chirped_gaussian(avg);
            } catch (const std::exception&) {
                // fit is a best-effort artifact on real runs
            }
        }
        sum.dsp = dsp;
    }

    // embedded acceptance thresholds
    for (const auto& [key, thr] : cfg.acceptance) {
        if (key == "min_fidelity")
            sum.checks.push_back(make_check(key, sum.fidelity ? sum.fidelity->fidelity : 0.0, thr, ">="));
        else if (key == "min_visibility")
            sum.checks.push_back(make_check(key, sum.fringe ? sum.fringe->visibility : 0.0, thr, ">="));
        else if (key == "max_leakage")
            sum.checks.push_back(make_check(key, sum.leakage, thr, "<="));
        else if (key == "min_recall_efficiency")
            sum.checks.push_back(make_check(key, sum.recall_efficiency, thr, ">="));
        else if (key == "min_xcorr")
            sum.checks.push_back(
                make_check(key, magnitude_xcorr_peak(res.output_read, res.input), thr, ">="));
        else if (key == "max_roundtrip_error")
            sum.checks.push_back(make_check(
                key, sum.dsp ? sum.dsp->recovered_l2_error : 1.0, thr, "<="));
        else if (key == "min_peak_transmission")
            sum.checks.push_back(make_check(key, sum.peak_transmission, thr, ">="));
        else if (key == "max_peak_transmission")
            sum.checks.push_back(make_check(key, sum.peak_transmission, thr, "<="));
        // min_r2, phase_slope_tol, max_phase_dev are sweep-level
    }

    sum.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

void write_run_artifacts(const RunResult& res, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto at = [&](const std::string& f) { return (fs::path(out_dir) / f).string(); };

    std::ofstream(at("resolved.cfg")) << render_config(res.config);
    write_envelope_csv(at("input_envelope.csv"), res.input);
    write_envelope_csv(at("output_envelope.csv"), res.output_full);

    if (res.config.output.write_maps) {
        const auto pos = spinwave_position_map(res.state, res.grid);
        const auto mom = spinwave_momentum_map(res.state, res.grid);
        write_map_artifacts(pos, at("spinwave_position"), res.config.output.write_plots,
                            "z_mm", "spinwave intensity |sigma_gs(z,t)|^2");
        write_map_artifacts(mom, at("spinwave_momentum"), res.config.output.write_plots,
                            "k_rad_per_mm", "spinwave momentum intensity |S(k,t)|^2");
        // cross sections at the end of the write window
        const double t_cross = res.config.schedule.write_end;
        const auto pos_cs = pos.cross_section(t_cross);
        const auto mom_cs = mom.cross_section(t_cross);
        write_csv(at("cross_section_position.csv"), {"z_mm", "intensity"},
                  {pos.axis, pos_cs});
        write_csv(at("cross_section_momentum.csv"), {"k_rad_per_mm", "intensity"},
                  {mom.axis, mom_cs});
    }

    if (res.config.output.write_plots) {
        SvgPlot plot("input and output envelopes", "time (us)", "|E|");
        std::vector<double> ti(res.input.size()), to(res.output_full.size());
        for (std::size_t i = 0; i < ti.size(); ++i) ti[i] = res.input.t_at(i);
        for (std::size_t i = 0; i < to.size(); ++i) to[i] = res.output_full.t_at(i);
        plot.add_line(ti, magnitude_of(res.input), "input", "#1f77b4");
        plot.add_line(to, magnitude_of(res.output_full), "output", "#ff7f0e");
        if (res.summary.fidelity) {
            // scaled Fourier transform of the input placed over the output
            const auto ref = analytic_ft(res.config.pulse);
            const auto& rep = *res.summary.fidelity;
            std::vector<double> tr(res.output_read.size()), mr(res.output_read.size());
            double peak_ref = 0.0, peak_out = 0.0;
            for (std::size_t i = 0; i < tr.size(); ++i) {
                tr[i] = res.output_read.t_at(i);
                mr[i] = std::abs(ref(rep.scale * (tr[i] - rep.time_offset)));
                peak_ref = std::max(peak_ref, mr[i]);
                peak_out = std::max(peak_out, std::abs(res.output_read.samples[i]));
            }
            if (peak_ref > 0.0)
                for (auto& v : mr) v *= peak_out / peak_ref;
            plot.add_line(tr, mr, "scaled FT of input", "#2ca02c", true);
        }
        plot.save(at("envelopes.svg"));
    }

    if (res.summary.dsp) {
        // one representative shot for the trace formats
        HeterodyneTrace tr =
            synthesize_trace(res.output_read, res.config.dsp.lo_detuning,
                             res.config.dsp.sample_rate, res.config.dsp.noise_rms,
                             res.config.seed + 1, 0);
        write_trace_csv(at("trace_shot0.csv"), tr);
        write_trace_binary(at("trace_shot0.htrc"), tr);
    }

    json j = summary_to_json(res.summary);
    j["kind"] = "run";
    std::ofstream(at("summary.json")) << j.dump(2) << "\n";
}

SweepOutcome run_sweep(const ExperimentConfig& cfg, unsigned jobs) {
    if (cfg.sweep.parameter.empty())
        throw std::invalid_argument("run_sweep: config has no [sweep] section");
    SweepOutcome out;
    out.parameter = cfg.sweep.parameter;
    out.points.resize(cfg.sweep.values.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_message;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.sweep.values.size() || failed.load()) return;
            try {
                ExperimentConfig point_cfg =
                    with_sweep_value(cfg, cfg.sweep.parameter, cfg.sweep.values[i]);
                point_cfg.seed = cfg.seed + 1000 * (i + 1);
                point_cfg.sweep = {};
                RunResult r = run_experiment(point_cfg);
                out.points[i] = SweepPoint{cfg.sweep.values[i], std::move(r.summary),
                                           std::move(r.output_read)};
            } catch (const std::exception& ex) {
                std::lock_guard<std::mutex> lock(error_mutex);
                failed = true;
                error_message = "sweep point " + std::to_string(i) + " (value " +
                                std::to_string(cfg.sweep.values[i]) + "): " + ex.what();
                return;
            }
        }
    };

    const unsigned n_workers =
        std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cfg.sweep.values.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed) throw std::runtime_error(error_message);

    // aggregates
    std::vector<double> xs(cfg.sweep.values.begin(), cfg.sweep.values.end());
    if (out.parameter == "pulse.separation") {
        std::vector<double> freq;
        for (const auto& p : out.points)
            freq.push_back(p.summary.fringe ? p.summary.fringe->freq : 0.0);
        out.fringe_freq_fit = linear_fit(xs, freq);
    } else if (out.parameter == "pulse.phase") {
        // shared fringe frequency, then per-point phase at that frequency
        double f0 = 0.0;
        for (const auto& p : out.points)
            if (p.summary.fringe) { f0 = p.summary.fringe->freq; break; }
        if (f0 > 0.0) {
            std::vector<double> phases;
            for (const auto& p : out.points) phases.push_back(fringe_phase_at(p.output_read, f0));
            const auto unwrapped = unwrap_phases(phases);
            out.phase_fit = linear_fit(xs, unwrapped);
            double dev = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i)
                dev = std::max(dev, std::abs(unwrapped[i] - (out.phase_fit->slope * xs[i] +
                                                             out.phase_fit->intercept)));
            out.max_phase_deviation = dev;
        }
    } else if (out.parameter == "pulse.mod_freq") {
        std::vector<double> seps;
        bool ok = true;
        for (const auto& p : out.points) {
            if (!p.summary.pair_separation) { ok = false; break; }
            seps.push_back(*p.summary.pair_separation);
        }
        if (ok) out.separation_fit = linear_fit(xs, seps);
    }

    for (const auto& [key, thr] : cfg.acceptance) {
        if (key == "min_r2") {
            const LinearFit* fit = out.fringe_freq_fit ? &*out.fringe_freq_fit
                                   : out.separation_fit ? &*out.separation_fit
                                   : out.phase_fit ? &*out.phase_fit
                                                   : nullptr;
            out.checks.push_back(make_check(key, fit ? fit->r2 : 0.0, thr, ">="));
        } else if (key == "phase_slope_tol") {
            const double dev = out.phase_fit ? std::abs(out.phase_fit->slope - 1.0) : 1.0;
            out.checks.push_back(make_check(key, dev, thr, "<="));
        } else if (key == "max_phase_dev") {
            out.checks.push_back(
                make_check(key, out.max_phase_deviation.value_or(10.0), thr, "<="));
        }
    }
    return out;
}

void write_sweep_artifacts(const SweepOutcome& out, const ExperimentConfig& cfg,
                           const std::string& out_dir, bool write_point_artifacts) {
    fs::create_directories(out_dir);
    const auto at = [&](const std::string& f) { return (fs::path(out_dir) / f).string(); };
    std::ofstream(at("resolved.cfg")) << render_config(cfg);

    std::vector<double> xs, freq, vis, phase, sep, eff;
    for (const auto& p : out.points) {
        xs.push_back(p.value);
        freq.push_back(p.summary.fringe ? p.summary.fringe->freq : 0.0);
        vis.push_back(p.summary.fringe ? p.summary.fringe->visibility : 0.0);
        phase.push_back(p.summary.fringe ? p.summary.fringe->phase : 0.0);
        sep.push_back(p.summary.pair_separation.value_or(0.0));
        eff.push_back(p.summary.recall_efficiency);
    }
    write_csv(at("sweep.csv"),
              {out.parameter, "fringe_freq_cycles_per_us", "visibility", "fringe_phase_rad",
               "pair_separation_us", "recall_efficiency"},
              {xs, freq, vis, phase, sep, eff});

    json j;
    j["kind"] = "sweep";
    j["parameter"] = out.parameter;
    j["values"] = xs;
    auto fit_json = [](const LinearFit& f) {
        return json{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
    };
    if (out.fringe_freq_fit) j["fringe_freq_fit"] = fit_json(*out.fringe_freq_fit);
    if (out.phase_fit) j["phase_fit"] = fit_json(*out.phase_fit);
    if (out.max_phase_deviation) j["max_phase_deviation"] = *out.max_phase_deviation;
    if (out.separation_fit) j["separation_fit"] = fit_json(*out.separation_fit);
    j["checks"] = json::array();
    for (const auto& c : out.checks) j["checks"].push_back(check_to_json(c));
    j["points"] = json::array();
    for (const auto& p : out.points) j["points"].push_back(summary_to_json(p.summary));
    j["all_checks_pass"] = out.all_checks_pass();
    std::ofstream(at("sweep_summary.json")) << j.dump(2) << "\n";

    if (cfg.output.write_plots) {
        const LinearFit* fit = nullptr;
        const std::vector<double>* ys = nullptr;
        std::string ylabel;
        if (out.fringe_freq_fit) { fit = &*out.fringe_freq_fit; ys = &freq; ylabel = "fringe freq (cycles/us)"; }
        else if (out.separation_fit) { fit = &*out.separation_fit; ys = &sep; ylabel = "pair separation (us)"; }
        if (fit && ys) {
            SvgPlot plot("sweep: " + ylabel + " vs " + out.parameter, out.parameter, ylabel);
            plot.add_line(xs, *ys, "measured", "#1f77b4");
            std::vector<double> yf(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i) yf[i] = fit->slope * xs[i] + fit->intercept;
            plot.add_line(xs, yf, "linear fit", "#d62728", true);
            plot.save(at("sweep.svg"));
        }
    }

    if (write_point_artifacts) {
        for (std::size_t i = 0; i < out.points.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "point_%03zu", i);
            const auto dir = fs::path(out_dir) / name;
            fs::create_directories(dir);
            write_envelope_csv((dir / "output_envelope.csv").string(), out.points[i].output_read);
            json pj = summary_to_json(out.points[i].summary);
            pj["kind"] = "run";
            pj["sweep_value"] = out.points[i].value;
            std::ofstream((dir / "summary.json").string()) << pj.dump(2) << "\n";
        }
    }
}

int report_directory(const std::string& dir, std::string& text_out) {
    const fs::path run_json = fs::path(dir) / "summary.json";
    const fs::path sweep_json = fs::path(dir) / "sweep_summary.json";
    std::ostringstream out;
    char line[256];

    const fs::path path = fs::exists(sweep_json) ? sweep_json : run_json;
    if (!fs::exists(path)) {
        text_out = "report: no summary.json or sweep_summary.json in '" + dir + "'\n";
        return 2;
    }
    json j;
    try {
        std::ifstream in(path);
        in >> j;
    } catch (const std::exception& ex) {
        text_out = "report: corrupt summary in '" + dir + "': " + ex.what() + "\n";
        return 2;
    }

    bool pass = true;
    auto print_checks = [&](const json& checks) {
        for (const auto& c : checks) {
            std::snprintf(line, sizeof line, "  %-24s %12.6g %s %-10.6g %s\n",
                          c["name"].get<std::string>().c_str(), c["value"].get<double>(),
                          c["op"].get<std::string>().c_str(), c["threshold"].get<double>(),
                          c["pass"].get<bool>() ? "PASS" : "FAIL");
            out << line;
            if (!c["pass"].get<bool>()) pass = false;
        }
    };

    if (j.value("kind", "") == "sweep") {
        out << "sweep over " << j["parameter"].get<std::string>() << "\n";
        std::snprintf(line, sizeof line, "%12s %14s %12s %14s %12s\n", "value", "fringe_freq",
                      "visibility", "pair_sep_us", "efficiency");
        out << line;
        for (const auto& p : j["points"]) {
            const auto fr = p.contains("fringe") ? p["fringe"] : json{};
            std::snprintf(line, sizeof line, "%12.6g %14.6g %12.4g %14.6g %12.4g\n",
                          j["values"][static_cast<std::size_t>(&p - &j["points"][0])].get<double>(),
                          fr.is_null() || fr.empty() ? 0.0 : fr.value("freq_cycles_per_us", 0.0),
                          fr.is_null() || fr.empty() ? 0.0 : fr.value("visibility", 0.0),
                          p.value("pair_separation_us", 0.0), p.value("recall_efficiency", 0.0));
            out << line;
        }
        if (j.contains("fringe_freq_fit"))
            out << "fringe_freq fit: slope " << j["fringe_freq_fit"]["slope"].get<double>()
                << ", R^2 " << j["fringe_freq_fit"]["r2"].get<double>() << "\n";
        if (j.contains("phase_fit"))
            out << "phase fit: slope " << j["phase_fit"]["slope"].get<double>() << ", R^2 "
                << j["phase_fit"]["r2"].get<double>()
                << ", max deviation " << j.value("max_phase_deviation", 0.0) << " rad\n";
        if (j.contains("separation_fit"))
            out << "separation fit: slope " << j["separation_fit"]["slope"].get<double>()
                << ", R^2 " << j["separation_fit"]["r2"].get<double>() << "\n";
        print_checks(j["checks"]);
        for (const auto& p : j["points"])
            if (p.contains("checks")) print_checks(p["checks"]);
    } else if (j.value("kind", "") == "run") {
        std::snprintf(line, sizeof line,
                      "efficiency %.4g  recall %.4g  leakage %.4g  steps %zu (+%zu rejected)\n",
                      j.value("efficiency", 0.0), j.value("recall_efficiency", 0.0),
                      j.value("leakage", 0.0), j.value("steps_accepted", std::size_t{0}),
                      j.value("steps_rejected", std::size_t{0}));
        out << line;
        if (j.contains("fidelity")) out << "fourier fidelity: " << j["fidelity"].get<double>() << "\n";
        if (j.contains("fringe"))
            out << "fringe: " << j["fringe"].value("freq_cycles_per_us", 0.0) << " cycles/us, visibility "
                << j["fringe"].value("visibility", 0.0) << "\n";
        if (j.contains("pair_separation_us"))
            out << "pair separation: " << j["pair_separation_us"].get<double>() << " us\n";
        if (j.contains("dsp"))
            out << "dsp round-trip error: " << j["dsp"].value("recovered_l2_error", 0.0) << "\n";
        print_checks(j["checks"]);
    } else {
        text_out = "report: unrecognized summary kind in '" + dir + "'\n";
        return 2;
    }

    out << (pass ? "ALL CHECKS PASS\n" : "CHECKS FAILED\n");
    text_out = out.str();
    return pass ? 0 : 1;
}

} // namespace gemeit
