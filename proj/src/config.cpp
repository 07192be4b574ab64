#include "gemeit/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gemeit {

namespace {

struct Entry {
    std::string section, key, value, file;
    int line = 0;
    std::string where() const { return file + ":" + std::to_string(line); }
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

void collect_entries(const std::string& text, const std::string& base_dir,
                     const std::string& name, int depth, std::vector<Entry>& out) {
    if (depth > 16) throw std::runtime_error(name + ": include depth exceeded (cycle?)");
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.rfind("include ", 0) == 0 || line.rfind("include\t", 0) == 0) {
            const std::string rel = trim(line.substr(8));
            const auto path = std::filesystem::path(base_dir) / rel;
            std::ifstream inc(path);
            if (!inc)
                throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                         ": cannot open include '" + path.string() + "'");
            std::stringstream buf;
            buf << inc.rdbuf();
            collect_entries(buf.str(), path.parent_path().string(), path.string(), depth + 1, out);
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(name + ":" + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(name + ":" + std::to_string(lineno) +
                                     ": expected 'key = value' or '[section]'");
        if (section.empty())
            throw std::runtime_error(name + ":" + std::to_string(lineno) + ": key outside any [section]");
        Entry e;
        e.section = section;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        e.file = name;
        e.line = lineno;
        if (e.key.empty() || e.value.empty())
            throw std::runtime_error(e.where() + ": empty key or value");
        out.push_back(std::move(e));
    }
}

double parse_double(const Entry& e) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::runtime_error(e.where() + ": '" + e.value + "' is not a number for key '" +
                                 e.key + "'");
    }
}

std::uint64_t parse_uint(const Entry& e) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(e.value, &pos);
        if (pos != e.value.size() || v < 0) throw std::invalid_argument("");
        return static_cast<std::uint64_t>(v);
    } catch (...) {
        throw std::runtime_error(e.where() + ": '" + e.value + "' is not a non-negative integer for key '" +
                                 e.key + "'");
    }
}

bool parse_bool(const Entry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw std::runtime_error(e.where() + ": '" + e.value + "' is not a boolean for key '" + e.key + "'");
}

std::vector<double> parse_list(const Entry& e) {
    std::vector<double> vals;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        Entry tmp = e;
        tmp.value = item;
        vals.push_back(parse_double(tmp));
    }
    if (vals.empty()) throw std::runtime_error(e.where() + ": empty value list for key '" + e.key + "'");
    return vals;
}

const std::set<std::string> k_acceptance_keys = {
    "min_fidelity", "min_visibility", "max_leakage", "min_recall_efficiency",
    "min_r2", "phase_slope_tol", "max_phase_dev", "min_xcorr", "max_roundtrip_error",
    "min_peak_transmission", "max_peak_transmission",
};

struct RawGrid {
    double z_min = 0.0, z_max = 1.0, t_max = 10.0;
    std::uint64_t nz = 128, n_samples = 500;
};

} // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir,
                                   const std::string& name) {
    std::vector<Entry> entries;
    collect_entries(text, base_dir, name, 0, entries);

    ExperimentConfig cfg;
    RawGrid raw;

    for (const auto& e : entries) {
        auto bad_key = [&]() -> std::runtime_error {
            return std::runtime_error(e.where() + ": unknown key '" + e.key + "' in [" + e.section + "]");
        };
        if (e.section == "grid") {
            if (e.key == "z_min") raw.z_min = parse_double(e);
            else if (e.key == "z_max") raw.z_max = parse_double(e);
            else if (e.key == "nz") raw.nz = parse_uint(e);
            else if (e.key == "t_max") raw.t_max = parse_double(e);
            else if (e.key == "n_samples") raw.n_samples = parse_uint(e);
            else throw bad_key();
        } else if (e.section == "ensemble") {
            if (e.key == "optical_depth") cfg.ensemble.optical_depth = parse_double(e);
            else if (e.key == "gamma_ge") cfg.ensemble.gamma_ge = parse_double(e);
            else if (e.key == "gamma_gs") cfg.ensemble.gamma_gs = parse_double(e);
            else if (e.key == "paper_literal_spinwave_decay")
                cfg.ensemble.paper_literal_spinwave_decay = parse_bool(e);
            else if (e.key == "profile") {
                if (e.value != "flat" && e.value != "gaussian")
                    throw std::runtime_error(e.where() + ": profile must be 'flat' or 'gaussian'");
                cfg.ensemble.profile = e.value;
            } else if (e.key == "profile_width") cfg.ensemble.profile_width = parse_double(e);
            else if (e.key == "pumping_efficiency") cfg.ensemble.pumping_efficiency = parse_double(e);
            else throw bad_key();
        } else if (e.section == "solver") {
            if (e.key == "method") {
                if (e.value == "rk45") cfg.solver.method = RkPair::dp45;
                else if (e.value == "rk78") cfg.solver.method = RkPair::fehlberg78;
                else throw std::runtime_error(e.where() + ": method must be 'rk45' or 'rk78'");
            } else if (e.key == "rel_tolerance") cfg.solver.rel_tolerance = parse_double(e);
            else if (e.key == "abs_tolerance") cfg.solver.abs_tolerance = parse_double(e);
            else if (e.key == "max_step") cfg.solver.max_step = parse_double(e);
            else throw bad_key();
        } else if (e.section == "pulse") {
            if (e.key == "kind") {
                if (e.value == "gaussian") cfg.pulse.kind = PulseKind::gaussian;
                else if (e.value == "double_gaussian") cfg.pulse.kind = PulseKind::double_gaussian;
                else if (e.value == "modulated_gaussian") cfg.pulse.kind = PulseKind::modulated_gaussian;
                else throw std::runtime_error(e.where() + ": unknown pulse kind '" + e.value + "'");
            } else if (e.key == "center") cfg.pulse.center = parse_double(e);
            else if (e.key == "sigma") cfg.pulse.sigma_t = parse_double(e);
            else if (e.key == "separation") cfg.pulse.separation = parse_double(e);
            else if (e.key == "phase") cfg.pulse.relative_phase = parse_double(e);
            else if (e.key == "amplitude_ratio") cfg.pulse.amplitude_ratio = parse_double(e);
            else if (e.key == "mod_freq") cfg.pulse.mod_freq = parse_double(e);
            else if (e.key == "mod_depth") cfg.pulse.mod_depth = parse_double(e);
            else if (e.key == "amplitude") cfg.pulse.amplitude = parse_double(e);
            else if (e.key == "sample_dt") cfg.pulse_sample_dt = parse_double(e);
            else if (e.key == "span_sigmas") cfg.pulse_span_sigmas = parse_double(e);
            else throw bad_key();
        } else if (e.section == "schedule") {
            if (e.key == "mode") {
                if (e.value == "idealized") cfg.schedule.mode = ScheduleMode::idealized;
                else if (e.value == "experimental") cfg.schedule.mode = ScheduleMode::experimental;
                else if (e.value == "gem_echo") cfg.schedule.mode = ScheduleMode::gem_echo;
                else throw std::runtime_error(e.where() + ": unknown schedule mode '" + e.value + "'");
            } else if (e.key == "write_end") cfg.schedule.write_end = parse_double(e);
            else if (e.key == "flip_end") cfg.schedule.flip_end = parse_double(e);
            else if (e.key == "read_start") cfg.schedule.read_start = parse_double(e);
            else if (e.key == "edge_time") cfg.schedule.edge_time = parse_double(e);
            else if (e.key == "flip_slope") cfg.schedule.flip_slope = parse_double(e);
            else throw bad_key();
        } else if (e.section == "gem") {
            if (e.key == "omega") cfg.gem.omega = parse_double(e);
            else if (e.key == "delta") cfg.gem.delta = parse_double(e);
            else if (e.key == "eta") cfg.gem.eta = parse_double(e);
            else if (e.key == "delta0") cfg.gem.delta0 = parse_double(e);
            else throw bad_key();
        } else if (e.section == "eit") {
            if (e.key == "omega") cfg.eit.omega = parse_double(e);
            else if (e.key == "delta0") cfg.eit.delta0 = parse_double(e);
            else throw bad_key();
        } else if (e.section == "dsp") {
            if (e.key == "enabled") cfg.dsp.enabled = parse_bool(e);
            else if (e.key == "lo_detuning") cfg.dsp.lo_detuning = parse_double(e);
            else if (e.key == "sample_rate") cfg.dsp.sample_rate = parse_double(e);
            else if (e.key == "noise_rms") cfg.dsp.noise_rms = parse_double(e);
            else if (e.key == "shots") cfg.dsp.shots = static_cast<int>(parse_uint(e));
            else if (e.key == "phase_jitter") cfg.dsp.phase_jitter = parse_double(e);
            else if (e.key == "bandpass_half_width") cfg.dsp.bandpass_half_width = parse_double(e);
            else if (e.key == "bandpass_order") cfg.dsp.bandpass_order = static_cast<int>(parse_uint(e));
            else if (e.key == "lp_cutoff") cfg.dsp.lp_cutoff = parse_double(e);
            else if (e.key == "analysis_rate") cfg.dsp.analysis_rate = parse_double(e);
            else throw bad_key();
        } else if (e.section == "sweep") {
            if (e.key == "parameter") {
                if (!is_sweep_parameter(e.value))
                    throw std::runtime_error(e.where() + ": unknown sweep parameter '" + e.value + "'");
                cfg.sweep.parameter = e.value;
            } else if (e.key == "values") cfg.sweep.values = parse_list(e);
            else throw bad_key();
        } else if (e.section == "output") {
            if (e.key == "write_maps") cfg.output.write_maps = parse_bool(e);
            else if (e.key == "write_plots") cfg.output.write_plots = parse_bool(e);
            else throw bad_key();
        } else if (e.section == "acceptance") {
            if (!k_acceptance_keys.count(e.key)) throw bad_key();
            cfg.acceptance[e.key] = parse_double(e);
        } else if (e.section == "run") {
            if (e.key == "seed") cfg.seed = parse_uint(e);
            else throw bad_key();
        } else {
            throw std::runtime_error(e.where() + ": unknown section [" + e.section + "]");
        }
    }

    // invariant validation, with config context on the message
    try {
        cfg.grid = make_grid(raw.z_min, raw.z_max, raw.nz, raw.t_max, raw.n_samples);
        validate(cfg.pulse);
        if (cfg.ensemble.pumping_efficiency < 0.0 || cfg.ensemble.pumping_efficiency > 1.0)
            throw std::invalid_argument("pumping_efficiency must lie in [0, 1]");
        if (!(cfg.solver.rel_tolerance > 0.0) || !(cfg.solver.abs_tolerance > 0.0))
            throw std::invalid_argument("solver tolerances must be positive");
        if (!(cfg.solver.max_step > 0.0)) throw std::invalid_argument("solver max_step must be positive");
        if (cfg.dsp.shots < 1) throw std::invalid_argument("dsp shots must be >= 1");
        if (!cfg.sweep.parameter.empty() && cfg.sweep.values.empty())
            throw std::invalid_argument("sweep values list must be non-empty");
        if (cfg.sweep.parameter.empty() && !cfg.sweep.values.empty())
            throw std::invalid_argument("sweep values given without a sweep parameter");
        cfg.make_protocol(); // checks segment ordering
    } catch (const std::exception& ex) {
        throw std::runtime_error(name + ": invalid configuration: " + ex.what());
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path().string();
    return parse_config_text(buf.str(), dir.empty() ? "." : dir, path);
}

EnsembleParams ExperimentConfig::make_ensemble() const {
    EnsembleParams p;
    p.gamma_ge = ensemble.gamma_ge;
    p.gamma_gs = ensemble.gamma_gs;
    p.spinwave_decay_like_paper = ensemble.paper_literal_spinwave_decay;
    p.optical_depth = ensemble.optical_depth;
    p.pumping_efficiency = ensemble.pumping_efficiency;
    p.density_profile = ensemble.profile == "flat"
                            ? flat_profile()
                            : gaussian_profile(grid.z_center(), ensemble.profile_width);
    return finalize_ensemble(std::move(p), grid);
}

ProtocolSchedule ExperimentConfig::make_protocol() const {
    switch (schedule.mode) {
    case ScheduleMode::idealized:
        return build_gem_eit_schedule(schedule.write_end, schedule.write_end,
                                      schedule.read_start, grid.t_max, gem, eit, true,
                                      grid.z_center(), pulse.center, schedule.edge_time);
    case ScheduleMode::experimental:
        return build_gem_eit_schedule(schedule.write_end, schedule.flip_end,
                                      schedule.read_start, grid.t_max, gem, eit, false,
                                      grid.z_center(), pulse.center, schedule.edge_time,
                                      schedule.flip_slope);
    case ScheduleMode::gem_echo:
        return build_gem_echo_schedule(schedule.write_end, grid.t_max, gem, grid.z_center(),
                                       schedule.edge_time);
    }
    throw std::logic_error("make_protocol: bad mode");
}

ComplexEnvelope ExperimentConfig::make_input() const {
    const double extra = std::max(0.0, pulse_span_sigmas - 4.0) * pulse.sigma_t;
    const double span = 2.0 * (pulse_half_extent(pulse) + extra);
    return synthesize(pulse, pulse_sample_dt, span);
}

std::string render_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "[grid]\n"
        << "z_min = " << num(cfg.grid.z_min) << "\nz_max = " << num(cfg.grid.z_max)
        << "\nnz = " << cfg.grid.nz << "\nt_max = " << num(cfg.grid.t_max)
        << "\nn_samples = " << cfg.grid.n_samples << "\n\n";
    out << "[ensemble]\noptical_depth = " << num(cfg.ensemble.optical_depth)
        << "\ngamma_ge = " << num(cfg.ensemble.gamma_ge)
        << "\ngamma_gs = " << num(cfg.ensemble.gamma_gs)
        << "\npaper_literal_spinwave_decay = "
        << (cfg.ensemble.paper_literal_spinwave_decay ? "true" : "false")
        << "\nprofile = " << cfg.ensemble.profile
        << "\nprofile_width = " << num(cfg.ensemble.profile_width)
        << "\npumping_efficiency = " << num(cfg.ensemble.pumping_efficiency) << "\n\n";
    out << "[solver]\nmethod = " << (cfg.solver.method == RkPair::dp45 ? "rk45" : "rk78")
        << "\nrel_tolerance = " << num(cfg.solver.rel_tolerance)
        << "\nabs_tolerance = " << num(cfg.solver.abs_tolerance)
        << "\nmax_step = " << num(cfg.solver.max_step) << "\n\n";
    const char* kind = cfg.pulse.kind == PulseKind::gaussian ? "gaussian"
                       : cfg.pulse.kind == PulseKind::double_gaussian ? "double_gaussian"
                                                                      : "modulated_gaussian";
    out << "[pulse]\nkind = " << kind << "\ncenter = " << num(cfg.pulse.center)
        << "\nsigma = " << num(cfg.pulse.sigma_t)
        << "\nseparation = " << num(cfg.pulse.separation)
        << "\nphase = " << num(cfg.pulse.relative_phase)
        << "\namplitude_ratio = " << num(cfg.pulse.amplitude_ratio)
        << "\nmod_freq = " << num(cfg.pulse.mod_freq)
        << "\nmod_depth = " << num(cfg.pulse.mod_depth)
        << "\namplitude = " << num(cfg.pulse.amplitude)
        << "\nsample_dt = " << num(cfg.pulse_sample_dt)
        << "\nspan_sigmas = " << num(cfg.pulse_span_sigmas) << "\n\n";
    const char* mode = cfg.schedule.mode == ScheduleMode::idealized ? "idealized"
                       : cfg.schedule.mode == ScheduleMode::experimental ? "experimental"
                                                                         : "gem_echo";
    out << "[schedule]\nmode = " << mode << "\nwrite_end = " << num(cfg.schedule.write_end)
        << "\nflip_end = " << num(cfg.schedule.flip_end)
        << "\nread_start = " << num(cfg.schedule.read_start)
        << "\nedge_time = " << num(cfg.schedule.edge_time) << "\n";
    if (cfg.schedule.flip_slope) out << "flip_slope = " << num(*cfg.schedule.flip_slope) << "\n";
    out << "\n[gem]\nomega = " << num(cfg.gem.omega) << "\ndelta = " << num(cfg.gem.delta)
        << "\neta = " << num(cfg.gem.eta) << "\ndelta0 = " << num(cfg.gem.delta0) << "\n\n";
    out << "[eit]\nomega = " << num(cfg.eit.omega) << "\ndelta0 = " << num(cfg.eit.delta0)
        << "\n\n";
    out << "[dsp]\nenabled = " << (cfg.dsp.enabled ? "true" : "false")
        << "\nlo_detuning = " << num(cfg.dsp.lo_detuning)
        << "\nsample_rate = " << num(cfg.dsp.sample_rate)
        << "\nnoise_rms = " << num(cfg.dsp.noise_rms) << "\nshots = " << cfg.dsp.shots
        << "\nphase_jitter = " << num(cfg.dsp.phase_jitter)
        << "\nbandpass_half_width = " << num(cfg.dsp.bandpass_half_width)
        << "\nbandpass_order = " << cfg.dsp.bandpass_order
        << "\nlp_cutoff = " << num(cfg.dsp.lp_cutoff)
        << "\nanalysis_rate = " << num(cfg.dsp.analysis_rate) << "\n\n";
    if (!cfg.sweep.parameter.empty()) {
        out << "[sweep]\nparameter = " << cfg.sweep.parameter << "\nvalues = ";
        for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i)
            out << num(cfg.sweep.values[i]) << (i + 1 < cfg.sweep.values.size() ? ", " : "");
        out << "\n\n";
    }
    out << "[output]\nwrite_maps = " << (cfg.output.write_maps ? "true" : "false")
        << "\nwrite_plots = " << (cfg.output.write_plots ? "true" : "false") << "\n\n";
    if (!cfg.acceptance.empty()) {
        out << "[acceptance]\n";
        for (const auto& [k, v] : cfg.acceptance) out << k << " = " << num(v) << "\n";
        out << "\n";
    }
    out << "[run]\nseed = " << cfg.seed << "\n";
    return out.str();
}

bool is_sweep_parameter(const std::string& name) {
    static const std::set<std::string> known = {
        "pulse.separation", "pulse.phase", "pulse.mod_freq", "pulse.sigma", "pulse.center",
        "gem.eta", "gem.omega", "gem.delta", "eit.omega", "solver.rel_tolerance",
    };
    return known.count(name) > 0;
}

ExperimentConfig with_sweep_value(const ExperimentConfig& cfg, const std::string& parameter,
                                  double value) {
    ExperimentConfig out = cfg;
    if (parameter == "pulse.separation") out.pulse.separation = value;
    else if (parameter == "pulse.phase") out.pulse.relative_phase = value;
    else if (parameter == "pulse.mod_freq") out.pulse.mod_freq = value;
    else if (parameter == "pulse.sigma") out.pulse.sigma_t = value;
    else if (parameter == "pulse.center") out.pulse.center = value;
    else if (parameter == "gem.eta") out.gem.eta = value;
    else if (parameter == "gem.omega") out.gem.omega = value;
    else if (parameter == "gem.delta") out.gem.delta = value;
    else if (parameter == "eit.omega") out.eit.omega = value;
    else if (parameter == "solver.rel_tolerance") out.solver.rel_tolerance = value;
    else throw std::invalid_argument("with_sweep_value: unknown parameter '" + parameter + "'");
    return out;
}

} // namespace gemeit
