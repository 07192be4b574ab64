#include "gemeit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gemeit/quadrature.hpp"

namespace gemeit {

namespace {

struct Tableau {
    int stages;
    int lower_order;
    int advancing_order;
    std::vector<double> c;
    std::vector<std::vector<double>> a; // a[i] has i entries (row i+1 of the matrix)
    std::vector<double> b;              // advancing weights
    std::vector<double> e;              // b_high - b_low, error weights
    bool fsal;
};

Tableau make_dp45() {
    Tableau t;
    t.stages = 7;
    t.lower_order = 4;
    t.advancing_order = 5;
    t.fsal = true;
    t.c = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    t.a = {
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    };
    t.b = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
    const std::vector<double> b4 = {5179.0 / 57600, 0.0,          7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
    t.e.resize(7);
    for (int i = 0; i < 7; ++i) t.e[i] = t.b[i] - b4[i];
    return t;
}

Tableau make_fehlberg78() {
    Tableau t;
    t.stages = 13;
    t.lower_order = 7;
    t.advancing_order = 8;
    t.fsal = false;
    t.c = {0.0,       2.0 / 27, 1.0 / 9, 1.0 / 6, 5.0 / 12, 1.0 / 2, 5.0 / 6,
           1.0 / 6,   2.0 / 3,  1.0 / 3, 1.0,     0.0,      1.0};
    t.a = {
        {2.0 / 27},
        {1.0 / 36, 1.0 / 12},
        {1.0 / 24, 0.0, 1.0 / 8},
        {5.0 / 12, 0.0, -25.0 / 16, 25.0 / 16},
        {1.0 / 20, 0.0, 0.0, 1.0 / 4, 1.0 / 5},
        {-25.0 / 108, 0.0, 0.0, 125.0 / 108, -65.0 / 27, 125.0 / 54},
        {31.0 / 300, 0.0, 0.0, 0.0, 61.0 / 225, -2.0 / 9, 13.0 / 900},
        {2.0, 0.0, 0.0, -53.0 / 6, 704.0 / 45, -107.0 / 9, 67.0 / 90, 3.0},
        {-91.0 / 108, 0.0, 0.0, 23.0 / 108, -976.0 / 135, 311.0 / 54, -19.0 / 60, 17.0 / 6,
         -1.0 / 12},
        {2383.0 / 4100, 0.0, 0.0, -341.0 / 164, 4496.0 / 1025, -301.0 / 82, 2133.0 / 4100,
         45.0 / 82, 45.0 / 164, 18.0 / 41},
        {3.0 / 205, 0.0, 0.0, 0.0, 0.0, -6.0 / 41, -3.0 / 205, -3.0 / 41, 3.0 / 41, 6.0 / 41,
         0.0},
        {-1777.0 / 4100, 0.0, 0.0, -341.0 / 164, 4496.0 / 1025, -289.0 / 82, 2193.0 / 4100,
         51.0 / 82, 33.0 / 164, 12.0 / 41, 0.0, 1.0},
    };
    t.b = {0.0, 0.0, 0.0, 0.0, 0.0, 34.0 / 105, 9.0 / 35, 9.0 / 35, 9.0 / 280, 9.0 / 280,
           0.0, 41.0 / 840, 41.0 / 840};
    const std::vector<double> b7 = {41.0 / 840, 0.0, 0.0, 0.0, 0.0, 34.0 / 105, 9.0 / 35,
                                    9.0 / 35, 9.0 / 280, 9.0 / 280, 41.0 / 840, 0.0, 0.0};
    t.e.resize(13);
    for (int i = 0; i < 13; ++i) t.e[i] = t.b[i] - b7[i];
    return t;
}

const Tableau& tableau(RkPair method) {
    static const Tableau dp = make_dp45();
    static const Tableau f78 = make_fehlberg78();
    return method == RkPair::dp45 ? dp : f78;
}

// Atomic state on the lattice, flattened as sigma_ge then sigma_gs.
struct AtomState {
    std::vector<cplx> ge;
    std::vector<cplx> gs;

    explicit AtomState(std::size_t nz = 0) : ge(nz), gs(nz) {}
    std::size_t nz() const { return ge.size(); }
};

// Per-stage scalar drive values; the spatial phase e^{i k0 z} is cached per
// segment so the inner loop only multiplies.
class DriveTable {
public:
    DriveTable(const ProtocolSchedule& schedule, const SimGrid& grid)
        : schedule_(&schedule), grid_(&grid) {
        phases_.resize(schedule.segments.size());
        for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
            const double k0 = schedule.segments[i].control_spatial_freq;
            if (k0 != 0.0) {
                auto& ph = phases_[i];
                ph.resize(grid.nz);
                for (std::size_t n = 0; n < grid.nz; ++n)
                    ph[n] = std::polar(1.0, k0 * grid.z_at(n));
            }
        }
    }

    struct Stage {
        cplx omega_t;     // edge-scaled control amplitude (spatial phase excluded)
        double slope_t;   // edge-scaled gradient slope
        double offset_t;  // edge-scaled gradient offset
        double delta_1;
        double delta_ac;
        const std::vector<cplx>* phase; // nullptr when k0 == 0
    };

    Stage at(double t) const {
        const std::size_t i = schedule_->segment_index_at(std::min(t, schedule_->t_max()));
        const Segment& s = schedule_->segments[i];
        const double f = s.edge_factor(std::clamp(t, s.t_start, s.t_end));
        Stage st;
        const double amp = s.control_amplitude * f;
        st.omega_t = cplx(amp, 0.0);
        st.slope_t = s.gradient_slope * f;
        st.offset_t = s.gradient_offset * f;
        st.delta_1 = s.control_detuning;
        st.delta_ac = s.control_detuning != 0.0 ? amp * amp / s.control_detuning : 0.0;
        st.phase = phases_[i].empty() ? nullptr : &phases_[i];
        return st;
    }

private:
    const ProtocolSchedule* schedule_;
    const SimGrid* grid_;
    std::vector<std::vector<cplx>> phases_;
};

class Integrator {
public:
    Integrator(const ComplexEnvelope& input, const ProtocolSchedule& schedule,
               const EnsembleParams& params, const SimGrid& grid, const SolverConfig& config)
        : input_(input), schedule_(schedule), params_(params), grid_(grid), config_(config),
          tab_(tableau(config.method)), drive_(schedule, grid), kappa_(params.coupling_on_grid(grid)),
          z_(grid.z_axis()) {
        if (schedule.t_max() < grid.t_max - 1e-9)
            throw std::invalid_argument("integrate: schedule does not cover [0, t_max]");
        if (!(config.rel_tolerance > 0.0) || !(config.abs_tolerance > 0.0))
            throw std::invalid_argument("integrate: tolerances must be positive");
        if (!(config.max_step > 0.0))
            throw std::invalid_argument("integrate: max_step must be positive");
        zrel_.resize(grid.nz);
        for (std::size_t n = 0; n < grid.nz; ++n)
            zrel_[n] = z_[n] - schedule.gradient_center;
        efield_.resize(grid.nz);
        integrand_.resize(grid.nz);
        cumint_.resize(grid.nz);
    }

    IntegrationResult run() {
        const std::size_t nz = grid_.nz;
        AtomState y(nz);
        FieldState record = FieldState::zeros(grid_);
        record_ = &record;

        std::vector<AtomState> k(tab_.stages, AtomState(nz));
        AtomState ystage(nz), ynew(nz), f_new(nz);

        record_sample(0, y); // t = 0

        auto breaks = schedule_.breakpoints();
        breaks.push_back(grid_.t_max);
        std::sort(breaks.begin(), breaks.end());

        double t = 0.0;
        double h = std::min(config_.max_step, config_.initial_step);
        std::size_t next_sample = 1;
        rhs(t, y, k[0]);

        while (t < grid_.t_max - 1e-12) {
            // do not step across drive breakpoints
            double t_limit = grid_.t_max;
            for (double b : breaks)
                if (b > t + 1e-12) { t_limit = std::min(t_limit, b); break; }
            bool clipped = false;
            double h_try = h;
            if (t + h_try > t_limit) { h_try = t_limit - t; clipped = true; }

            // stages
            for (int i = 1; i < tab_.stages; ++i) {
                const auto& arow = tab_.a[static_cast<std::size_t>(i - 1)];
                for (std::size_t n = 0; n < nz; ++n) {
                    cplx age = y.ge[n], ags = y.gs[n];
                    for (int j = 0; j < i; ++j) {
                        const double aij = arow[static_cast<std::size_t>(j)];
                        if (aij == 0.0) continue;
                        age += h_try * aij * k[static_cast<std::size_t>(j)].ge[n];
                        ags += h_try * aij * k[static_cast<std::size_t>(j)].gs[n];
                    }
                    ystage.ge[n] = age;
                    ystage.gs[n] = ags;
                }
                rhs(t + tab_.c[static_cast<std::size_t>(i)] * h_try, ystage, k[static_cast<std::size_t>(i)]);
            }

            // advancing solution and error estimate
            double err_sq = 0.0;
            for (std::size_t n = 0; n < nz; ++n) {
                cplx age = y.ge[n], ags = y.gs[n], ege{}, egs{};
                for (int i = 0; i < tab_.stages; ++i) {
                    const double bi = tab_.b[static_cast<std::size_t>(i)];
                    const double ei = tab_.e[static_cast<std::size_t>(i)];
                    const auto& ki = k[static_cast<std::size_t>(i)];
                    if (bi != 0.0) {
                        age += h_try * bi * ki.ge[n];
                        ags += h_try * bi * ki.gs[n];
                    }
                    if (ei != 0.0) {
                        ege += h_try * ei * ki.ge[n];
                        egs += h_try * ei * ki.gs[n];
                    }
                }
                ynew.ge[n] = age;
                ynew.gs[n] = ags;
                err_sq += weighted_sq(ege, y.ge[n], age);
                err_sq += weighted_sq(egs, y.gs[n], ags);
            }
            const double err = std::sqrt(err_sq / static_cast<double>(2 * nz));
            if (!std::isfinite(err)) throw std::runtime_error("integrate: non-finite state encountered");
#ifdef GEMEIT_TRACE_STEPS
            std::fprintf(stderr, "t=%.17g h=%.17g err=%.17g\n", t, h_try, err);
#endif

            const StepDecision dec =
                step_controller(err, h_try, config_.max_step, tab_.lower_order);

            if (dec.accepted) {
                ++stats_.steps_accepted;
                // derivative at the right end, for dense output and FSAL reuse
                if (tab_.fsal) {
                    f_new.ge = k[static_cast<std::size_t>(tab_.stages - 1)].ge;
                    f_new.gs = k[static_cast<std::size_t>(tab_.stages - 1)].gs;
                } else {
                    rhs(t + h_try, ynew, f_new);
                }
                while (next_sample < grid_.n_samples && grid_.t_at(next_sample) <= t + h_try + 1e-12) {
                    const double ts = std::min(grid_.t_at(next_sample), t + h_try);
                    hermite_sample(next_sample, t, h_try, y, k[0], ynew, f_new, ts);
                    ++next_sample;
                }
                y.ge.swap(ynew.ge);
                y.gs.swap(ynew.gs);
                k[0].ge = f_new.ge;
                k[0].gs = f_new.gs;
                t += h_try;
                h = clipped ? std::max(h, dec.next_step) : dec.next_step;
            } else {
                ++stats_.steps_rejected;
                h = dec.next_step;
            }
            if (h < 1e-6)
                throw std::runtime_error("integrate: step size underflow below 1e-6 us (stiffness failure)");
        }

        // assemble the record
        for (std::size_t s = 0; s < grid_.n_samples; ++s) {
            // E row from the sampled coherences
            for (std::size_t n = 0; n < nz; ++n) integrand_[n] = kappa_[n] * record.sigma_ge[record.idx(s, n)];
            cumulative_integral(integrand_, grid_.dz(), cumint_);
            const cplx e0 = input_.eval(grid_.t_at(s));
            for (std::size_t n = 0; n < nz; ++n)
                record.E[record.idx(s, n)] = e0 + cplx(0.0, 1.0) * cumint_[n];
        }
        if (!record.all_finite()) throw std::runtime_error("integrate: non-finite state encountered");
        return IntegrationResult{std::move(record), stats_};
    }

private:
    double weighted_sq(cplx e, cplx y0, cplx y1) const {
        const double scale = config_.abs_tolerance +
                             config_.rel_tolerance * std::max(std::abs(y0), std::abs(y1));
        if (scale == 0.0) return 0.0;
        const double w = std::abs(e) / scale;
        return w * w;
    }

    void rhs(double t, const AtomState& y, AtomState& dy) {
        ++stats_.rhs_evaluations;
        const std::size_t nz = grid_.nz;
        const auto st = drive_.at(t);
        const cplx i_unit(0.0, 1.0);
        const double g = params_.field_coupling;
        const double gamma_ge = params_.gamma_ge;
        const double gamma_s = params_.spinwave_gamma();

        for (std::size_t n = 0; n < nz; ++n) integrand_[n] = kappa_[n] * y.ge[n];
        cumulative_integral(integrand_, grid_.dz(), cumint_);
        const cplx e0 = input_.eval(t);
        for (std::size_t n = 0; n < nz; ++n) efield_[n] = e0 + i_unit * cumint_[n];

        const cplx decay_ge(gamma_ge, st.delta_1);
        for (std::size_t n = 0; n < nz; ++n) {
            const cplx omega = st.phase ? st.omega_t * (*st.phase)[n] : st.omega_t;
            const cplx sge = y.ge[n];
            const cplx sgs = y.gs[n];
            dy.ge[n] = i_unit * (g * efield_[n] + omega * sgs) - decay_ge * sge;
            const double delta2 = st.slope_t * zrel_[n] + st.offset_t;
            dy.gs[n] = i_unit * std::conj(omega) * sge -
                       cplx(gamma_s, delta2 - st.delta_ac) * sgs;
        }
    }

    // Cubic Hermite interpolation of the coherences inside an accepted step.
    void hermite_sample(std::size_t sample, double t, double h, const AtomState& y0,
                        const AtomState& f0, const AtomState& y1, const AtomState& f1,
                        double ts) {
        const double th = (ts - t) / h;
        const double h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        const double h10 = th * (1.0 - th) * (1.0 - th);
        const double h01 = th * th * (3.0 - 2.0 * th);
        const double h11 = th * th * (th - 1.0);
        FieldState& rec = *record_;
        for (std::size_t n = 0; n < grid_.nz; ++n) {
            rec.sigma_ge[rec.idx(sample, n)] =
                h00 * y0.ge[n] + h10 * h * f0.ge[n] + h01 * y1.ge[n] + h11 * h * f1.ge[n];
            rec.sigma_gs[rec.idx(sample, n)] =
                h00 * y0.gs[n] + h10 * h * f0.gs[n] + h01 * y1.gs[n] + h11 * h * f1.gs[n];
        }
    }

    void record_sample(std::size_t sample, const AtomState& y) {
        FieldState& rec = *record_;
        for (std::size_t n = 0; n < grid_.nz; ++n) {
            rec.sigma_ge[rec.idx(sample, n)] = y.ge[n];
            rec.sigma_gs[rec.idx(sample, n)] = y.gs[n];
        }
    }

    const ComplexEnvelope& input_;
    const ProtocolSchedule& schedule_;
    const EnsembleParams& params_;
    const SimGrid& grid_;
    const SolverConfig& config_;
    const Tableau& tab_;
    DriveTable drive_;
    std::vector<double> kappa_;
    std::vector<double> z_;
    std::vector<double> zrel_;
    std::vector<cplx> efield_;
    std::vector<cplx> integrand_;
    std::vector<cplx> cumint_;
    IntegrationStats stats_;
    FieldState* record_ = nullptr;
};

} // namespace

int design_order(RkPair method) { return tableau(method).advancing_order; }
int embedded_order(RkPair method) { return tableau(method).lower_order; }

std::pair<cplx, cplx> obe_rhs(cplx sigma_ge, cplx sigma_gs, cplx E,
                              const DriveSample& drive, const EnsembleParams& params) {
    const cplx i_unit(0.0, 1.0);
    const cplx d_ge = i_unit * (params.field_coupling * E + drive.omega * sigma_gs) -
                      cplx(params.gamma_ge, drive.delta_1) * sigma_ge;
    const cplx d_gs = i_unit * std::conj(drive.omega) * sigma_ge -
                      cplx(params.spinwave_gamma(), drive.delta_2 - drive.delta_acstark) * sigma_gs;
    return {d_ge, d_gs};
}

void spatial_sweep(std::span<const cplx> sigma_ge_column, cplx boundary_E,
                   std::span<const double> kappa, double dz, std::span<cplx> e_out) {
    const std::size_t nz = sigma_ge_column.size();
    if (kappa.size() != nz || e_out.size() != nz)
        throw std::invalid_argument("spatial_sweep: size mismatch");
    std::vector<cplx> integrand(nz), cum(nz);
    for (std::size_t n = 0; n < nz; ++n) integrand[n] = kappa[n] * sigma_ge_column[n];
    cumulative_integral(integrand, dz, cum);
    for (std::size_t n = 0; n < nz; ++n) e_out[n] = boundary_E + cplx(0.0, 1.0) * cum[n];
}

StepDecision step_controller(double error_estimate, double current_step,
                             double max_step, int lower_order) {
    if (error_estimate < 0.0)
        throw std::invalid_argument("step_controller: error estimate must be >= 0");
    // Quantize the estimate: the embedded difference carries floating-point
    // cancellation noise, and step decisions should not chatter on it.
    const double err = std::ldexp(std::round(std::ldexp(error_estimate, 30)), -30);
    const bool accepted = err <= 1.0;
    double factor;
    if (err == 0.0) {
        factor = 5.0;
    } else {
        const double p = static_cast<double>(lower_order);
        factor = std::clamp(0.9 * std::pow(err, -1.0 / (p + 1.0)), 0.2, 5.0);
    }
    return StepDecision{accepted, std::min(current_step * factor, max_step)};
}

IntegrationResult integrate(const ComplexEnvelope& input, const ProtocolSchedule& schedule,
                            const EnsembleParams& params, const SimGrid& grid,
                            const SolverConfig& config) {
    Integrator integ(input, schedule, params, grid, config);
    return integ.run();
}

} // namespace gemeit
