#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gemeit/dsp.hpp"
#include "gemeit/ensemble.hpp"
#include "gemeit/grid.hpp"
#include "gemeit/pulses.hpp"
#include "gemeit/schedule.hpp"
#include "gemeit/solver.hpp"

namespace gemeit {

enum class ScheduleMode { idealized, experimental, gem_echo };

// Fully resolved experiment definition. Defaults applied; unknown keys are
// rejected during parsing with file:line diagnostics.
struct ExperimentConfig {
    SimGrid grid = make_grid(0.0, 1.0, 128, 10.0, 500);

    struct Ensemble {
        double optical_depth = 100.0;
        double gamma_ge = 18.0;
        double gamma_gs = 0.01;
        bool paper_literal_spinwave_decay = false;
        std::string profile = "flat"; // flat | gaussian
        double profile_width = 10.0;  // 1/e^2 half-width (mm), gaussian only
        double pumping_efficiency = 1.0;
    } ensemble;

    SolverConfig solver;

    PulseSpec pulse;
    double pulse_sample_dt = 0.002; // us
    double pulse_span_sigmas = 6.0; // synthesized span beyond features

    struct Schedule {
        ScheduleMode mode = ScheduleMode::idealized;
        double write_end = 5.0;
        double flip_end = 5.0;
        double read_start = 5.0;
        double edge_time = 0.2;
        std::optional<double> flip_slope; // experimental mode override
    } schedule;

    GemSettings gem;
    EitSettings eit;

    struct Dsp {
        bool enabled = false;
        double lo_detuning = 50.0; // MHz
        double sample_rate = 1.0;  // GS/s
        double noise_rms = 0.0;
        int shots = 1;
        double phase_jitter = 0.0; // rad rms shot-to-shot
        double bandpass_half_width = 15.0; // MHz
        int bandpass_order = 4;
        double lp_cutoff = 15.0;   // MHz
        double analysis_rate = 62.5; // MS/s
    } dsp;

    struct Sweep {
        std::string parameter; // empty = single run
        std::vector<double> values;
    } sweep;

    struct Output {
        bool write_maps = true;
        bool write_plots = true;
    } output;

    // optional thresholds evaluated by run/report
    std::map<std::string, double> acceptance;

    std::uint64_t seed = 1;

    // derived builders
    EnsembleParams make_ensemble() const;
    ProtocolSchedule make_protocol() const;
    ComplexEnvelope make_input() const;
};

// Parses the sectioned key-value text. include directives are resolved
// relative to base_dir. Throws std::runtime_error with "file:line:" style
// messages on unknown keys, bad values or invariant violations.
ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir = ".",
                                   const std::string& name = "<config>");
ExperimentConfig parse_config_file(const std::string& path);

// Echo of a resolved config in the same format (round-trips through the parser).
std::string render_config(const ExperimentConfig& cfg);

// Applies one sweep value to a copy of the config. Valid names:
// pulse.separation, pulse.phase, pulse.mod_freq, pulse.sigma, pulse.center,
// gem.eta, gem.omega, gem.delta, eit.omega, solver.rel_tolerance.
ExperimentConfig with_sweep_value(const ExperimentConfig& cfg, const std::string& parameter,
                                  double value);
bool is_sweep_parameter(const std::string& name);

} // namespace gemeit
