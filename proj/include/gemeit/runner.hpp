#pragma once

#include <optional>
#include <string>

#include "gemeit/config.hpp"
#include "gemeit/diagnostics.hpp"
#include "gemeit/dsp.hpp"
#include "gemeit/field_state.hpp"
#include "gemeit/stats.hpp"

namespace gemeit {

struct AcceptanceCheck {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string op; // ">=" or "<="
    bool pass = false;
};

struct DspOutcome {
    double recovered_l2_error = 0.0; // averaged demodulated envelope vs source
    std::optional<FringeResult> fringe;
    std::optional<ChirpedGaussianFit> fit; // single-Gaussian runs only
};

struct RunSummary {
    double input_energy = 0.0;
    double output_energy = 0.0;        // full record at z_max
    double recall_energy = 0.0;        // t >= read window
    double efficiency = 0.0;           // output / input (passivity metric)
    double recall_efficiency = 0.0;
    double leakage = 0.0;              // transmitted during write / input
    double peak_transmission = 0.0;    // (peak |out| / peak |in|)^2
    std::optional<OverlapReport> fidelity;
    std::optional<FringeResult> fringe;
    std::optional<double> pair_separation;
    std::optional<DspOutcome> dsp;
    IntegrationStats stats;
    double wall_seconds = 0.0;
    std::vector<AcceptanceCheck> checks;
    bool all_checks_pass() const;
};

struct RunResult {
    ExperimentConfig config;
    SimGrid grid;
    EnsembleParams ensemble;
    ProtocolSchedule schedule;
    ComplexEnvelope input;
    FieldState state;
    ComplexEnvelope output_full; // E(z_max, t) over the whole record
    ComplexEnvelope output_read; // restricted to the read window
    RunSummary summary;
};

// Single integration plus post-processing. Deterministic given the config
// seed. Throws on solver failure with the run context in the message.
RunResult run_experiment(const ExperimentConfig& cfg);

// Expected time-frequency scale of the read-out (for the fidelity search):
// write gradient slope times the EIT group velocity estimate.
double fidelity_scale_hint(const ExperimentConfig& cfg, const EnsembleParams& ensemble);

void write_run_artifacts(const RunResult& result, const std::string& out_dir);

struct SweepPoint {
    double value = 0.0;
    RunSummary summary;
    ComplexEnvelope output_read;
};

struct SweepOutcome {
    std::string parameter;
    std::vector<SweepPoint> points;
    // aggregate metrics where the swept parameter implies one
    std::optional<LinearFit> fringe_freq_fit;     // fringe freq vs separation
    std::optional<LinearFit> phase_fit;           // output phase vs input phase
    std::optional<double> max_phase_deviation;    // rad, against the fitted line
    std::optional<LinearFit> separation_fit;      // pair separation vs mod freq
    std::vector<AcceptanceCheck> checks;
    bool all_checks_pass() const;
};

// Runs all sweep points (in parallel over `jobs` workers), aggregates the
// sweep table, and evaluates sweep-level acceptance thresholds.
SweepOutcome run_sweep(const ExperimentConfig& cfg, unsigned jobs = 1);

void write_sweep_artifacts(const SweepOutcome& outcome, const ExperimentConfig& cfg,
                           const std::string& out_dir, bool write_point_artifacts = true);

// Prints the summary table for a completed run directory; returns the exit
// code (0 iff every embedded acceptance threshold passed).
int report_directory(const std::string& dir, std::string& text_out);

} // namespace gemeit
