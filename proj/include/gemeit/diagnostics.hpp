#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gemeit/envelope.hpp"
#include "gemeit/field_state.hpp"
#include "gemeit/grid.hpp"

namespace gemeit {

enum class MapDomain { position, momentum };

// Spinwave intensity against time, either |sigma_gs(z, t)|^2 or
// |S(k, t)|^2 with S(k) = dz * sum_n sigma_gs(z_n) e^{-i k z_n}. The
// momentum axis is the discrete Fourier dual of the z lattice, centered
// on k = 0.
struct SpinwaveMap {
    MapDomain domain = MapDomain::position;
    std::vector<double> axis;  // mm or rad/mm
    std::vector<double> times; // us
    std::vector<double> intensity; // axis-major: intensity[ia * times.size() + it]

    double at(std::size_t ia, std::size_t it) const { return intensity[ia * times.size() + it]; }
    std::vector<double> cross_section(double t) const; // nearest time slice
};

// Optional Hann window before the z -> k transform (display aid; the
// default keeps the maps exact Fourier duals of each other).
SpinwaveMap spinwave_momentum_map(const FieldState& state, const SimGrid& grid,
                                  bool hann_window = false);
SpinwaveMap spinwave_position_map(const FieldState& state, const SimGrid& grid);

// Complex momentum spectrum of one time slice, S(k) as above, with the
// matching centered axis.
std::pair<std::vector<double>, std::vector<cplx>>
momentum_spectrum_slice(const FieldState& state, const SimGrid& grid, double t);

// Intensity-weighted momentum centroid of a time slice (rad/mm).
double momentum_centroid(const FieldState& state, const SimGrid& grid, double t);

// E(z_max, t) for t >= t_from.
ComplexEnvelope output_envelope(const FieldState& state, const SimGrid& grid, double t_from);

struct OverlapReport {
    double fidelity = 0.0;    // in [0, 1]
    double scale = 0.0;       // optimal time-frequency scale s (rad/us per us)
    double time_offset = 0.0; // optimal offset t0 (us)
    double residual_l2 = 0.0; // sqrt(1 - fidelity)
};

// Normalized overlap |<output(t), F(s (t - t0))>|^2 / (||output||^2 ||F||^2)
// against a reference spectrum F (a continuous function of angular
// frequency), maximized over the scale s (both signs) and the offset t0.
OverlapReport fourier_fidelity(const ComplexEnvelope& output,
                               const std::function<cplx(double)>& reference_ft,
                               double scale_hint);

// Same metric with the reference spectrum computed from the input envelope
// by zero-padded FFT.
OverlapReport fourier_fidelity(const ComplexEnvelope& input, const ComplexEnvelope& output,
                               double scale_hint = 1.0);

// Overlap at fixed (s, t0), no search.
double fourier_overlap_at(const ComplexEnvelope& output,
                          const std::function<cplx(double)>& reference_ft,
                          double scale, double time_offset);

struct FringeResult {
    bool found = false;
    double freq = 0.0;       // cycles/us
    double phase = 0.0;      // rad, of cos(2 pi f t + phase) relative to t = 0
    double visibility = 0.0; // (max - min) / (max + min) over the central fringes
};

// Fringe parameters of |env|^2: dominant sideband of its spectrum
// (sub-bin refined), the phase of that component relative to absolute
// t = 0, and the modulation visibility around the envelope peak.
// Returns found = false when no sideband rises above the noise floor.
FringeResult fringe_analysis(const ComplexEnvelope& env);

// Phase of the |env|^2 modulation at a given frequency (direct DFT),
// relative to absolute t = 0.
double fringe_phase_at(const ComplexEnvelope& env, double freq);

// Time separation between the two side peaks flanking the strongest peak
// of |env|. Peaks must clear `rel_threshold` * max. Empty when fewer than
// two side peaks are found.
std::optional<double> pulse_pair_separation(const ComplexEnvelope& env,
                                            double rel_threshold = 0.05);

} // namespace gemeit
