#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace gemeit {

using cplx = std::complex<double>;

// Uniformly sampled complex envelope. Carrier for input pulses, output
// slices and demodulated heterodyne signals. Zero outside its span.
struct ComplexEnvelope {
    std::vector<cplx> samples;
    double t0 = 0.0; // start time (us)
    double dt = 1.0; // sample spacing (us)

    std::size_t size() const { return samples.size(); }
    double t_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double t_end() const { return samples.empty() ? t0 : t_at(samples.size() - 1); }

    // Linear interpolation between samples; zero outside [t0, t_end].
    cplx eval(double t) const;
};

// Throws std::invalid_argument on dt <= 0 or fewer than 2 samples.
ComplexEnvelope make_envelope(std::vector<cplx> samples, double t0, double dt);

// Time-integral of |env|^2 (trapezoidal).
double envelope_energy(const ComplexEnvelope& env);

// max |env|
double envelope_peak(const ComplexEnvelope& env);

// Energy-weighted centroid time; throws on zero-energy envelope.
double envelope_centroid(const ComplexEnvelope& env);

// Relative L2 distance ||a - b|| / ||b||, with a resampled onto b's grid.
double relative_l2_error(const ComplexEnvelope& a, const ComplexEnvelope& b);

// Peak of the normalized cross-correlation of |a| and |b| over all lags.
// Both magnitudes are compared on b's sample spacing. Returns a value in
// [0, 1]; 1 means the magnitude envelopes match up to a shift and scale.
double magnitude_xcorr_peak(const ComplexEnvelope& a, const ComplexEnvelope& b);

// env restricted to t >= t_from (samples are shared grid points).
ComplexEnvelope envelope_tail(const ComplexEnvelope& env, double t_from);

} // namespace gemeit
