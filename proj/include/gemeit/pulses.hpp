#pragma once

#include <functional>

#include "gemeit/envelope.hpp"

namespace gemeit {

enum class PulseKind { gaussian, double_gaussian, modulated_gaussian };

// Input pulse description. Times in us, mod_freq in cycles/us.
// double_gaussian: a1*G(t - tc + tau/2) + a2*e^{i phi}*G(t - tc - tau/2)
// modulated_gaussian: G(t - tc) * (1 - mod_depth * sin^2(pi f_m (t - tc)))
// where G is a unit-peak Gaussian of standard deviation sigma_t. The
// synthesized envelope is normalized to peak amplitude 1.
struct PulseSpec {
    PulseKind kind = PulseKind::gaussian;
    double center = 0.0;          // t_c
    double sigma_t = 0.5;         // Gaussian std
    double separation = 2.0;      // tau (double_gaussian)
    double relative_phase = 0.0;  // phi (double_gaussian)
    double amplitude_ratio = 1.0; // a2/a1 (double_gaussian)
    double mod_freq = 0.3;        // f_m, cycles/us (modulated_gaussian)
    double mod_depth = 1.0;       // in [0, 1]
    double amplitude = 1.0;       // overall scale applied after normalization
};

void validate(const PulseSpec& spec);

// Sample the envelope on [center - span/2, center + span/2] with spacing dt.
// Throws when the span fails to cover +-4 sigma beyond the outermost feature.
ComplexEnvelope synthesize(const PulseSpec& spec, double dt, double span);

// Closed-form continuous Fourier transform A(w) = integral a(t) e^{-i w t} dt
// of the synthesized envelope (including its peak normalization), as a
// function of angular frequency w (rad/us).
std::function<cplx(double)> analytic_ft(const PulseSpec& spec);

// Half-width of the time interval around `center` that carries the pulse,
// measured to 4 sigma beyond the outermost feature.
double pulse_half_extent(const PulseSpec& spec);

} // namespace gemeit
