#include "gemeit/pulses.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gemeit {

namespace {
constexpr double pi = std::numbers::pi;

double gauss(double x, double sigma) { return std::exp(-x * x / (2.0 * sigma * sigma)); }

// Unnormalized envelope relative to the pulse center.
cplx raw_envelope(const PulseSpec& s, double x) {
    switch (s.kind) {
    case PulseKind::gaussian:
        return gauss(x, s.sigma_t);
    case PulseKind::double_gaussian: {
        const cplx second = s.amplitude_ratio * std::polar(1.0, s.relative_phase);
        return gauss(x + 0.5 * s.separation, s.sigma_t) +
               second * gauss(x - 0.5 * s.separation, s.sigma_t);
    }
    case PulseKind::modulated_gaussian: {
        const double m = std::sin(pi * s.mod_freq * x);
        return gauss(x, s.sigma_t) * (1.0 - s.mod_depth * m * m);
    }
    }
    return {};
}

// Peak |envelope| before normalization. Exact for the single and modulated
// Gaussians; located numerically (grid scan + golden section) for the pair.
double raw_peak(const PulseSpec& s) {
    if (s.kind != PulseKind::double_gaussian) return 1.0;
    const double half = 0.5 * s.separation + 4.0 * s.sigma_t;
    const double step = s.sigma_t / 64.0;
    double best_x = 0.0, best = 0.0;
    for (double x = -half; x <= half; x += step) {
        const double v = std::abs(raw_envelope(s, x));
        if (v > best) { best = v; best_x = x; }
    }
    // golden-section refinement on |envelope|
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = best_x - step, b = best_x + step;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 80; ++it) {
        if (std::abs(raw_envelope(s, c)) > std::abs(raw_envelope(s, d))) b = d;
        else a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return std::abs(raw_envelope(s, 0.5 * (a + b)));
}

cplx gauss_ft(double sigma, double w) {
    return sigma * std::sqrt(2.0 * pi) * std::exp(-0.5 * sigma * sigma * w * w);
}
} // namespace

void validate(const PulseSpec& s) {
    if (!(s.sigma_t > 0.0)) throw std::invalid_argument("PulseSpec: sigma_t must be positive");
    if (s.kind == PulseKind::double_gaussian && !(s.separation > 0.0))
        throw std::invalid_argument("PulseSpec: separation must be positive");
    if (s.kind == PulseKind::modulated_gaussian &&
        (s.mod_depth < 0.0 || s.mod_depth > 1.0))
        throw std::invalid_argument("PulseSpec: mod_depth must lie in [0, 1]");
    if (s.kind == PulseKind::modulated_gaussian && !(s.mod_freq > 0.0))
        throw std::invalid_argument("PulseSpec: mod_freq must be positive");
    if (s.amplitude < 0.0) throw std::invalid_argument("PulseSpec: amplitude must be >= 0");
    if (s.amplitude_ratio < 0.0) throw std::invalid_argument("PulseSpec: amplitude_ratio must be >= 0");
}

double pulse_half_extent(const PulseSpec& s) {
    double half = 4.0 * s.sigma_t;
    if (s.kind == PulseKind::double_gaussian) half += 0.5 * s.separation;
    return half;
}

ComplexEnvelope synthesize(const PulseSpec& spec, double dt, double span) {
    validate(spec);
    if (!(dt > 0.0)) throw std::invalid_argument("synthesize: dt must be positive");
    if (span < 2.0 * pulse_half_extent(spec))
        throw std::invalid_argument("synthesize: span must cover 4 sigma beyond the outermost feature");
    const double scale = spec.amplitude / raw_peak(spec);
    const auto n = static_cast<std::size_t>(span / dt) + 1;
    std::vector<cplx> samples(n);
    const double t0 = spec.center - 0.5 * span;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + dt * static_cast<double>(i);
        samples[i] = scale * raw_envelope(spec, t - spec.center);
    }
    return ComplexEnvelope{std::move(samples), t0, dt};
}

std::function<cplx(double)> analytic_ft(const PulseSpec& spec) {
    validate(spec);
    const double scale = spec.amplitude / raw_peak(spec);
    const PulseSpec s = spec;
    return [s, scale](double w) -> cplx {
        const cplx shift = std::polar(1.0, -w * s.center);
        switch (s.kind) {
        case PulseKind::gaussian:
            return scale * shift * gauss_ft(s.sigma_t, w);
        case PulseKind::double_gaussian: {
            const cplx second = s.amplitude_ratio * std::polar(1.0, s.relative_phase);
            const cplx comb = std::polar(1.0, w * 0.5 * s.separation) +
                              second * std::polar(1.0, -w * 0.5 * s.separation);
            return scale * shift * gauss_ft(s.sigma_t, w) * comb;
        }
        case PulseKind::modulated_gaussian: {
            const double wm = 2.0 * pi * s.mod_freq;
            const cplx central = (1.0 - 0.5 * s.mod_depth) * gauss_ft(s.sigma_t, w);
            const cplx side = 0.25 * s.mod_depth *
                              (gauss_ft(s.sigma_t, w - wm) + gauss_ft(s.sigma_t, w + wm));
            return scale * shift * (central + side);
        }
        }
        return {};
    };
}

} // namespace gemeit
