#include "gemeit/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gemeit {

cplx ComplexEnvelope::eval(double t) const {
    if (samples.empty()) return {0.0, 0.0};
    const double x = (t - t0) / dt;
    if (x <= 0.0) return x == 0.0 ? samples.front() : cplx{0.0, 0.0};
    const auto n = samples.size();
    if (x >= static_cast<double>(n - 1))
        return x == static_cast<double>(n - 1) ? samples.back() : cplx{0.0, 0.0};
    const auto i = static_cast<std::size_t>(x);
    const double f = x - static_cast<double>(i);
    return samples[i] * (1.0 - f) + samples[i + 1] * f;
}

ComplexEnvelope make_envelope(std::vector<cplx> samples, double t0, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("make_envelope: dt must be positive");
    if (samples.size() < 2) throw std::invalid_argument("make_envelope: need at least 2 samples");
    return ComplexEnvelope{std::move(samples), t0, dt};
}

double envelope_energy(const ComplexEnvelope& env) {
    if (env.samples.size() < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < env.samples.size(); ++i)
        acc += 0.5 * (std::norm(env.samples[i]) + std::norm(env.samples[i + 1]));
    return acc * env.dt;
}

double envelope_peak(const ComplexEnvelope& env) {
    double pk = 0.0;
    for (const auto& s : env.samples) pk = std::max(pk, std::abs(s));
    return pk;
}

double envelope_centroid(const ComplexEnvelope& env) {
    double w = 0.0, wt = 0.0;
    for (std::size_t i = 0; i < env.samples.size(); ++i) {
        const double p = std::norm(env.samples[i]);
        w += p;
        wt += p * env.t_at(i);
    }
    if (w <= 0.0) throw std::invalid_argument("envelope_centroid: zero-energy envelope");
    return wt / w;
}

double relative_l2_error(const ComplexEnvelope& a, const ComplexEnvelope& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < b.samples.size(); ++i) {
        const cplx d = a.eval(b.t_at(i)) - b.samples[i];
        num += std::norm(d);
        den += std::norm(b.samples[i]);
    }
    if (den == 0.0) throw std::invalid_argument("relative_l2_error: zero reference envelope");
    return std::sqrt(num / den);
}

double magnitude_xcorr_peak(const ComplexEnvelope& a, const ComplexEnvelope& b) {
    // Sample both magnitudes on b's spacing over each envelope's own span.
    const double dt = b.dt;
    const auto na = static_cast<std::size_t>((a.t_end() - a.t0) / dt) + 1;
    std::vector<double> ma(na), mb(b.samples.size());
    for (std::size_t i = 0; i < na; ++i) ma[i] = std::abs(a.eval(a.t0 + dt * static_cast<double>(i)));
    for (std::size_t i = 0; i < mb.size(); ++i) mb[i] = std::abs(b.samples[i]);

    double na2 = 0.0, nb2 = 0.0;
    for (double v : ma) na2 += v * v;
    for (double v : mb) nb2 += v * v;
    if (na2 == 0.0 || nb2 == 0.0) return 0.0;

    double best = 0.0;
    const long la = static_cast<long>(ma.size()), lb = static_cast<long>(mb.size());
    for (long lag = -(lb - 1); lag < la; ++lag) {
        double acc = 0.0;
        const long i0 = std::max(0L, lag);
        const long i1 = std::min(la, lag + lb);
        for (long i = i0; i < i1; ++i) acc += ma[static_cast<std::size_t>(i)] * mb[static_cast<std::size_t>(i - lag)];
        best = std::max(best, acc);
    }
    return best / std::sqrt(na2 * nb2);
}

ComplexEnvelope envelope_tail(const ComplexEnvelope& env, double t_from) {
    std::size_t i0 = 0;
    while (i0 < env.samples.size() && env.t_at(i0) < t_from) ++i0;
    if (i0 + 2 > env.samples.size()) throw std::invalid_argument("envelope_tail: t_from leaves fewer than 2 samples");
    std::vector<cplx> s(env.samples.begin() + static_cast<long>(i0), env.samples.end());
    return ComplexEnvelope{std::move(s), env.t_at(i0), env.dt};
}

} // namespace gemeit
