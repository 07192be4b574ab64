#include "gemeit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gemeit/fft.hpp"

namespace gemeit {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;

// ascending-frequency reordering of FFT bins: output j <- bin (j + split) % n
std::vector<std::size_t> fftshift_order(std::size_t n) {
    const std::size_t split = (n + 1) / 2;
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < n; ++j) order[j] = (j + split) % n;
    return order;
}
} // namespace

std::vector<double> SpinwaveMap::cross_section(double t) const {
    if (times.empty()) return {};
    std::size_t best = 0;
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
    std::vector<double> slice(axis.size());
    for (std::size_t ia = 0; ia < axis.size(); ++ia) slice[ia] = at(ia, best);
    return slice;
}

SpinwaveMap spinwave_position_map(const FieldState& state, const SimGrid& grid) {
    SpinwaveMap map;
    map.domain = MapDomain::position;
    map.axis = grid.z_axis();
    map.times = grid.t_axis();
    map.intensity.resize(grid.nz * grid.n_samples);
    for (std::size_t s = 0; s < grid.n_samples; ++s)
        for (std::size_t n = 0; n < grid.nz; ++n)
            map.intensity[n * grid.n_samples + s] = std::norm(state.sigma_gs[state.idx(s, n)]);
    return map;
}

SpinwaveMap spinwave_momentum_map(const FieldState& state, const SimGrid& grid,
                                  bool hann_window) {
    const std::size_t nz = grid.nz;
    SpinwaveMap map;
    map.domain = MapDomain::momentum;
    map.times = grid.t_axis();

    const auto order = fftshift_order(nz);
    const auto freqs = fft_freqs(nz, grid.dz());
    map.axis.resize(nz);
    for (std::size_t j = 0; j < nz; ++j) map.axis[j] = two_pi * freqs[order[j]];

    std::vector<double> window(nz, 1.0);
    if (hann_window)
        for (std::size_t n = 0; n < nz; ++n)
            window[n] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(n) /
                                              static_cast<double>(nz - 1)));

    map.intensity.resize(nz * grid.n_samples);
    std::vector<cplx> slice(nz);
    for (std::size_t s = 0; s < grid.n_samples; ++s) {
        for (std::size_t n = 0; n < nz; ++n)
            slice[n] = window[n] * state.sigma_gs[state.idx(s, n)];
        fft_forward(slice);
        for (std::size_t j = 0; j < nz; ++j) {
            const cplx v = grid.dz() * slice[order[j]];
            map.intensity[j * grid.n_samples + s] = std::norm(v);
        }
    }
    return map;
}

std::pair<std::vector<double>, std::vector<cplx>>
momentum_spectrum_slice(const FieldState& state, const SimGrid& grid, double t) {
    const std::size_t nz = grid.nz;
    const std::size_t s = grid.sample_index(t);
    std::vector<cplx> slice(nz);
    for (std::size_t n = 0; n < nz; ++n) slice[n] = state.sigma_gs[state.idx(s, n)];
    fft_forward(slice);
    const auto order = fftshift_order(nz);
    const auto freqs = fft_freqs(nz, grid.dz());
    std::vector<double> axis(nz);
    std::vector<cplx> spec(nz);
    for (std::size_t j = 0; j < nz; ++j) {
        const double k = two_pi * freqs[order[j]];
        axis[j] = k;
        // include the absolute-position phase so S(k) = dz sum sigma e^{-i k z}
        spec[j] = grid.dz() * slice[order[j]] * std::polar(1.0, -k * grid.z_min);
    }
    return {std::move(axis), std::move(spec)};
}

double momentum_centroid(const FieldState& state, const SimGrid& grid, double t) {
    auto [axis, spec] = momentum_spectrum_slice(state, grid, t);
    double w = 0.0, wk = 0.0;
    for (std::size_t j = 0; j < axis.size(); ++j) {
        const double p = std::norm(spec[j]);
        w += p;
        wk += p * axis[j];
    }
    if (w <= 0.0) throw std::invalid_argument("momentum_centroid: empty spinwave");
    return wk / w;
}

ComplexEnvelope output_envelope(const FieldState& state, const SimGrid& grid, double t_from) {
    if (t_from < 0.0 || t_from > grid.t_max)
        throw std::invalid_argument("output_envelope: t_from outside [0, t_max]");
    std::size_t s0 = 0;
    while (s0 < grid.n_samples && grid.t_at(s0) < t_from - 1e-12) ++s0;
    if (s0 + 2 > grid.n_samples) s0 = grid.n_samples - 2;
    std::vector<cplx> samples(grid.n_samples - s0);
    for (std::size_t s = s0; s < grid.n_samples; ++s)
        samples[s - s0] = state.E[state.idx(s, grid.nz - 1)];
    return ComplexEnvelope{std::move(samples), grid.t_at(s0), grid.dt()};
}

double fourier_overlap_at(const ComplexEnvelope& output,
                          const std::function<cplx(double)>& reference_ft,
                          double scale, double time_offset) {
    double out_norm = 0.0, ref_norm = 0.0;
    cplx overlap{};
    for (std::size_t i = 0; i < output.size(); ++i) {
        const cplx o = output.samples[i];
        const cplx r = reference_ft(scale * (output.t_at(i) - time_offset));
        overlap += o * std::conj(r);
        out_norm += std::norm(o);
        ref_norm += std::norm(r);
    }
    if (out_norm <= 0.0) throw std::invalid_argument("fourier_overlap_at: zero-energy output");
    if (ref_norm <= 0.0) return 0.0;
    return std::norm(overlap) / (out_norm * ref_norm);
}

OverlapReport fourier_fidelity(const ComplexEnvelope& output,
                               const std::function<cplx(double)>& reference_ft,
                               double scale_hint) {
    if (!(scale_hint > 0.0)) throw std::invalid_argument("fourier_fidelity: scale hint must be positive");
    if (envelope_energy(output) <= 0.0)
        throw std::invalid_argument("fourier_fidelity: zero-energy output envelope");

    const double t_lo = output.t0;
    const double t_hi = output.t_end();

    double best = -1.0, best_s = scale_hint, best_t0 = 0.5 * (t_lo + t_hi);
    for (int sign = -1; sign <= 1; sign += 2) {
        for (int j = 0; j <= 48; ++j) {
            const double s = sign * scale_hint * std::pow(8.0, 2.0 * j / 48.0 - 1.0);
            for (int m = 0; m <= 96; ++m) {
                const double t0 = t_lo + (t_hi - t_lo) * m / 96.0;
                const double v = fourier_overlap_at(output, reference_ft, s, t0);
                if (v > best) { best = v; best_s = s; best_t0 = t0; }
            }
        }
    }

    // coordinate-wise golden refinement
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    auto golden = [&](auto eval, double lo, double hi) {
        double a = lo, b = hi;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        for (int it = 0; it < 60; ++it) {
            if (eval(c) > eval(d)) b = d;
            else a = c;
            c = b - gr * (b - a);
            d = a + gr * (b - a);
        }
        return 0.5 * (a + b);
    };
    for (int round = 0; round < 3; ++round) {
        const double s_lo = best_s * (best_s > 0 ? 0.8 : 1.25);
        const double s_hi = best_s * (best_s > 0 ? 1.25 : 0.8);
        best_s = golden([&](double s) { return fourier_overlap_at(output, reference_ft, s, best_t0); },
                        std::min(s_lo, s_hi), std::max(s_lo, s_hi));
        const double span = 0.08 * (t_hi - t_lo);
        best_t0 = golden([&](double t0) { return fourier_overlap_at(output, reference_ft, best_s, t0); },
                         best_t0 - span, best_t0 + span);
    }
    OverlapReport rep;
    rep.fidelity = std::clamp(fourier_overlap_at(output, reference_ft, best_s, best_t0), 0.0, 1.0);
    rep.scale = best_s;
    rep.time_offset = best_t0;
    rep.residual_l2 = std::sqrt(std::max(0.0, 1.0 - rep.fidelity));
    return rep;
}

OverlapReport fourier_fidelity(const ComplexEnvelope& input, const ComplexEnvelope& output,
                               double scale_hint) {
    if (envelope_energy(input) <= 0.0)
        throw std::invalid_argument("fourier_fidelity: zero-energy input envelope");
    // dense spectrum of the input by zero-padded FFT
    const std::size_t n_pad = std::max<std::size_t>(8 * input.size(), 4096);
    std::vector<cplx> padded(n_pad, cplx{});
    std::copy(input.samples.begin(), input.samples.end(), padded.begin());
    fft_forward(padded);
    const auto order = fftshift_order(n_pad);
    const auto freqs = fft_freqs(n_pad, input.dt);
    std::vector<double> w_axis(n_pad);
    std::vector<cplx> spec(n_pad);
    for (std::size_t j = 0; j < n_pad; ++j) {
        const double w = two_pi * freqs[order[j]];
        w_axis[j] = w;
        spec[j] = input.dt * padded[order[j]] * std::polar(1.0, -w * input.t0);
    }
    auto ref = [w_axis = std::move(w_axis), spec = std::move(spec)](double w) -> cplx {
        if (w <= w_axis.front() || w >= w_axis.back()) return {};
        const double x = (w - w_axis.front()) / (w_axis[1] - w_axis[0]);
        const auto i = static_cast<std::size_t>(x);
        const double f = x - static_cast<double>(i);
        return spec[i] * (1.0 - f) + spec[i + 1] * f;
    };
    return fourier_fidelity(output, ref, scale_hint);
}

namespace {
// |DFT of (p - mean)| and phase at frequency f, t measured absolutely.
cplx power_dft(const std::vector<double>& p, double mean, const ComplexEnvelope& env, double f) {
    cplx acc{};
    for (std::size_t n = 0; n < p.size(); ++n)
        acc += (p[n] - mean) * std::polar(1.0, -two_pi * f * env.t_at(n));
    return acc;
}
} // namespace

double fringe_phase_at(const ComplexEnvelope& env, double freq) {
    std::vector<double> p(env.size());
    double mean = 0.0;
    for (std::size_t n = 0; n < env.size(); ++n) {
        p[n] = std::norm(env.samples[n]);
        mean += p[n];
    }
    mean /= static_cast<double>(p.size());
    return std::arg(power_dft(p, mean, env, freq));
}

FringeResult fringe_analysis(const ComplexEnvelope& env) {
    FringeResult res;
    const std::size_t n = env.size();
    if (n < 8) return res;

    std::vector<double> p(n);
    double mean = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = std::norm(env.samples[i]);
        mean += p[i];
        peak = std::max(peak, p[i]);
    }
    mean /= static_cast<double>(n);
    if (peak <= 0.0) return res;

    // support length where the envelope carries power
    std::size_t lo = 0, hi = n - 1;
    while (lo < hi && p[lo] < 0.05 * peak) ++lo;
    while (hi > lo && p[hi] < 0.05 * peak) --hi;
    const double t_support = env.dt * static_cast<double>(hi - lo + 1);
    const double f_min = 1.5 / t_support;

    // zero-padded power spectrum; the raw power is used (no mean removal)
    // so a compactly supported envelope produces no window sidelobes
    const std::size_t n_pad = std::max<std::size_t>(8 * n, 4096);
    std::vector<cplx> buf(n_pad, cplx{});
    for (std::size_t i = 0; i < n; ++i) buf[i] = p[i];
    fft_forward(buf);
    const double df = 1.0 / (static_cast<double>(n_pad) * env.dt);
    const double dc_scale = std::abs(buf[0]);

    // strongest local maximum above f_min (positive frequencies)
    const std::size_t half = n_pad / 2;
    std::size_t best = 0;
    double best_mag = 0.0;
    for (std::size_t m = 2; m + 1 < half; ++m) {
        const double f = df * static_cast<double>(m);
        if (f < f_min) continue;
        const double mag = std::abs(buf[m]);
        if (mag > std::abs(buf[m - 1]) && mag >= std::abs(buf[m + 1]) && mag > best_mag) {
            best_mag = mag;
            best = m;
        }
    }
    if (best == 0 || best_mag < 0.005 * dc_scale) return res;

    // parabolic sub-bin refinement on the mean-removed spectrum (the raw
    // DC lobe would bias the vertex)
    const double fb = df * static_cast<double>(best);
    const double m1 = std::abs(power_dft(p, mean, env, fb - df));
    const double m2 = std::abs(power_dft(p, mean, env, fb));
    const double m3 = std::abs(power_dft(p, mean, env, fb + df));
    const double denom = m1 - 2.0 * m2 + m3;
    const double shift = denom != 0.0 ? 0.5 * (m1 - m3) / denom : 0.0;
    const double f_fr = fb + df * std::clamp(shift, -1.0, 1.0);

    res.found = true;
    res.freq = f_fr;
    res.phase = std::arg(power_dft(p, mean, env, f_fr));

    // visibility from the extrema around the envelope peak
    std::size_t ipk = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (p[i] > p[ipk]) ipk = i;
    auto local_min = [&](long from, int dir) -> double {
        long i = from;
        while (i + dir >= 0 && i + dir < static_cast<long>(n) &&
               p[static_cast<std::size_t>(i + dir)] <= p[static_cast<std::size_t>(i)])
            i += dir;
        return p[static_cast<std::size_t>(i)];
    };
    double pmin;
    if (ipk == 0) pmin = local_min(0, +1);
    else if (ipk + 1 == n) pmin = local_min(static_cast<long>(ipk), -1);
    else
        pmin = 0.5 * (local_min(static_cast<long>(ipk), -1) +
                      local_min(static_cast<long>(ipk), +1));
    res.visibility = (p[ipk] - pmin) / (p[ipk] + pmin);
    return res;
}

std::optional<double> pulse_pair_separation(const ComplexEnvelope& env, double rel_threshold) {
    const std::size_t n = env.size();
    if (n < 16) return std::nullopt;
    // lightly smoothed magnitude
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = std::abs(env.samples[i]);
    std::vector<double> sm(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        int cnt = 0;
        for (long j = static_cast<long>(i) - 2; j <= static_cast<long>(i) + 2; ++j)
            if (j >= 0 && j < static_cast<long>(n)) { acc += m[static_cast<std::size_t>(j)]; ++cnt; }
        sm[i] = acc / cnt;
    }
    const double peak = *std::max_element(sm.begin(), sm.end());
    if (peak <= 0.0) return std::nullopt;

    struct Peak { std::size_t idx; double val; };
    std::vector<Peak> peaks;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        if (sm[i] >= sm[i - 1] && sm[i] >= sm[i + 1] && sm[i] > sm[i - 2] && sm[i] > sm[i + 2] &&
            sm[i] >= rel_threshold * peak)
            peaks.push_back({i, sm[i]});
    }
    if (peaks.size() < 3) return std::nullopt;
    const auto center = std::max_element(peaks.begin(), peaks.end(),
                                         [](const Peak& a, const Peak& b) { return a.val < b.val; });
    auto dip_between = [&](std::size_t a, std::size_t b) {
        double lo = sm[a];
        for (std::size_t i = std::min(a, b); i <= std::max(a, b); ++i) lo = std::min(lo, sm[i]);
        return lo;
    };
    const Peak* left = nullptr;
    const Peak* right = nullptr;
    for (const auto& pk : peaks) {
        if (pk.idx < center->idx && dip_between(pk.idx, center->idx) < 0.8 * pk.val &&
            (!left || pk.val > left->val))
            left = &pk;
        if (pk.idx > center->idx && dip_between(center->idx, pk.idx) < 0.8 * pk.val &&
            (!right || pk.val > right->val))
            right = &pk;
    }
    if (!left || !right) return std::nullopt;
    return env.t_at(right->idx) - env.t_at(left->idx);
}

} // namespace gemeit
