#include "gemeit/dsp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "gemeit/fft.hpp"

namespace gemeit {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;
} // namespace

HeterodyneTrace synthesize_trace(const ComplexEnvelope& envelope, double lo_detuning,
                                 double sample_rate, double noise_rms,
                                 std::uint64_t seed, int shot_id) {
    if (!(sample_rate > 0.0)) throw std::invalid_argument("synthesize_trace: sample_rate must be positive");
    const double f_b = std::abs(lo_detuning); // MHz == cycles/us
    const double nyquist = 0.5 * sample_rate * 1000.0;
    if (f_b >= nyquist)
        throw std::invalid_argument("synthesize_trace: beat frequency exceeds the Nyquist rate");
    HeterodyneTrace tr;
    tr.sample_rate = sample_rate;
    tr.carrier_freq = f_b;
    tr.t0 = envelope.t0;
    tr.shot_id = shot_id;
    const double dt = tr.dt();
    const auto n = static_cast<std::size_t>((envelope.t_end() - envelope.t0) / dt) + 1;
    tr.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = tr.t_at(i);
        const cplx e = envelope.eval(t);
        tr.samples[i] = 2.0 * std::abs(e) * std::cos(two_pi * f_b * t + std::arg(e));
    }
    if (noise_rms > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, noise_rms);
        for (auto& s : tr.samples) s += gauss(rng);
    }
    return tr;
}

// ---------------------------------------------------------------------------
// Butterworth design (bilinear transform, cascaded biquads)

Butterworth Butterworth::bandpass(double center, double half_width, int order,
                                  double sample_rate) {
    if (order < 2 || order % 2 != 0)
        throw std::invalid_argument("Butterworth::bandpass: order must be even and >= 2");
    const double fs = sample_rate * 1000.0; // MHz
    const double f_lo = center - half_width;
    const double f_hi = center + half_width;
    if (!(f_lo > 0.0) || !(f_hi < 0.5 * fs))
        throw std::invalid_argument("Butterworth::bandpass: band must lie inside (0, Nyquist)");

    const double w_lo = 2.0 * fs * std::tan(pi * f_lo / fs);
    const double w_hi = 2.0 * fs * std::tan(pi * f_hi / fs);
    const double bw = w_hi - w_lo;
    const double w0_sq = w_lo * w_hi;

    // analog prototype poles on the unit left half circle
    std::vector<cplx> analog;
    for (int k = 1; k <= order; ++k) {
        const double phi = pi * (2.0 * k + order - 1.0) / (2.0 * order);
        const cplx proto(std::cos(phi), std::sin(phi));
        const cplx half_term = 0.5 * bw * proto;
        const cplx root = std::sqrt(half_term * half_term - w0_sq);
        analog.push_back(half_term + root);
        analog.push_back(half_term - root);
    }

    Butterworth filt;
    filt.sample_rate_ = sample_rate;
    std::vector<cplx> digital;
    for (const cplx& s : analog) {
        const cplx zp = (2.0 * fs + s) / (2.0 * fs - s);
        if (std::abs(zp) >= 1.0)
            throw std::runtime_error("Butterworth::bandpass: unstable design (pole outside the unit circle)");
        digital.push_back(zp);
    }

    // pair conjugates into biquads with zeros at z = +1 and z = -1
    std::vector<cplx> upper;
    std::vector<double> reals;
    for (const cplx& zp : digital) {
        if (std::abs(zp.imag()) < 1e-12) reals.push_back(zp.real());
        else if (zp.imag() > 0.0) upper.push_back(zp);
    }
    for (const cplx& zp : upper)
        filt.sections_.push_back({1.0, 0.0, -1.0, -2.0 * zp.real(), std::norm(zp)});
    for (std::size_t i = 0; i + 1 < reals.size(); i += 2)
        filt.sections_.push_back({1.0, 0.0, -1.0, -(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]});

    filt.gain_ = 1.0;
    const double mag = std::abs(filt.response(center));
    if (!(mag > 0.0)) throw std::runtime_error("Butterworth::bandpass: degenerate design");
    filt.gain_ = 1.0 / mag;
    return filt;
}

Butterworth Butterworth::lowpass(double cutoff, int order, double sample_rate) {
    if (order < 2 || order % 2 != 0)
        throw std::invalid_argument("Butterworth::lowpass: order must be even and >= 2");
    const double fs = sample_rate * 1000.0;
    if (!(cutoff > 0.0) || !(cutoff < 0.5 * fs))
        throw std::invalid_argument("Butterworth::lowpass: cutoff must lie inside (0, Nyquist)");
    const double wc = 2.0 * fs * std::tan(pi * cutoff / fs);

    Butterworth filt;
    filt.sample_rate_ = sample_rate;
    for (int k = 1; k <= order / 2; ++k) {
        const double phi = pi * (2.0 * k + order - 1.0) / (2.0 * order);
        const cplx s = wc * cplx(std::cos(phi), std::sin(phi));
        const cplx zp = (2.0 * fs + s) / (2.0 * fs - s);
        if (std::abs(zp) >= 1.0)
            throw std::runtime_error("Butterworth::lowpass: unstable design (pole outside the unit circle)");
        // zeros at z = -1: numerator (z + 1)^2
        filt.sections_.push_back({1.0, 2.0, 1.0, -2.0 * zp.real(), std::norm(zp)});
    }
    filt.gain_ = 1.0;
    filt.gain_ = 1.0 / std::abs(filt.response(0.0));
    return filt;
}

cplx Butterworth::response(double f) const {
    const double theta = two_pi * f / (sample_rate_ * 1000.0);
    const cplx z = std::polar(1.0, theta);
    const cplx zi = 1.0 / z;
    cplx h = gain_;
    for (const auto& s : sections_)
        h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
    return h;
}

std::vector<double> Butterworth::apply_single_pass(const std::vector<double>& x) const {
    std::vector<double> y = x;
    for (const auto& s : sections_) {
        double s1 = 0.0, s2 = 0.0;
        for (auto& v : y) {
            const double in = v;
            const double out = s.b0 * in + s1;
            s1 = s.b1 * in - s.a1 * out + s2;
            s2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
    for (auto& v : y) v *= gain_;
    return y;
}

std::vector<double> Butterworth::apply_zero_phase(const std::vector<double>& x) const {
    if (x.size() < 4) return apply_single_pass(x);
    const std::size_t pad = std::min(x.size() - 1, static_cast<std::size_t>(512));
    std::vector<double> ext;
    ext.reserve(x.size() + 2 * pad);
    for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * x.front() - x[pad - i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * x.back() - x[x.size() - 2 - i]);

    std::vector<double> fwd = apply_single_pass(ext);
    std::reverse(fwd.begin(), fwd.end());
    std::vector<double> bwd = apply_single_pass(fwd);
    std::reverse(bwd.begin(), bwd.end());
    return {bwd.begin() + static_cast<long>(pad), bwd.begin() + static_cast<long>(pad + x.size())};
}

HeterodyneTrace bandpass(const HeterodyneTrace& trace, double center, double half_width,
                         int order) {
    const Butterworth filt = Butterworth::bandpass(center, half_width, order, trace.sample_rate);
    HeterodyneTrace out = trace;
    out.samples = filt.apply_zero_phase(trace.samples);
    return out;
}

ComplexEnvelope demodulate(const HeterodyneTrace& trace, double f_c, double lp_cutoff,
                           double analysis_rate, int lp_order) {
    if (!(f_c > 0.0)) throw std::invalid_argument("demodulate: carrier must be positive");
    if (lp_cutoff >= f_c)
        throw std::invalid_argument("demodulate: lowpass cutoff must stay below the carrier (image leakage)");
    const Butterworth lp = Butterworth::lowpass(lp_cutoff, lp_order, trace.sample_rate);

    const std::size_t n = trace.samples.size();
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = trace.t_at(i);
        const double c = std::cos(two_pi * f_c * t);
        const double s = std::sin(two_pi * f_c * t);
        re[i] = trace.samples[i] * c;
        im[i] = -trace.samples[i] * s;
    }
    re = lp.apply_zero_phase(re);
    im = lp.apply_zero_phase(im);

    const double trace_rate = trace.sample_rate * 1000.0; // samples per us
    std::size_t step = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(trace_rate / analysis_rate)));
    std::vector<cplx> out;
    out.reserve(n / step + 1);
    for (std::size_t i = 0; i < n; i += step) out.emplace_back(re[i], im[i]);
    if (out.size() < 2) throw std::invalid_argument("demodulate: trace too short for the analysis rate");
    return ComplexEnvelope{std::move(out), trace.t0, trace.dt() * static_cast<double>(step)};
}

PhaseAlignment phase_reference(const std::vector<ComplexEnvelope>& shots) {
    if (shots.empty()) throw std::invalid_argument("phase_reference: need at least one shot");
    PhaseAlignment al;
    al.shots = shots;
    al.applied_phase.assign(shots.size(), 0.0);
    al.aligned.assign(shots.size(), true);
    const ComplexEnvelope& ref = shots.front();
    const double ref_norm = std::sqrt(envelope_energy(ref));
    for (std::size_t j = 1; j < shots.size(); ++j) {
        cplx overlap{};
        for (std::size_t i = 0; i < shots[j].size(); ++i)
            overlap += shots[j].samples[i] * std::conj(ref.eval(shots[j].t_at(i)));
        const double mag = std::abs(overlap);
        const double scale = ref_norm * std::sqrt(envelope_energy(shots[j])) / shots[j].dt;
        if (mag <= 1e-12 * std::max(1.0, scale)) {
            al.aligned[j] = false; // zero overlap, left untouched
            continue;
        }
        const double theta = std::arg(overlap);
        al.applied_phase[j] = theta;
        const cplx rot = std::polar(1.0, -theta);
        for (auto& v : al.shots[j].samples) v *= rot;
    }
    return al;
}

ComplexEnvelope average_shots(const std::vector<ComplexEnvelope>& shots) {
    if (shots.empty()) throw std::invalid_argument("average_shots: no shots");
    ComplexEnvelope avg = shots.front();
    for (std::size_t j = 1; j < shots.size(); ++j)
        for (std::size_t i = 0; i < avg.size(); ++i)
            avg.samples[i] += shots[j].eval(avg.t_at(i));
    const double inv = 1.0 / static_cast<double>(shots.size());
    for (auto& v : avg.samples) v *= inv;
    return avg;
}

// ---------------------------------------------------------------------------
// Chirped-Gaussian least squares (Levenberg-Marquardt, analytic Jacobian)

namespace {
struct Model {
    double a, t0, sigma, f, chirp, phi;

    cplx eval(double t) const {
        const double x = t - t0;
        const double envl = a * std::exp(-x * x / (2.0 * sigma * sigma));
        const double psi = two_pi * f * x + pi * chirp * x * x + phi;
        return std::polar(envl, psi);
    }
};

double cost_of(const Model& m, const ComplexEnvelope& env) {
    double c = 0.0;
    for (std::size_t i = 0; i < env.size(); ++i)
        c += std::norm(env.samples[i] - m.eval(env.t_at(i)));
    return c;
}

bool solve6(std::array<std::array<double, 6>, 6>& A, std::array<double, 6>& b) {
    for (int col = 0; col < 6; ++col) {
        int piv = col;
        for (int r = col + 1; r < 6; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-300) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < 6; ++r) {
            const double f = A[r][col] / A[col][col];
            for (int c2 = col; c2 < 6; ++c2) A[r][c2] -= f * A[col][c2];
            b[r] -= f * b[col];
        }
    }
    for (int col = 5; col >= 0; --col) {
        for (int r = 0; r < col; ++r) {
            const double f = A[r][col] / A[col][col];
            A[r][col] = 0.0;
            b[r] -= f * b[col];
        }
        b[col] /= A[col][col];
    }
    return true;
}
} // namespace

ChirpedGaussianFit fit_chirped_gaussian(const ComplexEnvelope& env,
                                        const ChirpedGaussianInit& init) {
    const std::size_t n = env.size();
    if (n < 16) throw std::invalid_argument("fit_chirped_gaussian: envelope too short");

    // initial guesses: peak position and height, FWHM width, FFT frequency
    std::size_t ipk = 0;
    double pk = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::abs(env.samples[i]);
        if (m > pk) { pk = m; ipk = i; }
    }
    if (pk <= 0.0) throw std::invalid_argument("fit_chirped_gaussian: zero envelope");

    double sigma0;
    if (init.sigma) {
        sigma0 = *init.sigma;
    } else {
        std::size_t l = ipk, r = ipk;
        while (l > 0 && std::abs(env.samples[l]) > 0.5 * pk) --l;
        while (r + 1 < n && std::abs(env.samples[r]) > 0.5 * pk) ++r;
        sigma0 = std::max(env.dt * static_cast<double>(r - l) / 2.355, env.dt);
    }

    double f0 = 0.0;
    if (init.freq) {
        f0 = *init.freq;
    } else {
        std::vector<cplx> spec(env.samples);
        fft_forward(spec);
        const auto freqs = fft_freqs(spec.size(), env.dt);
        std::size_t bi = 0;
        for (std::size_t i = 1; i < spec.size(); ++i)
            if (std::abs(spec[i]) > std::abs(spec[bi])) bi = i;
        f0 = freqs[bi];
    }

    Model m{pk, init.t0.value_or(env.t_at(ipk)), sigma0, f0, init.chirp.value_or(0.0),
            std::arg(env.samples[ipk])};

    double lambda = 1e-3;
    double cost = cost_of(m, env);
    bool converged = false;
    for (int iter = 0; iter < 300; ++iter) {
        // accumulate normal equations from the analytic Jacobian
        std::array<std::array<double, 6>, 6> jtj{};
        std::array<double, 6> jtr{};
        for (std::size_t i = 0; i < n; ++i) {
            const double t = env.t_at(i);
            const double x = t - m.t0;
            const cplx mi = m.eval(t);
            const cplx res = env.samples[i] - mi;
            const cplx iu(0.0, 1.0);
            const std::array<cplx, 6> grad = {
                mi / m.a,                                                 // dA
                mi * (x / (m.sigma * m.sigma) - iu * (two_pi * m.f + two_pi * m.chirp * x)), // dt0
                mi * (x * x / (m.sigma * m.sigma * m.sigma)),             // dsigma
                mi * iu * two_pi * x,                                     // df
                mi * iu * pi * x * x,                                     // dchirp
                mi * iu,                                                  // dphi
            };
            for (int r = 0; r < 6; ++r) {
                jtr[r] += grad[r].real() * res.real() + grad[r].imag() * res.imag();
                for (int c = r; c < 6; ++c)
                    jtj[r][c] += grad[r].real() * grad[c].real() + grad[r].imag() * grad[c].imag();
            }
        }
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < r; ++c) jtj[r][c] = jtj[c][r];

        auto a_try = jtj;
        for (int d = 0; d < 6; ++d) a_try[d][d] *= 1.0 + lambda;
        auto rhs = jtr;
        if (!solve6(a_try, rhs)) { lambda *= 10.0; continue; }

        Model trial = m;
        trial.a += rhs[0];
        trial.t0 += rhs[1];
        trial.sigma += rhs[2];
        trial.f += rhs[3];
        trial.chirp += rhs[4];
        trial.phi += rhs[5];
        if (!(trial.sigma > 0.0) || !(trial.a > 0.0)) { lambda *= 10.0; continue; }

        const double trial_cost = cost_of(trial, env);
        if (trial_cost < cost) {
            const double rel = (cost - trial_cost) / std::max(cost, 1e-300);
            m = trial;
            cost = trial_cost;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel < 1e-13) { converged = true; break; }
        } else {
            lambda *= 10.0;
            if (lambda > 1e10) { // no usable step left: stationary point
                converged = true;
                break;
            }
        }
    }
    if (!(m.sigma > 0.0)) throw std::runtime_error("fit_chirped_gaussian: degenerate width");

    ChirpedGaussianFit fit;
    fit.amplitude = m.a;
    fit.t0 = m.t0;
    fit.sigma = m.sigma;
    fit.freq = m.f;
    fit.phase = std::remainder(m.phi, two_pi);
    fit.chirp = m.chirp;
    fit.residual_rms = std::sqrt(cost / static_cast<double>(n));
    fit.converged = converged || cost < 1e-20;
    if (!fit.converged) throw std::runtime_error("fit_chirped_gaussian: no convergence after max iterations");
    return fit;
}

FringeReport fringe_report(const ChirpedGaussianFit& fit1, const ChirpedGaussianFit& fit2) {
    FringeReport rep;
    rep.sigma_res = std::sqrt(0.5 * (fit1.sigma * fit1.sigma + fit2.sigma * fit2.sigma));
    rep.hwhm = 2.335 * rep.sigma_res / 2.0;
    rep.delta_plus = rep.hwhm * fit1.chirp;
    rep.delta_minus = rep.hwhm * fit2.chirp;
    rep.delta_f = rep.delta_plus - rep.delta_minus;
    rep.modulation_freq = std::abs(fit2.freq - fit1.freq);
    return rep;
}

// ---------------------------------------------------------------------------
// Trace I/O

void write_trace_csv(const std::string& path, const HeterodyneTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
    out << "time_us,voltage\n";
    char buf[80];
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", trace.t_at(i), trace.samples[i]);
        out << buf;
    }
}

HeterodyneTrace read_trace_csv(const std::string& path, double carrier_freq) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_trace_csv: cannot open " + path);
    std::string line;
    std::getline(in, line); // header
    HeterodyneTrace tr;
    tr.carrier_freq = carrier_freq;
    std::vector<double> times;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double t, v;
        if (std::sscanf(line.c_str(), "%lg,%lg", &t, &v) != 2)
            throw std::runtime_error("read_trace_csv: malformed row in " + path);
        times.push_back(t);
        tr.samples.push_back(v);
    }
    if (times.size() < 2) throw std::runtime_error("read_trace_csv: too few samples in " + path);
    tr.t0 = times.front();
    tr.sample_rate = 1.0e-3 / (times[1] - times[0]);
    return tr;
}

namespace {
constexpr char k_magic[4] = {'H', 'T', 'R', 'C'};
constexpr std::uint32_t k_version = 1;
} // namespace

void write_trace_binary(const std::string& path, const HeterodyneTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_trace_binary: cannot open " + path);
    out.write(k_magic, 4);
    out.write(reinterpret_cast<const char*>(&k_version), sizeof k_version);
    out.write(reinterpret_cast<const char*>(&trace.sample_rate), sizeof(double));
    const std::uint64_t len = trace.samples.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(reinterpret_cast<const char*>(trace.samples.data()),
              static_cast<std::streamsize>(len * sizeof(double)));
}

HeterodyneTrace read_trace_binary(const std::string& path, double carrier_freq) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_trace_binary: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, k_magic, 4) != 0)
        throw std::runtime_error("read_trace_binary: bad magic in " + path);
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    if (version != k_version) throw std::runtime_error("read_trace_binary: unsupported version");
    HeterodyneTrace tr;
    tr.carrier_freq = carrier_freq;
    in.read(reinterpret_cast<char*>(&tr.sample_rate), sizeof(double));
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    tr.samples.resize(len);
    in.read(reinterpret_cast<char*>(tr.samples.data()),
            static_cast<std::streamsize>(len * sizeof(double)));
    if (!in) throw std::runtime_error("read_trace_binary: truncated file " + path);
    return tr;
}

} // namespace gemeit
