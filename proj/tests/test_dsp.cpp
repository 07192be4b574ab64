#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "gemeit/dsp.hpp"
#include "gemeit/pulses.hpp"

using namespace gemeit;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

ComplexEnvelope gaussian_envelope(double center, double sigma, double span, double dt,
                                  double freq_offset = 0.0, double chirp = 0.0) {
    const auto n = static_cast<std::size_t>(span / dt) + 1;
    std::vector<cplx> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = center - 0.5 * span + dt * static_cast<double>(i);
        const double x = t - center;
        const double mag = std::exp(-x * x / (2.0 * sigma * sigma));
        s[i] = std::polar(mag, two_pi * freq_offset * x + pi * chirp * x * x);
    }
    return make_envelope(std::move(s), center - 0.5 * span, dt);
}

ComplexEnvelope double_pulse_envelope() {
    PulseSpec spec;
    spec.kind = PulseKind::double_gaussian;
    spec.center = 10.0;
    spec.sigma_t = 0.8;
    spec.separation = 4.0;
    return synthesize(spec, 0.004, 18.0);
}
} // namespace

TEST_CASE("synthesize_trace: zero envelope and pure carrier") {
    const auto zero = make_envelope(std::vector<cplx>(100, cplx{}), 0.0, 0.01);
    const auto tr0 = synthesize_trace(zero, 50.0, 1.0, 0.0);
    for (double v : tr0.samples) CHECK(v == 0.0);

    // constant unit envelope: 2 cos(2 pi 50 t)
    const auto flat = make_envelope(std::vector<cplx>(1001, cplx{1.0, 0.0}), 0.0, 0.001);
    const auto tr = synthesize_trace(flat, 50.0, 1.0, 0.0);
    CHECK(tr.samples[0] == doctest::Approx(2.0));
    double peak = 0.0, trough = 0.0;
    for (double v : tr.samples) {
        peak = std::max(peak, v);
        trough = std::min(trough, v);
    }
    CHECK(peak == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(trough == doctest::Approx(-2.0).epsilon(1e-6));
    // 50 MHz = 50 cycles/us: 20 samples per period at 1 GS/s
    CHECK(tr.samples[20] == doctest::Approx(tr.samples[0]).epsilon(1e-9));
}

TEST_CASE("synthesize_trace rejects beat frequencies beyond Nyquist") {
    const auto flat = make_envelope(std::vector<cplx>(100, cplx{1.0, 0.0}), 0.0, 0.01);
    CHECK_THROWS_AS(synthesize_trace(flat, 600.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("bandpass keeps the band and rejects out-of-band tones") {
    const auto filt = Butterworth::bandpass(50.0, 15.0, 4, 1.0);
    // in-band response is ~1 and the band edges sit at -3 dB (single pass)
    CHECK(std::abs(filt.response(50.0)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(filt.response(35.0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.05));
    CHECK(std::abs(filt.response(65.0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.05));
    // 120 MHz tone attenuated by > 40 dB at order >= 4
    CHECK(20.0 * std::log10(std::abs(filt.response(120.0))) < -40.0);
    CHECK(20.0 * std::log10(std::abs(filt.response(0.001))) < -40.0);

    // time-domain: in-band sinusoid amplitude preserved within 1%
    HeterodyneTrace tone;
    tone.sample_rate = 1.0;
    tone.carrier_freq = 50.0;
    tone.samples.resize(40000);
    for (std::size_t i = 0; i < tone.samples.size(); ++i)
        tone.samples[i] = std::cos(two_pi * 50.0 * tone.t_at(i));
    const auto filtered = bandpass(tone, 50.0, 15.0, 4);
    double rms_in = 0.0, rms_out = 0.0;
    for (std::size_t i = 10000; i < 30000; ++i) {
        rms_in += tone.samples[i] * tone.samples[i];
        rms_out += filtered.samples[i] * filtered.samples[i];
    }
    CHECK(std::sqrt(rms_out / rms_in) == doctest::Approx(1.0).epsilon(0.01));

    // DC offset suppressed
    HeterodyneTrace dc;
    dc.sample_rate = 1.0;
    dc.samples.assign(20000, 0.7);
    const auto no_dc = bandpass(dc, 50.0, 15.0, 4);
    double mean = 0.0;
    for (std::size_t i = 5000; i < 15000; ++i) mean += no_dc.samples[i];
    mean /= 10000.0;
    CHECK(std::abs(mean) < 0.7e-3);
}

TEST_CASE("two-tone separation through the bandpass") {
    HeterodyneTrace two;
    two.sample_rate = 1.0;
    two.samples.resize(60000);
    for (std::size_t i = 0; i < two.samples.size(); ++i)
        two.samples[i] = std::cos(two_pi * 50.0 * two.t_at(i)) + std::cos(two_pi * 120.0 * two.t_at(i));
    const auto out = bandpass(two, 50.0, 15.0, 4);
    // demodulate at 120 MHz to measure the residual there (zero-phase pass
    // doubles the single-pass rejection)
    const auto res120 = demodulate(out, 120.0, 10.0, 125.0);
    const auto res50 = demodulate(out, 50.0, 10.0, 125.0);
    double a120 = 0.0, a50 = 0.0;
    for (std::size_t i = res120.size() / 4; i < 3 * res120.size() / 4; ++i) {
        a120 = std::max(a120, std::abs(res120.samples[i]));
        a50 = std::max(a50, std::abs(res50.samples[i]));
    }
    CHECK(20.0 * std::log10(a120 / a50) < -40.0);
}

TEST_CASE("bandpass rejects bands outside (0, Nyquist) and odd orders") {
    CHECK_THROWS_AS(Butterworth::bandpass(10.0, 15.0, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Butterworth::bandpass(490.0, 15.0, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Butterworth::bandpass(50.0, 15.0, 3, 1.0), std::invalid_argument);
}

TEST_CASE("demodulation conventions") {
    // pure cosine at f_c of amplitude 2 -> unit magnitude I + iQ
    HeterodyneTrace tone;
    tone.sample_rate = 1.0;
    tone.samples.resize(30000);
    for (std::size_t i = 0; i < tone.samples.size(); ++i)
        tone.samples[i] = 2.0 * std::cos(two_pi * 50.0 * tone.t_at(i));
    const auto env = demodulate(tone, 50.0, 15.0, 62.5);
    for (std::size_t i = env.size() / 4; i < 3 * env.size() / 4; ++i)
        CHECK(std::abs(env.samples[i]) == doctest::Approx(1.0).epsilon(0.01));

    // a tone offset by +1 MHz rotates at +1 cycle/us
    HeterodyneTrace off;
    off.sample_rate = 1.0;
    off.samples.resize(30000);
    for (std::size_t i = 0; i < off.samples.size(); ++i)
        off.samples[i] = 2.0 * std::cos(two_pi * 51.0 * off.t_at(i));
    const auto rot = demodulate(off, 50.0, 15.0, 62.5);
    const std::size_t i0 = rot.size() / 3;
    const double dphi = std::arg(rot.samples[i0 + 1] / rot.samples[i0]);
    CHECK(dphi / (two_pi * rot.dt) == doctest::Approx(1.0).epsilon(0.01));

    CHECK_THROWS_AS(demodulate(tone, 50.0, 50.0, 62.5), std::invalid_argument);
}

TEST_CASE("beat-note frequency offsets survive the round trip to < 1 kHz") {
    // gaussian envelope with a 0.3 MHz phase ramp: beat at 50.3 MHz
    const auto env = gaussian_envelope(6.0, 1.2, 12.0, 0.004, 0.3);
    const auto tr = synthesize_trace(env, 50.0, 1.0, 0.0);
    const auto filtered = bandpass(tr, 50.0, 15.0, 4);
    const auto dem = demodulate(filtered, 50.0, 15.0, 125.0);
    const auto fit = fit_chirped_gaussian(dem);
    CHECK(fit.freq == doctest::Approx(0.3).epsilon(0.003)); // < 1 kHz absolute
    CHECK(std::abs(fit.freq - 0.3) < 1e-3);
}

TEST_CASE("full round trip: synthesize -> bandpass -> demodulate -> align -> average") {
    const auto env = double_pulse_envelope();

    SUBCASE("noiseless single shot: < 3% relative L2") {
        const auto tr = synthesize_trace(env, 50.0, 1.0, 0.0);
        const auto filtered = bandpass(tr, 50.0, 15.0, 4);
        const auto dem = demodulate(filtered, 50.0, 15.0, 62.5);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < dem.size(); ++i) {
            const cplx ref = env.eval(dem.t_at(i));
            num += std::norm(dem.samples[i] - ref);
            den += std::norm(ref);
        }
        CHECK(std::sqrt(num / den) < 0.03);
    }

    SUBCASE("30 shots at SNR 10 with random phases: < 10% after alignment") {
        // SNR defined against the trace peak amplitude (2 x envelope peak)
        const double noise_rms = 2.0 / 10.0;
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uniform(0.0, two_pi);
        std::vector<ComplexEnvelope> shots;
        for (int j = 0; j < 30; ++j) {
            ComplexEnvelope jittered = env;
            const cplx rot = std::polar(1.0, j == 0 ? 0.0 : uniform(rng));
            for (auto& v : jittered.samples) v *= rot;
            const auto tr = synthesize_trace(jittered, 50.0, 1.0, noise_rms, 100 + j, j);
            const auto filtered = bandpass(tr, 50.0, 15.0, 4);
            shots.push_back(demodulate(filtered, 50.0, 15.0, 62.5));
        }
        const auto aligned = phase_reference(shots);
        for (bool ok : aligned.aligned) CHECK(ok);
        const auto avg = average_shots(aligned.shots);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < avg.size(); ++i) {
            const cplx ref = env.eval(avg.t_at(i));
            num += std::norm(avg.samples[i] - ref);
            den += std::norm(ref);
        }
        CHECK(std::sqrt(num / den) < 0.10);
    }
}

TEST_CASE("phase referencing examples") {
    const auto env = gaussian_envelope(3.0, 0.6, 6.0, 0.01);
    // identical shots: all thetas zero
    const auto same = phase_reference({env, env, env});
    for (double th : same.applied_phase) CHECK(std::abs(th) < 1e-12);

    // shot2 = e^{i pi/3} shot1: aligned exactly
    ComplexEnvelope rotated = env;
    for (auto& v : rotated.samples) v *= std::polar(1.0, pi / 3.0);
    const auto two = phase_reference({env, rotated});
    CHECK(two.applied_phase[1] == doctest::Approx(pi / 3.0).epsilon(1e-9));
    for (std::size_t i = 0; i < env.size(); ++i)
        CHECK(std::abs(two.shots[1].samples[i] - env.samples[i]) < 1e-12);

    // zero-overlap shot flagged and left alone
    const auto zero = make_envelope(std::vector<cplx>(env.size(), cplx{}), env.t0, env.dt);
    const auto flagged = phase_reference({env, zero});
    CHECK_FALSE(flagged.aligned[1]);
}

TEST_CASE("30 noisy random-phase copies keep >= 95% coherent amplitude at SNR 10") {
    const auto env = gaussian_envelope(3.0, 0.6, 6.0, 0.004);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uniform(0.0, two_pi);
    std::normal_distribution<double> noise(0.0, 0.1); // envelope peak 1, SNR 10

    std::vector<ComplexEnvelope> shots;
    for (int j = 0; j < 30; ++j) {
        ComplexEnvelope shot = env;
        const cplx rot = std::polar(1.0, uniform(rng));
        for (auto& v : shot.samples) v = v * rot + cplx(noise(rng), noise(rng));
        shots.push_back(std::move(shot));
    }
    const auto aligned = phase_reference(shots);
    const auto avg = average_shots(aligned.shots);
    CHECK(envelope_peak(avg) >= 0.95 * envelope_peak(env));
}

TEST_CASE("chirped gaussian fit recovers exact model parameters within 1%") {
    const double sigma = 1.0, freq = 0.3, chirp = 0.05;
    auto env = gaussian_envelope(10.0, sigma, 16.0, 0.008, freq, chirp);
    for (auto& v : env.samples) v *= 0.8 * std::polar(1.0, 0.4);
    const auto fit = fit_chirped_gaussian(env);
    CHECK(fit.converged);
    CHECK(fit.amplitude == doctest::Approx(0.8).epsilon(0.01));
    CHECK(fit.t0 == doctest::Approx(10.0).epsilon(0.01));
    CHECK(fit.sigma == doctest::Approx(sigma).epsilon(0.01));
    CHECK(fit.freq == doctest::Approx(freq).epsilon(0.01));
    CHECK(fit.chirp == doctest::Approx(chirp).epsilon(0.01));
    CHECK(fit.phase == doctest::Approx(0.4).epsilon(0.01));
    CHECK(fit.residual_rms < 1e-8);
}

TEST_CASE("zero-chirp data fits to negligible chirp") {
    const auto env = gaussian_envelope(5.0, 0.8, 10.0, 0.005, 0.2, 0.0);
    const auto fit = fit_chirped_gaussian(env);
    CHECK(std::abs(fit.chirp) < 1e-6);
}

TEST_CASE("fit errors shrink as SNR grows") {
    const double sigma = 1.0, freq = 0.3, chirp = 0.05;
    auto run_at_snr = [&](double snr) {
        std::mt19937_64 rng(42);
        double err_acc = 0.0;
        const int trials = 12;
        for (int k = 0; k < trials; ++k) {
            auto env = gaussian_envelope(10.0, sigma, 16.0, 0.01, freq, chirp);
            std::normal_distribution<double> noise(0.0, 1.0 / snr);
            for (auto& v : env.samples) v += cplx(noise(rng), noise(rng));
            const auto fit = fit_chirped_gaussian(env);
            err_acc += std::abs(fit.freq - freq);
        }
        return err_acc / trials;
    };
    const double e20 = run_at_snr(20.0);
    const double e10 = run_at_snr(10.0);
    const double e5 = run_at_snr(5.0);
    CHECK(e20 < e10);
    CHECK(e10 < e5);
}

TEST_CASE("fringe report implements the stated arithmetic exactly") {
    ChirpedGaussianFit f1, f2;
    f1.sigma = 1.0;
    f2.sigma = 1.0;
    f1.freq = 49.8;
    f2.freq = 50.3;
    f1.chirp = 0.0;
    f2.chirp = 0.0;
    auto rep = fringe_report(f1, f2);
    CHECK(rep.sigma_res == doctest::Approx(1.0));
    CHECK(rep.hwhm == doctest::Approx(1.1675));
    CHECK(rep.delta_plus == 0.0);
    CHECK(rep.delta_minus == 0.0);
    CHECK(rep.delta_f == 0.0);
    CHECK(rep.modulation_freq == doctest::Approx(0.5));

    // property: algebraic identities against independent evaluation
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int k = 0; k < 50; ++k) {
        f1.sigma = u(rng);
        f2.sigma = u(rng);
        f1.chirp = u(rng) - 1.5;
        f2.chirp = u(rng) - 1.5;
        f1.freq = 10.0 * u(rng);
        f2.freq = 10.0 * u(rng);
        rep = fringe_report(f1, f2);
        const double sres = std::sqrt((f1.sigma * f1.sigma + f2.sigma * f2.sigma) / 2.0);
        const double hwhm = 2.335 * sres / 2.0;
        CHECK(rep.sigma_res == doctest::Approx(sres).epsilon(1e-15));
        CHECK(rep.hwhm == doctest::Approx(hwhm).epsilon(1e-15));
        CHECK(rep.delta_plus == doctest::Approx(hwhm * f1.chirp).epsilon(1e-15));
        CHECK(rep.delta_minus == doctest::Approx(hwhm * f2.chirp).epsilon(1e-15));
        CHECK(rep.delta_f == doctest::Approx(rep.delta_plus - rep.delta_minus).epsilon(1e-12));
        CHECK(rep.modulation_freq == doctest::Approx(std::abs(f2.freq - f1.freq)).epsilon(1e-15));
    }
}

TEST_CASE("bandpass is linear: superposition holds to numerical precision") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> noise(0.0, 1.0);
    HeterodyneTrace a, b;
    a.sample_rate = b.sample_rate = 1.0;
    a.samples.resize(8000);
    b.samples.resize(8000);
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        a.samples[i] = noise(rng);
        b.samples[i] = noise(rng);
    }
    HeterodyneTrace sum = a;
    for (std::size_t i = 0; i < sum.samples.size(); ++i) sum.samples[i] += 2.5 * b.samples[i];
    const auto fa = bandpass(a, 50.0, 15.0, 4);
    const auto fb = bandpass(b, 50.0, 15.0, 4);
    const auto fsum = bandpass(sum, 50.0, 15.0, 4);
    for (std::size_t i = 0; i < fsum.samples.size(); ++i)
        CHECK(fsum.samples[i] ==
              doctest::Approx(fa.samples[i] + 2.5 * fb.samples[i]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("trace files round-trip through CSV and the binary format") {
    const auto env = gaussian_envelope(2.0, 0.4, 4.0, 0.01);
    const auto tr = synthesize_trace(env, 50.0, 0.5, 0.0);
    const auto dir = std::filesystem::temp_directory_path() / "gemeit_dsp_test";
    std::filesystem::create_directories(dir);

    const auto csv_path = (dir / "trace.csv").string();
    write_trace_csv(csv_path, tr);
    const auto from_csv = read_trace_csv(csv_path, tr.carrier_freq);
    REQUIRE(from_csv.samples.size() == tr.samples.size());
    CHECK(from_csv.sample_rate == doctest::Approx(tr.sample_rate).epsilon(1e-9));
    for (std::size_t i = 0; i < tr.samples.size(); i += 97)
        CHECK(from_csv.samples[i] == doctest::Approx(tr.samples[i]).epsilon(1e-15));

    const auto bin_path = (dir / "trace.htrc").string();
    write_trace_binary(bin_path, tr);
    const auto from_bin = read_trace_binary(bin_path, tr.carrier_freq);
    REQUIRE(from_bin.samples.size() == tr.samples.size());
    CHECK(from_bin.sample_rate == tr.sample_rate);
    for (std::size_t i = 0; i < tr.samples.size(); ++i)
        CHECK(from_bin.samples[i] == tr.samples[i]);

    CHECK_THROWS_AS(read_trace_binary((dir / "missing.htrc").string(), 50.0), std::runtime_error);
    std::filesystem::remove_all(dir);
}
