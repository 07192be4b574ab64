#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gemeit/envelope.hpp"

namespace gemeit {

// Real-valued sampled detector voltage. sample_rate in GS/s (samples per
// ns), carrier_freq in MHz, time origin at t0 (us).
struct HeterodyneTrace {
    std::vector<double> samples;
    double sample_rate = 1.0; // GS/s
    double carrier_freq = 50.0; // MHz
    double t0 = 0.0;           // us
    int shot_id = 0;

    double dt() const { return 1.0e-3 / sample_rate; } // us between samples
    double t_at(std::size_t i) const { return t0 + dt() * static_cast<double>(i); }
};

// Beat-note synthesis: samples = 2 |env(t)| cos(2 pi f_b t + arg env(t)) + noise,
// f_b = |lo_detuning| (MHz). The envelope is resampled to the trace rate
// over its own span. Throws when f_b exceeds the Nyquist rate.
// noise_rms adds white Gaussian noise drawn from the given seed.
HeterodyneTrace synthesize_trace(const ComplexEnvelope& envelope, double lo_detuning,
                                 double sample_rate, double noise_rms,
                                 std::uint64_t seed = 0, int shot_id = 0);

// Cascaded-biquad Butterworth filter (bandpass or lowpass) designed by the
// bilinear transform. freq arguments in MHz against the trace sample rate.
class Butterworth {
public:
    static Butterworth bandpass(double center, double half_width, int order,
                                double sample_rate);
    static Butterworth lowpass(double cutoff, int order, double sample_rate);

    std::vector<double> apply_single_pass(const std::vector<double>& x) const;
    // forward-backward pass (zero phase); doubles the stopband attenuation
    // and moves the single-pass -3 dB edges to -6 dB.
    std::vector<double> apply_zero_phase(const std::vector<double>& x) const;

    // complex frequency response at f (MHz) of a single pass
    cplx response(double f) const;

private:
    struct Biquad { double b0, b1, b2, a1, a2; };
    std::vector<Biquad> sections_;
    double gain_ = 1.0;
    double sample_rate_ = 1.0; // GS/s
};

// Zero-phase Butterworth bandpass of the trace; center and half_width in
// MHz. Throws when the band leaves (0, Nyquist) or the design is unstable.
HeterodyneTrace bandpass(const HeterodyneTrace& trace, double center, double half_width,
                         int order = 4);

// IQ demodulation: multiply by e^{-i 2 pi f_c t}, zero-phase lowpass at
// lp_cutoff (MHz), decimate to the analysis rate (MS/s). A unit-amplitude
// envelope synthesized at 2 cos(...) comes back with |I + iQ| = 1.
ComplexEnvelope demodulate(const HeterodyneTrace& trace, double f_c, double lp_cutoff,
                           double analysis_rate = 62.5, int lp_order = 4);

struct PhaseAlignment {
    std::vector<ComplexEnvelope> shots;
    std::vector<double> applied_phase; // theta_j removed from shot j
    std::vector<bool> aligned;         // false for zero-overlap shots
};

// References every shot to the first: shot_j *= e^{-i theta_j} with
// theta_j = arg <shot_j, shot_1>. Shot 1 is unchanged.
PhaseAlignment phase_reference(const std::vector<ComplexEnvelope>& shots);

// Pointwise mean of aligned shots (on the first shot's grid).
ComplexEnvelope average_shots(const std::vector<ComplexEnvelope>& shots);

// Least-squares fit of A exp(-(t-t0)^2/(2 sigma^2))
//   * exp(i [2 pi f (t-t0) + pi chirp (t-t0)^2 + phi])
// to a complex envelope; the instantaneous frequency is f + chirp (t-t0).
struct ChirpedGaussianFit {
    double amplitude = 0.0;
    double t0 = 0.0;     // us
    double sigma = 0.0;  // us
    double freq = 0.0;   // MHz
    double phase = 0.0;  // rad
    double chirp = 0.0;  // MHz/us
    double residual_rms = 0.0;
    bool converged = false;
};

struct ChirpedGaussianInit {
    std::optional<double> t0, sigma, freq, chirp;
};

ChirpedGaussianFit fit_chirped_gaussian(const ComplexEnvelope& envelope,
                                        const ChirpedGaussianInit& init = {});

// Fringe-chirp bookkeeping from two single-pulse reference fits:
//   sigma_res = sqrt((sigma_1^2 + sigma_2^2) / 2), HWHM = 2.335 sigma_res / 2,
//   Delta_± = HWHM * chirp_{1,2}, Delta_f = Delta_+ - Delta_-,
//   modulation_freq = |f_2 - f_1|.
struct FringeReport {
    double modulation_freq = 0.0; // MHz
    double delta_plus = 0.0;      // MHz
    double delta_minus = 0.0;     // MHz
    double delta_f = 0.0;         // MHz
    double hwhm = 0.0;            // us
    double sigma_res = 0.0;       // us
};

FringeReport fringe_report(const ChirpedGaussianFit& fit1, const ChirpedGaussianFit& fit2);

// CSV (time_us, voltage) and binary trace round trip. The binary layout is
// magic "HTRC", u32 version (1), f64 sample_rate (GS/s), u64 length,
// then length float64 little-endian samples.
void write_trace_csv(const std::string& path, const HeterodyneTrace& trace);
HeterodyneTrace read_trace_csv(const std::string& path, double carrier_freq);
void write_trace_binary(const std::string& path, const HeterodyneTrace& trace);
HeterodyneTrace read_trace_binary(const std::string& path, double carrier_freq);

} // namespace gemeit
