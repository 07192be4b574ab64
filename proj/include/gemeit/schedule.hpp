#pragma once

#include <optional>
#include <vector>

#include "gemeit/envelope.hpp"

namespace gemeit {

// Two-photon detuning profile delta(z) = slope * (z - z_center) + offset.
struct GradientProfile {
    double slope = 0.0;    // eta, rad/us per mm
    double z_center = 0.0; // mm
    double offset = 0.0;   // delta_0, rad/us
};

// One piecewise-constant span of the drive settings. Control amplitude and
// gradient values take raised-cosine edges of width edge_time inside the
// segment; the control detuning is a carrier property and does not ramp.
struct Segment {
    double t_start = 0.0;
    double t_end = 0.0;
    double control_amplitude = 0.0;   // Omega_0, rad/us
    double control_detuning = 0.0;    // Delta, rad/us
    double control_spatial_freq = 0.0; // k_0, rad/mm
    double gradient_slope = 0.0;      // eta, rad/us per mm
    double gradient_offset = 0.0;     // delta_0, rad/us
    double edge_time = 0.0;           // us

    double duration() const { return t_end - t_start; }
    // Raised-cosine envelope applied to amplitude and gradient inside the segment.
    double edge_factor(double t) const;
    // Integral of edge_factor over [ta, tb] (clipped to the segment).
    double edge_integral(double ta, double tb) const;
};

// Drive settings at one point of space-time, as consumed by the equations
// of motion.
struct DriveSample {
    cplx omega;            // control Rabi frequency (rad/us)
    double delta_1 = 0.0;  // one-photon detuning (rad/us)
    double delta_2 = 0.0;  // two-photon detuning (rad/us)
    double delta_acstark = 0.0; // light-shift compensation (rad/us)
};

struct ProtocolSchedule {
    std::vector<Segment> segments;
    double gradient_center = 0.0; // z_c shared by all segments (mm)

    double t_max() const { return segments.empty() ? 0.0 : segments.back().t_end; }
    const Segment& segment_at(double t) const; // throws outside [0, t_max]
    std::size_t segment_index_at(double t) const;

    // Times where the drive is not smooth: segment bounds and edge bounds.
    std::vector<double> breakpoints() const;

    // Momentum drift of the spinwave between two times,
    // integral of -slope(t) dt including edge profiles.
    double momentum_drift(double t_from, double t_to) const;
};

// Validates contiguity, coverage of [0, t_max] and edge times; throws
// std::invalid_argument on violation.
ProtocolSchedule make_schedule(std::vector<Segment> segments, double gradient_center);

// Drive settings at (z, t):
//   Omega(z,t) = Omega_0(t) e^{i k0 z} with raised-cosine edges,
//   delta(z,t) = eta(t) (z - z_c) + delta_0(t),
//   delta_ACStark = |Omega|^2 / Delta when Delta != 0.
DriveSample drive_at(const ProtocolSchedule& schedule, double z, double t);

// Spatial frequency for the control so that a spinwave written at the
// given temporal centroid ends the write window at zero momentum:
// k0 = eta * (write_duration - t_centroid).
double momentum_launch_k0(double eta, double write_duration,
                          std::optional<double> t_centroid = std::nullopt);

struct GemSettings {
    double omega = 0.0;  // write control Rabi frequency (rad/us)
    double delta = 0.0;  // one-photon detuning during write (rad/us)
    double eta = 0.0;    // gradient magnitude (rad/us per mm)
    double delta0 = 0.0; // global two-photon offset (rad/us)
};

struct EitSettings {
    double omega = 0.0;  // read control Rabi frequency (rad/us)
    double delta0 = 0.0;
};

// GEM write / gradient flip / hold / EIT read. In idealized mode the write
// control carries the k0 launch and the flip segment is omitted. In
// experimental mode the flip slope defaults to the value that returns the
// spinwave momentum centroid to zero exactly at t_flip_end ("auto");
// pass flip_slope to override.
ProtocolSchedule build_gem_eit_schedule(double t_write_end, double t_flip_end,
                                        double t_read_start, double t_max,
                                        const GemSettings& gem, const EitSettings& eit,
                                        bool idealized, double gradient_center,
                                        double t_centroid, double edge_time = 0.2,
                                        std::optional<double> flip_slope = std::nullopt);

// GEM write then GEM recall with the gradient sign reversed and the same
// far-detuned control (the double-Fourier configuration).
ProtocolSchedule build_gem_echo_schedule(double t_write_end, double t_max,
                                         const GemSettings& gem,
                                         double gradient_center, double edge_time = 0.2);

} // namespace gemeit
