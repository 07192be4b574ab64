#include "gemeit/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gemeit {

namespace {
constexpr double pi = std::numbers::pi;

// Integral of the rising raised-cosine ramp r(u) = (1 - cos(pi u / w)) / 2
// from 0 to u.
double ramp_integral(double u, double w) {
    if (u <= 0.0) return 0.0;
    if (u >= w) return 0.5 * w + (u - w);
    return 0.5 * u - (w / (2.0 * pi)) * std::sin(pi * u / w);
}
} // namespace

double Segment::edge_factor(double t) const {
    if (t < t_start || t > t_end) return 0.0;
    if (edge_time <= 0.0) return 1.0;
    const double up = t - t_start;
    const double down = t_end - t;
    double f = 1.0;
    if (up < edge_time) f *= 0.5 * (1.0 - std::cos(pi * up / edge_time));
    if (down < edge_time) f *= 0.5 * (1.0 - std::cos(pi * down / edge_time));
    return f;
}

double Segment::edge_integral(double ta, double tb) const {
    ta = std::max(ta, t_start);
    tb = std::min(tb, t_end);
    if (tb <= ta) return 0.0;
    if (edge_time <= 0.0) return tb - ta;
    // Integral from t_start to t of the edge profile (edges do not overlap
    // because edge_time <= duration / 2).
    auto accum = [this](double t) {
        const double up = t - t_start;
        const double tail_start = t_end - edge_time;
        double acc = ramp_integral(std::min(up, t_end - t_start), edge_time);
        if (t > tail_start) {
            // subtract the part the falling ramp removes from the flat level
            const double v = std::min(t, t_end) - tail_start;
            acc -= v - (ramp_integral(edge_time, edge_time) - ramp_integral(edge_time - v, edge_time));
        }
        return acc;
    };
    return accum(tb) - accum(ta);
}

const Segment& ProtocolSchedule::segment_at(double t) const {
    return segments[segment_index_at(t)];
}

std::size_t ProtocolSchedule::segment_index_at(double t) const {
    if (segments.empty() || t < 0.0 || t > t_max())
        throw std::out_of_range("ProtocolSchedule: t outside schedule");
    for (std::size_t i = 0; i < segments.size(); ++i)
        if (t < segments[i].t_end || i + 1 == segments.size()) return i;
    return segments.size() - 1;
}

std::vector<double> ProtocolSchedule::breakpoints() const {
    std::vector<double> pts;
    for (const auto& s : segments) {
        pts.push_back(s.t_start);
        if (s.edge_time > 0.0) {
            pts.push_back(s.t_start + s.edge_time);
            pts.push_back(s.t_end - s.edge_time);
        }
        pts.push_back(s.t_end);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              pts.end());
    return pts;
}

double ProtocolSchedule::momentum_drift(double t_from, double t_to) const {
    double drift = 0.0;
    for (const auto& s : segments)
        drift -= s.gradient_slope * s.edge_integral(t_from, t_to);
    return drift;
}

ProtocolSchedule make_schedule(std::vector<Segment> segments, double gradient_center) {
    if (segments.empty()) throw std::invalid_argument("make_schedule: no segments");
    std::sort(segments.begin(), segments.end(),
              [](const Segment& a, const Segment& b) { return a.t_start < b.t_start; });
    if (std::abs(segments.front().t_start) > 1e-12)
        throw std::invalid_argument("make_schedule: schedule must start at t = 0");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        auto& s = segments[i];
        if (!(s.t_end > s.t_start))
            throw std::invalid_argument("make_schedule: segment duration must be positive");
        if (s.edge_time < 0.0)
            throw std::invalid_argument("make_schedule: edge_time must be >= 0");
        if (s.edge_time > 0.5 * s.duration())
            throw std::invalid_argument("make_schedule: edge_time must not exceed half the segment duration");
        if (i + 1 < segments.size() &&
            std::abs(s.t_end - segments[i + 1].t_start) > 1e-12)
            throw std::invalid_argument("make_schedule: segments must be contiguous");
    }
    return ProtocolSchedule{std::move(segments), gradient_center};
}

DriveSample drive_at(const ProtocolSchedule& schedule, double z, double t) {
    const Segment& s = schedule.segment_at(t);
    const double f = s.edge_factor(t);
    const double amp = s.control_amplitude * f;
    DriveSample d;
    d.omega = std::polar(amp, s.control_spatial_freq * z);
    d.delta_1 = s.control_detuning;
    d.delta_2 = f * (s.gradient_slope * (z - schedule.gradient_center) + s.gradient_offset);
    d.delta_acstark = s.control_detuning != 0.0 ? amp * amp / s.control_detuning : 0.0;
    return d;
}

double momentum_launch_k0(double eta, double write_duration,
                          std::optional<double> t_centroid) {
    if (write_duration <= 0.0)
        throw std::invalid_argument("momentum_launch_k0: write_duration must be positive");
    const double tc = t_centroid.value_or(0.5 * write_duration);
    if (tc < 0.0 || tc > write_duration)
        throw std::invalid_argument("momentum_launch_k0: centroid outside write window");
    return eta * (write_duration - tc);
}

ProtocolSchedule build_gem_eit_schedule(double t_write_end, double t_flip_end,
                                        double t_read_start, double t_max,
                                        const GemSettings& gem, const EitSettings& eit,
                                        bool idealized, double gradient_center,
                                        double t_centroid, double edge_time,
                                        std::optional<double> flip_slope) {
    if (!(0.0 < t_write_end && t_write_end <= t_flip_end && t_flip_end <= t_read_start &&
          t_read_start < t_max))
        throw std::invalid_argument(
            "build_gem_eit_schedule: require 0 < t_write_end <= t_flip_end <= t_read_start < t_max");
    if (!idealized && t_flip_end == t_write_end)
        throw std::invalid_argument("build_gem_eit_schedule: experimental mode needs a flip segment");

    std::vector<Segment> segs;
    Segment write;
    write.t_start = 0.0;
    write.t_end = t_write_end;
    write.control_amplitude = gem.omega;
    write.control_detuning = gem.delta;
    write.gradient_offset = gem.delta0;
    write.edge_time = edge_time;
    if (idealized) {
        // Launch at -k0 and let the (negative-slope) gradient walk the
        // centroid up to zero momentum by the end of the write window.
        write.gradient_slope = -gem.eta;
        write.control_spatial_freq = momentum_launch_k0(gem.eta, t_write_end, t_centroid);
    } else {
        write.gradient_slope = gem.eta;
    }
    segs.push_back(write);

    if (!idealized) {
        Segment flip;
        flip.t_start = t_write_end;
        flip.t_end = t_flip_end;
        flip.edge_time = std::min(edge_time, 0.5 * (t_flip_end - t_write_end));
        if (flip_slope) {
            flip.gradient_slope = *flip_slope;
        } else {
            // Undo exactly the momentum the write gradient imparted to a
            // pulse stored at t_centroid, edge profiles included.
            const double write_area = write.gradient_slope * write.edge_integral(t_centroid, t_write_end);
            const double flip_span = flip.edge_integral(t_write_end, t_flip_end);
            flip.gradient_slope = flip_span > 0.0 ? -write_area / flip_span : 0.0;
        }
        segs.push_back(flip);
    }

    const double hold_start = idealized ? t_write_end : t_flip_end;
    if (t_read_start > hold_start) {
        Segment hold;
        hold.t_start = hold_start;
        hold.t_end = t_read_start;
        hold.edge_time = std::min(edge_time, 0.5 * (t_read_start - hold_start));
        segs.push_back(hold);
    }

    Segment read;
    read.t_start = t_read_start;
    read.t_end = t_max;
    read.control_amplitude = eit.omega;
    read.gradient_offset = eit.delta0;
    read.edge_time = std::min(edge_time, 0.5 * (t_max - t_read_start));
    segs.push_back(read);

    return make_schedule(std::move(segs), gradient_center);
}

ProtocolSchedule build_gem_echo_schedule(double t_write_end, double t_max,
                                         const GemSettings& gem,
                                         double gradient_center, double edge_time) {
    if (!(0.0 < t_write_end && t_write_end < t_max))
        throw std::invalid_argument("build_gem_echo_schedule: require 0 < t_write_end < t_max");
    Segment write;
    write.t_start = 0.0;
    write.t_end = t_write_end;
    write.control_amplitude = gem.omega;
    write.control_detuning = gem.delta;
    write.gradient_slope = gem.eta;
    write.gradient_offset = gem.delta0;
    write.edge_time = edge_time;

    Segment recall = write;
    recall.t_start = t_write_end;
    recall.t_end = t_max;
    recall.gradient_slope = -gem.eta;
    recall.edge_time = std::min(edge_time, 0.5 * (t_max - t_write_end));

    return make_schedule({write, recall}, gradient_center);
}

} // namespace gemeit
