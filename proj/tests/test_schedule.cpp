#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "gemeit/schedule.hpp"

using namespace gemeit;

namespace {
constexpr double pi = std::numbers::pi;

GemSettings test_gem() {
    GemSettings g;
    g.omega = 6.0;
    g.delta = 2.0 * pi * 100.0;
    g.eta = 1.0;
    return g;
}

EitSettings test_eit() {
    EitSettings e;
    e.omega = 40.0;
    return e;
}
} // namespace

TEST_CASE("EIT segment mid-point drive") {
    auto sched = build_gem_eit_schedule(13.0, 29.0, 29.5, 60.0, test_gem(), test_eit(), false,
                                        15.0, 5.0);
    const DriveSample d = drive_at(sched, 10.0, 45.0);
    CHECK(d.omega.real() == doctest::Approx(40.0));
    CHECK(d.omega.imag() == doctest::Approx(0.0));
    CHECK(d.delta_1 == 0.0);
    CHECK(d.delta_2 == 0.0);
    CHECK(d.delta_acstark == 0.0);
}

TEST_CASE("gradient vanishes at the center") {
    auto sched = build_gem_eit_schedule(13.0, 29.0, 29.5, 60.0, test_gem(), test_eit(), false,
                                        15.0, 5.0);
    const DriveSample d = drive_at(sched, 15.0, 6.0);
    CHECK(d.delta_2 == doctest::Approx(0.0));
    const DriveSample d_off = drive_at(sched, 16.0, 6.0);
    CHECK(d_off.delta_2 == doctest::Approx(1.0)); // slope * (z - z_c)
}

TEST_CASE("AC-Stark compensation equals |Omega|^2 / Delta in the flat region") {
    const double delta = 2.0 * pi * 100.0;
    auto sched = build_gem_eit_schedule(13.0, 29.0, 29.5, 60.0, test_gem(), test_eit(), false,
                                        15.0, 5.0);
    const DriveSample d = drive_at(sched, 7.0, 6.0);
    CHECK(d.delta_1 == doctest::Approx(delta));
    CHECK(d.delta_acstark == doctest::Approx(6.0 * 6.0 / delta).epsilon(1e-12));
    // edges scale the amplitude, and the compensation follows |Omega|^2
    const DriveSample de = drive_at(sched, 7.0, 0.1);
    const double f = std::abs(de.omega) / 6.0;
    CHECK(f < 1.0);
    CHECK(de.delta_acstark == doctest::Approx(std::norm(de.omega) / delta).epsilon(1e-12));
}

TEST_CASE("momentum launch k0") {
    CHECK(momentum_launch_k0(0.0, 10.0) == 0.0);
    CHECK(momentum_launch_k0(1.0, 10.0, 5.0) == doctest::Approx(5.0));
    CHECK(momentum_launch_k0(2.0, 8.0) == doctest::Approx(8.0)); // default centroid W/2
    CHECK_THROWS_AS(momentum_launch_k0(1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(momentum_launch_k0(1.0, 10.0, 12.0), std::invalid_argument);
}

TEST_CASE("experimental schedule has write, flip, hold, read segments") {
    auto sched = build_gem_eit_schedule(13.0, 29.0, 29.5, 60.0, test_gem(), test_eit(), false,
                                        15.0, 5.0);
    REQUIRE(sched.segments.size() == 4);
    CHECK(sched.segments[0].t_end == 13.0);
    CHECK(sched.segments[1].t_end == 29.0);
    CHECK(sched.segments[1].control_amplitude == 0.0);
    CHECK(sched.segments[2].control_amplitude == 0.0);
    CHECK(sched.segments[3].t_start == 29.5);
    CHECK(sched.segments[3].control_detuning == 0.0);
    CHECK(sched.segments[3].gradient_slope == 0.0);
    // flip slope reverses sign against the write gradient
    CHECK(sched.segments[0].gradient_slope > 0.0);
    CHECK(sched.segments[1].gradient_slope < 0.0);
}

TEST_CASE("auto flip slope recenters the momentum exactly at t_flip_end") {
    const double t_c = 5.0;
    auto sched = build_gem_eit_schedule(13.0, 29.0, 30.0, 60.0, test_gem(), test_eit(), false,
                                        15.0, t_c);
    const double drift = sched.momentum_drift(t_c, 29.0);
    CHECK(drift == doctest::Approx(0.0).epsilon(1e-10));
    // and the drift reverses sign mid-flip
    CHECK(sched.momentum_drift(t_c, 13.0) < 0.0);
}

TEST_CASE("idealized schedule: two segments, k0 launch, no flip") {
    auto sched = build_gem_eit_schedule(10.0, 10.0, 10.0, 25.0, test_gem(), test_eit(), true,
                                        0.5, 5.0);
    REQUIRE(sched.segments.size() == 2);
    CHECK(sched.segments[0].control_spatial_freq == doctest::Approx(5.0)); // eta (10 - 5)
    CHECK(sched.segments[0].gradient_slope == doctest::Approx(-1.0));      // drift +eta
    CHECK(sched.segments[1].control_amplitude == doctest::Approx(40.0));
    // launched at -k0, the centroid drift over [t_c, write_end] cancels k0
    const double k_end = -sched.segments[0].control_spatial_freq + sched.momentum_drift(5.0, 10.0);
    CHECK(std::abs(k_end) < 1.0 * 0.2 / 2.0 + 1e-9); // edge-area deficit only
}

TEST_CASE("idealized schedule with a hold gap has three segments") {
    auto sched = build_gem_eit_schedule(10.0, 10.0, 12.0, 25.0, test_gem(), test_eit(), true,
                                        0.5, 5.0);
    REQUIRE(sched.segments.size() == 3);
    CHECK(sched.segments[1].control_amplitude == 0.0);
    CHECK(sched.segments[1].gradient_slope == 0.0);
}

TEST_CASE("schedule ordering violations are rejected") {
    CHECK_THROWS_AS(build_gem_eit_schedule(0.0, 5.0, 6.0, 10.0, test_gem(), test_eit(), false,
                                           0.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_gem_eit_schedule(5.0, 4.0, 6.0, 10.0, test_gem(), test_eit(), false,
                                           0.0, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_gem_eit_schedule(5.0, 6.0, 7.0, 6.5, test_gem(), test_eit(), false,
                                           0.0, 2.0),
                    std::invalid_argument);
    // degenerate flip is allowed only in idealized mode
    CHECK_THROWS_AS(build_gem_eit_schedule(5.0, 5.0, 6.0, 10.0, test_gem(), test_eit(), false,
                                           0.0, 2.0),
                    std::invalid_argument);
    CHECK_NOTHROW(build_gem_eit_schedule(5.0, 5.0, 6.0, 10.0, test_gem(), test_eit(), true,
                                         0.0, 2.0));
}

TEST_CASE("segments must cover the requested span contiguously") {
    Segment a;
    a.t_start = 0.0;
    a.t_end = 5.0;
    Segment b;
    b.t_start = 6.0;
    b.t_end = 10.0;
    CHECK_THROWS_AS(make_schedule({a, b}, 0.0), std::invalid_argument);
    b.t_start = 5.0;
    CHECK_NOTHROW(make_schedule({a, b}, 0.0));
    Segment bad = a;
    bad.edge_time = 3.0; // over half the duration
    CHECK_THROWS_AS(make_schedule({bad}, 0.0), std::invalid_argument);
}

TEST_CASE("drive_at rejects times outside the schedule") {
    auto sched = build_gem_echo_schedule(5.0, 10.0, test_gem(), 0.0);
    CHECK_THROWS_AS(drive_at(sched, 0.0, -0.5), std::out_of_range);
    CHECK_THROWS_AS(drive_at(sched, 0.0, 10.5), std::out_of_range);
}

TEST_CASE("gem echo schedule flips the gradient and keeps the control") {
    auto sched = build_gem_echo_schedule(5.0, 12.0, test_gem(), 0.0);
    REQUIRE(sched.segments.size() == 2);
    CHECK(sched.segments[0].gradient_slope == doctest::Approx(1.0));
    CHECK(sched.segments[1].gradient_slope == doctest::Approx(-1.0));
    CHECK(sched.segments[1].control_amplitude == doctest::Approx(6.0));
    CHECK(sched.segments[1].control_detuning == doctest::Approx(test_gem().delta));
}

TEST_CASE("raised-cosine edge integral matches a fine Riemann sum") {
    Segment s;
    s.t_start = 2.0;
    s.t_end = 8.0;
    s.edge_time = 1.5;
    for (auto [a, b] : {std::pair{2.0, 8.0}, {2.3, 3.1}, {2.5, 7.6}, {6.9, 8.0}, {4.0, 5.0}}) {
        double riemann = 0.0;
        const int n = 200000;
        const double h = (b - a) / n;
        for (int i = 0; i < n; ++i) riemann += s.edge_factor(a + (i + 0.5) * h) * h;
        CHECK(s.edge_integral(a, b) == doctest::Approx(riemann).epsilon(1e-8));
    }
}
