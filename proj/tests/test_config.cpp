#include "doctest.h"

#include <stdexcept>

#include <string>

#include "gemeit/config.hpp"

using namespace gemeit;

namespace {
const std::string minimal = R"(
[grid]
z_min = 0.0
z_max = 1.0
nz = 64
t_max = 8.0
n_samples = 200

[pulse]
kind = gaussian
center = 2.0
sigma = 0.4

[schedule]
mode = idealized
write_end = 4.0
read_start = 4.0

[gem]
omega = 5.0
delta = 60.0
eta = 6.0

[eit]
omega = 25.0
)";
} // namespace

TEST_CASE("minimal config parses with defaults applied") {
    const auto cfg = parse_config_text(minimal);
    CHECK(cfg.grid.nz == 64);
    CHECK(cfg.pulse.kind == PulseKind::gaussian);
    CHECK(cfg.solver.method == RkPair::fehlberg78); // default
    CHECK(cfg.solver.rel_tolerance == doctest::Approx(1e-6));
    CHECK(cfg.ensemble.profile == "flat");
    CHECK(cfg.dsp.enabled == false);
    CHECK(cfg.seed == 1);
    CHECK(cfg.sweep.parameter.empty());
}

TEST_CASE("nz = 1 is rejected with a message naming the invariant") {
    std::string bad = minimal;
    const auto pos = bad.find("nz = 64");
    bad.replace(pos, 7, "nz = 1");
    try {
        parse_config_text(bad);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& ex) {
        CHECK(std::string(ex.what()).find("nz must be >= 2") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected with file and line diagnostics") {
    const std::string bad = "[grid]\nz_min = 0\nz_max = 1\nnozzle = 4\n";
    try {
        parse_config_text(bad, ".", "test.cfg");
        FAIL("expected a parse error");
    } catch (const std::runtime_error& ex) {
        const std::string msg = ex.what();
        CHECK(msg.find("test.cfg:4") != std::string::npos);
        CHECK(msg.find("nozzle") != std::string::npos);
    }
}

TEST_CASE("unknown sections and malformed lines are rejected") {
    CHECK_THROWS_AS(parse_config_text("[warp]\nfactor = 9\n"), std::runtime_error);
    CHECK_THROWS_AS(parse_config_text("[grid]\nthis is not a key value pair\n"),
                    std::runtime_error);
    CHECK_THROWS_AS(parse_config_text("orphan = 1\n"), std::runtime_error);
}

TEST_CASE("sweep values without a parameter are rejected") {
    const std::string bad = minimal + "\n[sweep]\nvalues = 1.0, 2.0\n";
    CHECK_THROWS_AS(parse_config_text(bad), std::runtime_error);
    const std::string bad2 = minimal + "\n[sweep]\nparameter = pulse.bogus\nvalues = 1.0\n";
    CHECK_THROWS_AS(parse_config_text(bad2), std::runtime_error);
}

TEST_CASE("shipped fig3c preset sweeps six separations between 2 and 5 us") {
    const auto cfg = parse_config_file(std::string(GEMEIT_PRESET_DIR) + "/fig3c.cfg");
    CHECK(cfg.sweep.parameter == "pulse.separation");
    REQUIRE(cfg.sweep.values.size() == 6);
    CHECK(cfg.sweep.values.front() == doctest::Approx(2.0));
    CHECK(cfg.sweep.values.back() == doctest::Approx(5.0));
    for (double v : cfg.sweep.values) {
        CHECK(v >= 2.0);
        CHECK(v <= 5.0);
    }
    // the include pulled the experimental base in
    CHECK(cfg.grid.z_max == doctest::Approx(30.0));
    CHECK(cfg.schedule.mode == ScheduleMode::experimental);
    CHECK(cfg.acceptance.count("min_r2") == 1);
}

TEST_CASE("all shipped presets parse") {
    for (const char* name : {"fig1_idealized.cfg", "fig1_modulated.cfg", "fig3a.cfg",
                             "fig3c.cfg", "fig3e.cfg", "fig3f.cfg", "gem_echo.cfg",
                             "absorption_oracle.cfg"}) {
        CAPTURE(name);
        CHECK_NOTHROW(parse_config_file(std::string(GEMEIT_PRESET_DIR) + "/" + name));
    }
}

TEST_CASE("rendered configs round-trip through the parser") {
    const auto cfg = parse_config_file(std::string(GEMEIT_PRESET_DIR) + "/fig1_idealized.cfg");
    const auto cfg2 = parse_config_text(render_config(cfg));
    CHECK(cfg2.grid.nz == cfg.grid.nz);
    CHECK(cfg2.gem.eta == doctest::Approx(cfg.gem.eta));
    CHECK(cfg2.pulse.separation == doctest::Approx(cfg.pulse.separation));
    CHECK(cfg2.acceptance.at("min_fidelity") == doctest::Approx(0.90));
    CHECK(render_config(cfg2) == render_config(cfg));
}

TEST_CASE("with_sweep_value applies a parameter to a copy") {
    const auto cfg = parse_config_text(minimal);
    const auto cfg2 = with_sweep_value(cfg, "pulse.sigma", 0.9);
    CHECK(cfg2.pulse.sigma_t == doctest::Approx(0.9));
    CHECK(cfg.pulse.sigma_t == doctest::Approx(0.4));
    CHECK_THROWS_AS(with_sweep_value(cfg, "grid.nz", 32.0), std::invalid_argument);
}
