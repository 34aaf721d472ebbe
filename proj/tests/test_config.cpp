#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bray/config.hpp"
#include "bray/errors.hpp"

using namespace bray;

namespace {
const char* kMinimal = R"(
[domain]
center = 0, 0, 0
radius = 1.0

[phantom.sigma]
kind = constant
value = 0.5

[phantom.scatter]
kind = constant
value = 0.2

[phantom.angular]
kind = isotropic
)";
}  // namespace

TEST_CASE("minimal config builds with defaults") {
    const auto cfg = build_experiment(ConfigTable::parse_text(kMinimal));
    CHECK(cfg.domain.radius() == 1.0);
    CHECK(cfg.sigma({0, 0, 0}) == 0.5);
    CHECK(cfg.scan_n == 5);
    CHECK(cfg.scan_extent == 0.5);
    CHECK(cfg.epsilon == 0.1);
    CHECK(cfg.source == MeasurementSource::Oracle);
    CHECK(cfg.line_nodes == 4);
    CHECK(cfg.sphere_nodes == 256);
    CHECK(!cfg.seed.has_value());
    CHECK(!cfg.has_multifreq());
    // defaults: zeta = e1, eta = e2
    CHECK(std::abs(cfg.zeta.vec().x - 1.0) < 1e-12);
    CHECK(std::abs(cfg.eta.vec().y - 1.0) < 1e-12);
}

TEST_CASE("unknown keys are rejected with line numbers") {
    const std::string text = std::string(kMinimal) + "\n[scan]\ngrdi = 5\n";
    try {
        build_experiment(ConfigTable::parse_text(text));
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
        CHECK(std::string(e.what()).find("grdi") != std::string::npos);
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
}

TEST_CASE("parse diagnostics carry the line number") {
    try {
        ConfigTable::parse_text("[domain]\nradius 1.0\n", "test.cfg");
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("test.cfg:2") != std::string::npos);
    }
}

TEST_CASE("keys outside sections and malformed headers fail") {
    CHECK_THROWS_AS(ConfigTable::parse_text("radius = 1\n"), Error);
    CHECK_THROWS_AS(ConfigTable::parse_text("[domain\nradius = 1\n"), Error);
    CHECK_THROWS_AS(ConfigTable::parse_text("[domain]\n= 1\n"), Error);
}

TEST_CASE("blob fields parse with repeatable keys") {
    const char* text = R"(
[domain]
radius = 1.0
[phantom.sigma]
kind = blobs
offset = 0.3
blob = 0.2, 0.0, 0.1, 0.3, 0.5
blob = -0.1, 0.2, 0.0, 0.4, 0.2
[phantom.scatter]
kind = constant
value = 0.1
[phantom.angular]
kind = henyey-greenstein
g = 0.5
)";
    const auto cfg = build_experiment(ConfigTable::parse_text(text));
    CHECK(cfg.sigma({5, 5, 5}) == doctest::Approx(0.3).epsilon(1e-6));  // far from blobs
    CHECK(cfg.sigma({0.2, 0, 0.1}) > 0.75);
    CHECK(cfg.kernel.angular.g() == 0.5);
}

TEST_CASE("overrides replace values and bad overrides fail") {
    ConfigTable t = ConfigTable::parse_text(kMinimal);
    t.set("scan.grid", "7");
    t.set("run.seed", "123");
    const auto cfg = build_experiment(t);
    CHECK(cfg.scan_n == 7);
    CHECK(cfg.seed.has_value());
    CHECK(*cfg.seed == 123);

    ConfigTable t2 = ConfigTable::parse_text(kMinimal);
    CHECK_THROWS_AS(t2.set("noseparator", "1"), Error);
}

TEST_CASE("canonical text ignores output directory and seed") {
    ConfigTable a = ConfigTable::parse_text(kMinimal);
    ConfigTable b = ConfigTable::parse_text(kMinimal);
    a.set("output.directory", "/tmp/x");
    b.set("output.directory", "/tmp/y");
    b.set("run.seed", "9");
    CHECK(a.canonical_text() == b.canonical_text());
    b.set("scan.grid", "9");
    CHECK(a.canonical_text() != b.canonical_text());
}

TEST_CASE("scan direction angles") {
    ConfigTable t = ConfigTable::parse_text(kMinimal);
    t.set("scan.zeta", "0, 0");  // north pole
    t.set("scan.eta", "90, 45");
    const auto cfg = build_experiment(t);
    CHECK(std::abs(cfg.zeta.vec().z - 1.0) < 1e-12);
    CHECK(cfg.eta.vec().x == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(cfg.eta.vec().y == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("invalid enumerations fail loudly") {
    ConfigTable t = ConfigTable::parse_text(kMinimal);
    t.set("run.source", "guesswork");
    CHECK_THROWS_AS(build_experiment(t), Error);

    ConfigTable t2 = ConfigTable::parse_text(kMinimal);
    t2.set("quadrature.beam_preset", "ultra");
    CHECK_THROWS_AS(build_experiment(t2), Error);

    ConfigTable t3 = ConfigTable::parse_text(kMinimal);
    t3.set("phantom.angular.kind", "rayleigh");
    CHECK_THROWS_AS(build_experiment(t3), Error);
}

TEST_CASE("two-frequency sections must come in pairs") {
    const std::string text = std::string(kMinimal) + "\n[phantom.sigma_e]\nkind = constant\nvalue = 0.3\n";
    CHECK_THROWS_AS(build_experiment(ConfigTable::parse_text(text)), Error);
}

TEST_CASE("missing file is an io error") {
    try {
        ConfigTable::parse_file("/nonexistent/path.cfg");
        FAIL("expected an io error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
        CHECK(std::string(e.what()).find("/nonexistent/path.cfg") != std::string::npos);
    }
}
