#include <doctest.h>

#include <string>

#include "ferrodyn/config.hpp"
#include "ferrodyn/constants.hpp"

using namespace ferrodyn;

namespace {

const char* kMinimal = R"(
# two-layer stack
grid.nx = 8
grid.ny = 8
layers.count = 2
layers.0.kind = dielectric
layers.0.thickness = 4e-9
layers.0.eps = 10
layers.1.kind = ferroelectric
layers.1.thickness = 5e-9   # FE on top
)";

bool error_mentions(const std::string& text, const std::string& needle) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_CASE("minimal document takes the documented defaults") {
    const SimConfig c = parse_config(kMinimal);
    CHECK(c.nx == 8);
    CHECK(c.nz() == 18);
    CHECK(c.dt == 4.0e-13);
    CHECK(c.pol_bc.kind == PolarizationBC::Kind::surface_effect);
    CHECK(c.pol_bc.lambda == 3.0e-9);
    CHECK(c.fe.alpha == -2.5e9);
    CHECK(c.sc.Nc == doctest::Approx(effective_dos(c.sc.me_eff, 300.0)));
    CHECK(c.sweep.waveform == Waveform::hold);
    REQUIRE(c.layers.size() == 2);
    CHECK(c.layers[1].kind == Material::ferroelectric);
}

TEST_CASE("serialize/parse round trip") {
    for (const SimConfig& c : {mfim_config(), mfism_config(), mfm_config(), bump_config(32)})
        CHECK(parse_config(serialize_config(c)) == c);
    SimConfig c = mfim_config(8e-9);
    c.sweep.waveform = Waveform::list;
    c.sweep.values = {0.0, 1.5, -2.25e-3};
    c.output.snapshot_vapp = {1.0, -1.0};
    c.init.kind = InitKind::stripe;
    c.init.seed = 123456789012345ULL;
    c.pol_bc = {PolarizationBC::Kind::zero, 0.0};
    c.dt = 0.1 + 0.2;  // not exactly representable in short decimal
    CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("explicit DOS overrides the mass-derived value") {
    const SimConfig c = parse_config(std::string(kMinimal) + "sc.Nc = 2.8e25\nsc.Nv = 1.04e25\n");
    CHECK(c.sc.Nc == 2.8e25);
    CHECK(c.sc.Nv == 1.04e25);
}

TEST_CASE("rejected documents") {
    const std::string base = kMinimal;
    CHECK(error_mentions(base + "fe.alpah = 1\n", "fe.alpah: unknown key"));
    CHECK(error_mentions(base + "grid.nx = 16\n", "grid.nx: duplicate key"));
    CHECK(error_mentions("grid.nx = 8\n", "layers.count: missing"));
    CHECK(error_mentions(base + "time.dt = fast\n", "time.dt: expected a real number"));
    CHECK(error_mentions(base + "time.order = 1.5\n", "time.order"));
    CHECK(error_mentions(base + "tdgl.pol_bc = free\ntdgl.lambda = 1e-9\n", "tdgl.lambda"));
    CHECK(error_mentions(base + "tdgl.lambda = -1e-9\n", "tdgl.lambda"));
    CHECK(error_mentions(base + "tdgl.pol_bc = sticky\n", "tdgl.pol_bc"));
    CHECK(error_mentions(base + "just some words\n", "expected 'key = value'"));
    CHECK(error_mentions(base + "layers.1.eps = 24\n", "layers.1.eps"));
    CHECK(error_mentions(base + "sweep.waveform = list\n", "sweep.values"));
    CHECK(error_mentions(base + "time.order = 3\n", "time.order"));
    CHECK_THROWS_AS(load_config("/nonexistent/dir/x.cfg"), ConfigError);
}

TEST_CASE("free and zero conditions drop lambda") {
    const SimConfig c = parse_config(std::string(kMinimal) + "tdgl.pol_bc = zero\n");
    CHECK(c.pol_bc.lambda == 0.0);
    CHECK(parse_config(serialize_config(c)) == c);
}
