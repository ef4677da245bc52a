#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>

#include "ferrodyn/constants.hpp"
#include "ferrodyn/materials.hpp"
#include "ferrodyn/semiconductor.hpp"
#include "ferrodyn/verification.hpp"

using namespace ferrodyn;

namespace {

// (2/sqrt(pi)) int_0^inf sqrt(x) / (1 + e^{x - eta}) dx, integrated directly.
double fd_oracle(double eta) {
    boost::math::quadrature::exp_sinh<double> q;
    auto f = [eta](double x) {
        const double a = x - eta;
        return a > 700.0 ? 0.0 : std::sqrt(x) / (1.0 + std::exp(a));
    };
    return 2.0 / std::sqrt(constants::pi) * q.integrate(f, 1e-14);
}

}  // namespace

TEST_CASE("F_1/2 reference values") {
    CHECK(fd_oracle(0.0) == doctest::Approx(0.765147).epsilon(1e-5));
    CHECK(fd_oracle(-10.0) == doctest::Approx(std::exp(-10.0)).epsilon(1e-4));
    CHECK(fermi_half(0.0) == doctest::Approx(0.765147).epsilon(5e-3));
}

TEST_CASE("Bednarczyk form within 0.5% of quadrature on [-10, 20]") {
    double worst = 0.0;
    for (int m = 0; m <= 300; ++m) {
        const double eta = -10.0 + 0.1 * m;
        worst = std::max(worst, std::abs(fermi_half(eta) / fd_oracle(eta) - 1.0));
    }
    CHECK(worst < 5e-3);
    // agrees with the library's own quadrature
    for (double eta : {-5.0, 0.0, 3.5, 12.0}) CHECK(fermi_half_quadrature(eta) == doctest::Approx(fd_oracle(eta)).epsilon(1e-9));
}

TEST_CASE("Maxwell-Boltzmann limit") {
    for (double eta = -30.0; eta <= -8.0; eta += 0.5) CHECK(fermi_half(eta) == doctest::Approx(std::exp(eta)).epsilon(1e-2));
    // arguments are clamped rather than overflowing
    CHECK(std::isfinite(fermi_half(500.0)));
    CHECK(fermi_half(-500.0) >= 0.0);
}

TEST_CASE("carrier densities and charge") {
    const auto si = SemiconductorParams::silicon();
    const ChargeModel m(si);
    const double vt = constants::k_B * 300.0 / constants::q_e;
    // phi = Ec / q puts the Fermi level at the band edge
    CHECK(m.electron_density(0.56) == doctest::Approx(si.Nc * fermi_half(0.0)));
    CHECK(m.hole_density(-0.56) == doctest::Approx(si.Nv * fermi_half(0.0)));
    CHECK(m.electron_density(0.56 - 10 * vt) == doctest::Approx(si.Nc * fermi_half(-10.0)).epsilon(1e-9));
    CHECK(m.charge(0.5) < 0.0);
    CHECK(m.charge(-0.5) > 0.0);
    double prev = m.charge(-1.0);
    for (double phi = -0.95; phi <= 1.0; phi += 0.05) {
        const double c = m.charge(phi);
        CHECK(c < prev);
        prev = c;
    }
    CHECK(electron_density(0.3, m) == m.electron_density(0.3));
    CHECK(hole_density(0.3, m) == m.hole_density(0.3));
}

TEST_CASE("Maxwell-Boltzmann statistics agree with Fermi-Dirac when non-degenerate") {
    auto fd = SemiconductorParams::silicon();
    auto mb = fd;
    mb.statistics = Statistics::maxwell_boltzmann;
    const ChargeModel a(fd), b(mb);
    for (double phi : {-0.3, -0.1, 0.0, 0.1, 0.3})
        CHECK(a.electron_density(phi) == doctest::Approx(b.electron_density(phi)).epsilon(1e-2));
}

TEST_CASE("dopants add fixed charge") {
    auto p = SemiconductorParams::silicon();
    const double base = ChargeModel(p).charge(0.1);
    p.Nd_plus = 1e24;
    CHECK(ChargeModel(p).charge(0.1) - base == doctest::Approx(constants::q_e * 1e24));
}

TEST_CASE("charge fields are confined to the semiconductor") {
    auto g = create_grid(4, 4, 8, 1e-9, 1e-9, 1e-9);
    ScalarField phi(g, 0.2), rho(g);
    const ChargeModel m(SemiconductorParams::silicon());
    charge_density_layer(phi, m, 2, 5, rho);
    CHECK(rho(1, 1, 1) == 0.0);
    CHECK(rho(1, 1, 2) == m.charge(0.2));
    CHECK(rho(3, 0, 4) == m.charge(0.2));
    CHECK(rho(1, 1, 5) == 0.0);
    ScalarField mask(g);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) mask(i, j, 0) = 1.0;
    const ScalarField r2 = charge_density(phi, m, mask);
    CHECK(r2(2, 2, 0) == m.charge(0.2));
    CHECK(r2(2, 2, 1) == 0.0);
}

TEST_CASE("charge slope") {
    const ChargeModel m(SemiconductorParams::silicon());
    for (double phi : {-0.8, -0.3, 0.0, 0.4, 0.9}) {
        const double h = 1e-5;
        CHECK(m.charge_slope(phi) == doctest::Approx((m.charge(phi + h) - m.charge(phi - h)) / (2 * h)).epsilon(1e-5));
        CHECK(m.charge_slope(phi) < 0.0);
    }
}
