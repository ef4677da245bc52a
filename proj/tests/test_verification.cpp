#include <doctest.h>

#include <cmath>
#include <random>

#include "ferrodyn/constants.hpp"
#include "ferrodyn/coupling.hpp"
#include "ferrodyn/verification.hpp"

using namespace ferrodyn;

namespace {

DeviceStack bump_stack(int n) {
    const SimConfig c = bump_config(n);
    auto g = create_grid(c.nx, c.ny, c.nz(), c.dx, c.dy, c.dz);
    return build_stack(c.stack_layers(), g);
}

}  // namespace

TEST_CASE("Gaussian bump") {
    const DeviceStack st = bump_stack(32);
    const BumpConfig b;
    const ScalarField P = gaussian_bump(st, b);
    const Grid& g = st.grid();
    // cell (16, 16, 24) is centered at (16.5, 16.5, 24.5) nm
    const double r2 = 2 * 0.25e-18, dz2 = 0.25e-18;
    CHECK(P(16, 16, 24) ==
          doctest::Approx(b.amplitude * std::exp(-r2 / (2 * b.sigma1 * b.sigma1) - dz2 / (2 * b.sigma2 * b.sigma2))));
    CHECK(P(16, 16, 10) == 0.0);  // dielectric
    CHECK(P.max_abs() <= b.amplitude);

    // integral against the truncated Gaussian
    const double box = 16e-9 / (std::sqrt(2.0) * b.sigma1);
    const double lateral = 2 * constants::pi * b.sigma1 * b.sigma1 * std::pow(std::erf(box), 2);
    const double vertical = std::sqrt(2 * constants::pi) * b.sigma2 * std::erf(8e-9 / (std::sqrt(2.0) * b.sigma2));
    CHECK(volume_integral(P) == doctest::Approx(b.amplitude * lateral * vertical).epsilon(1e-2));
    (void)g;

    BumpConfig off = b;
    off.z0 = 20e-9;  // 4 sigma2 reaches into the dielectric
    CHECK_THROWS_AS(gaussian_bump(st, off), std::invalid_argument);
}

TEST_CASE("coarsening") {
    auto g = create_grid(8, 8, 8, 1.0, 1.0, 1.0);
    ScalarField c(g, 3.5);
    const ScalarField cc = coarsen(c);
    CHECK(cc.grid().nx() == 4);
    CHECK(cc.grid().dx() == 2.0);
    CHECK(cc(1, 2, 3) == 3.5);

    ScalarField lin(g);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    ScalarField r(g);
    for (int k = 0; k < 8; ++k)
        for (int j = 0; j < 8; ++j)
            for (int i = 0; i < 8; ++i) {
                lin(i, j, k) = 2.0 * (i + 0.5) - 1.0 * (j + 0.5) + 0.5 * (k + 0.5);
                r(i, j, k) = u(rng);
            }
    const ScalarField cl = coarsen(lin);
    // linear data restricts to its value at the coarse center
    CHECK(cl(1, 1, 1) == doctest::Approx(2.0 * 3 - 3 + 0.5 * 3));
    const ScalarField cr = coarsen(r);
    double s = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) s += r(2 + di, 4 + dj, 6 + dk);
    CHECK(cr(1, 2, 3) == doctest::Approx(s / 8).epsilon(1e-15));

    auto odd = create_grid(6, 6, 5, 1, 1, 1);
    CHECK_THROWS_AS(coarsen(ScalarField(odd)), std::invalid_argument);
}

TEST_CASE("RMS error") {
    auto g = create_grid(4, 4, 4, 1, 1, 1);
    ScalarField a(g, 1.0), b(g, 1.0);
    CHECK(l2_error(a, b) == 0.0);
    b(0, 0, 0) = 5.0;
    CHECK(l2_error(a, b) == doctest::Approx(4.0 / 8.0));  // sqrt(16 / 64)
    ScalarField c(g, 3.0);
    CHECK(l2_error(a, c) == doctest::Approx(2.0));
}

TEST_CASE("manufactured Poisson solution") {
    const double h = 1e-6;
    for (double x : {0.1, 0.37})
        for (double z : {0.2, 0.8}) {
            const double y = 0.61;
            auto flux = [&](int axis, double s) {
                double p[3] = {x, y, z};
                p[axis] += s;
                double pl[3] = {p[0], p[1], p[2]}, ph[3] = {p[0], p[1], p[2]};
                pl[axis] -= h;
                ph[axis] += h;
                return mms_eps(p[0], p[1], p[2]) * (mms_phi(ph[0], ph[1], ph[2]) - mms_phi(pl[0], pl[1], pl[2])) / (2 * h);
            };
            double div = 0.0;
            for (int a = 0; a < 3; ++a) div += (flux(a, 1e-4) - flux(a, -1e-4)) / 2e-4;
            CHECK(mms_rhs(x, y, z) == doctest::Approx(div).epsilon(1e-4));
        }
    CHECK(mms_phi(0.3, 0.3, 0.0) == doctest::Approx(0.0));
    CHECK(mms_phi(0.3, 0.3, 1.0) == doctest::Approx(1.0));
    const auto levels = poisson_mms_study({16, 32});
    REQUIRE(levels.size() == 2);
    CHECK(levels[1].rate == doctest::Approx(2.0).epsilon(0.05));
    CHECK(levels[1].rel_residual <= 1e-10);
}

TEST_CASE("Fermi check") {
    const FermiCheck f = fermi_check(301);
    CHECK(f.max_rel_fd < 5e-3);
    CHECK(f.max_rel_mb < 1e-2);
    CHECK(fermi_half_quadrature(0.0) == doctest::Approx(0.765147).epsilon(1e-6));
}

TEST_CASE("temporal suite on a small grid") {
    SuiteOptions opt;
    opt.n = 16;
    const SuiteReport r = run_suite(Suite::temporal_order1, opt);
    REQUIRE(r.runs.size() == 3);
    CHECK(r.runs[1].dt == r.runs[0].dt / 2);
    CHECK(r.runs[2].steps == 16);
    REQUIRE(r.results.size() == 2);
    for (const auto& c : r.results) {
        CHECK(c.E_cm > 0.0);
        CHECK(c.rate == doctest::Approx(std::log2(c.E_cm / c.E_mf)));
        CHECK(c.rate == doctest::Approx(1.0).epsilon(0.15));
    }
    const std::string csv = report_csv({r});
    CHECK(csv.rfind("suite,quantity,E_cm,E_mf,rate,band_lo,band_hi,pass\r\n", 0) == 0);
    CHECK(format_report({r}).find("temporal1") != std::string::npos);
}

TEST_CASE("rate bands") {
    CHECK(rate_band(Suite::temporal_order1, Quantity::P).lo == 0.85);
    CHECK(rate_band(Suite::temporal_order2, Quantity::Phi).hi == 2.2);
    CHECK(rate_band(Suite::spatial, Quantity::P).lo == 1.6);
    CHECK(rate_band(Suite::spatial, Quantity::Phi).lo == 0.7);
    SuiteReport r{Suite::spatial, {}, {{Quantity::P, 1.0, 0.25, 2.0}, {Quantity::Phi, 1.0, 0.5, 1.0}}};
    CHECK(report_passes(r));
    r.results[1].rate = 2.0;
    CHECK_FALSE(report_passes(r));
}
