#include <doctest.h>

#include <cmath>
#include <random>

#include "ferrodyn/constants.hpp"
#include "ferrodyn/poisson.hpp"
#include "ferrodyn/tdgl.hpp"

using namespace ferrodyn;

namespace {

constexpr double nm = 1e-9;

DeviceStack mfm(int nx, int nz) {
    auto g = create_grid(nx, 4, nz, 0.5 * nm, 0.5 * nm, 0.5 * nm);
    return build_stack({{Material::ferroelectric, nz * 0.5 * nm, 24.0}}, g);
}

DeviceStack mfim(int n) {
    auto g = create_grid(n, n, 18, 0.5 * nm, 0.5 * nm, 0.5 * nm);
    return build_stack({{Material::dielectric, 4 * nm, 10.0}, {Material::ferroelectric, 5 * nm, 24.0}}, g);
}

ScalarField zero_phi(const DeviceStack& st) {
    ScalarField phi(st.grid_ptr());
    exchange_ghosts(phi, DirichletZ{0.0, 0.0});
    return phi;
}

}  // namespace

TEST_CASE("Landau derivative and spontaneous polarization") {
    const FerroelectricParams fe;
    for (double P : {-0.3, -0.05, 0.1, 0.25}) {
        const double h = 1e-6;
        const double fd = (landau_density(P + h, fe) - landau_density(P - h, fe)) / (2 * h);
        CHECK(landau_derivative(P, fe) == doctest::Approx(fd).epsilon(1e-7));
    }
    const double ps = spontaneous_polarization(fe);
    CHECK(ps == doctest::Approx(0.1946).epsilon(1e-3));
    CHECK(std::abs(landau_derivative(ps, fe)) < 1e-6 * std::abs(fe.alpha) * ps);
    CHECK(landau_density(ps, fe) < 0.0);
    // second derivative positive: a minimum
    CHECK(landau_derivative(ps * 1.001, fe) > 0.0);
    CHECK(landau_derivative(ps * 0.999, fe) < 0.0);
}

TEST_CASE("boundary closure: surface-effect face value satisfies lambda dP/dn = P") {
    const DeviceStack st = mfim(4);
    PolarizationBC bc;
    bc.lambda = 3 * nm;
    const double h = st.grid().dz();
    ScalarField P(st.grid_ptr());
    const int k0 = st.fe_k_lo(), k1 = st.fe_k_hi();
    for (int k = k0; k < k1; ++k)
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < 4; ++i) P(i, j, k) = 0.1 + 0.01 * (k - k0) + 0.002 * i;
    const ScalarField Pe = apply_polarization_bc(P, bc, st);
    const FaceValues fv = polarization_face_values(P, bc, st);
    for (int i = 0; i < 4; ++i) {
        const double P0 = P(i, 1, k0), P1 = P(i, 1, k0 + 1);
        const double Pb = (3 * Pe(i, 1, k0 - 1) + 6 * P0 - P1) / 8;
        CHECK(Pb == doctest::Approx(fv.lo[std::size_t(i + 4)]));
        CHECK(bc.lambda * (-8 * Pb + 9 * P0 - P1) / (3 * h) == doctest::Approx(Pb));
        const double Q0 = P(i, 1, k1 - 1), Q1 = P(i, 1, k1 - 2);
        const double Qb = (3 * Pe(i, 1, k1) + 6 * Q0 - Q1) / 8;
        CHECK(Qb == doctest::Approx(fv.hi[std::size_t(i + 4)]));
        CHECK(bc.lambda * (-8 * Qb + 9 * Q0 - Q1) / (3 * h) == doctest::Approx(Qb));
    }
    // x/y ghosts of the closure planes are periodic images
    CHECK(Pe(-1, 2, k0 - 1) == Pe(3, 2, k0 - 1));
}

TEST_CASE("boundary closure is exact for quadratics") {
    const DeviceStack st = mfm(4, 10);
    const double h = st.grid().dz();
    const double b = 3e7, c = -2e16;
    // zero condition: P(s) = b s + c s^2 with s the distance from the bottom face
    ScalarField P(st.grid_ptr());
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < 4; ++i) {
                const double s = (k + 0.5) * h;
                P(i, j, k) = b * s + c * s * s;
            }
    PolarizationBC zero{PolarizationBC::Kind::zero, 0.0};
    const ScalarField Pe = apply_polarization_bc(P, zero, st);
    const double s = -0.5 * h;
    CHECK(Pe(1, 1, -1) == doctest::Approx(b * s + c * s * s).epsilon(1e-12));

    // free condition: uniform data is its own ghost
    ScalarField U(st.grid_ptr(), 0.17);
    PolarizationBC freebc{PolarizationBC::Kind::free, 0.0};
    const ScalarField Ue = apply_polarization_bc(U, freebc, st);
    CHECK(Ue(0, 0, -1) == doctest::Approx(0.17));
    CHECK(Ue(0, 0, 10) == doctest::Approx(0.17));
}

TEST_CASE("uniform P has no gradient energy under the free condition") {
    const DeviceStack st = mfm(8, 10);
    const FerroelectricParams fe;
    ScalarField P(st.grid_ptr(), 0.15);
    const ScalarField fg = gradient_density(apply_polarization_bc(P, {PolarizationBC::Kind::free, 0.0}, st), fe, st);
    CHECK(fg.max_abs() < 1e-20);
}

TEST_CASE("in-plane Laplacian has the discrete Fourier symbol") {
    const int nx = 16;
    const DeviceStack st = mfm(nx, 10);
    const FerroelectricParams fe;
    const double dx = st.grid().dx();
    const double kx = 2 * constants::pi * 3 / (nx * dx);
    const double kd2 = std::pow(2 * std::sin(kx * dx / 2) / dx, 2);
    ScalarField P(st.grid_ptr());
    for (int k = 0; k < 10; ++k)
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < nx; ++i) P(i, j, k) = 0.01 * std::cos(kx * (i + 0.5) * dx);
    const ScalarField f = tdgl_rhs(P, zero_phi(st), fe, {PolarizationBC::Kind::free, 0.0}, st);
    for (int i = 0; i < nx; ++i) {
        const double p = P(i, 2, 5);
        const double expect = -fe.Gamma * (landau_derivative(p, fe) + fe.g44 * kd2 * p);
        CHECK(f(i, 2, 5) == doctest::Approx(expect).epsilon(1e-9).scale(1e-6 * fe.Gamma * fe.g44 * kd2 * 0.01));
    }
}

TEST_CASE("Euler and trapezoidal steps on the scalar ODE") {
    const DeviceStack st = mfm(4, 4);
    const FerroelectricParams fe;
    const PolarizationBC bc{PolarizationBC::Kind::free, 0.0};
    const double p0 = 0.05, dt = 1e-13;
    ScalarField P(st.grid_ptr(), p0);
    const ScalarField phi = zero_phi(st);
    const ScalarField f0 = tdgl_rhs(P, phi, fe, bc, st);
    const ScalarField P1 = euler_step(P, f0, dt);
    const double e = p0 - dt * fe.Gamma * landau_derivative(p0, fe);
    CHECK(P1(2, 1, 3) == doctest::Approx(e).epsilon(1e-14));
    const ScalarField f1 = tdgl_rhs(P1, phi, fe, bc, st);
    const ScalarField P2 = trapezoidal_step(P, f0, f1, dt);
    const double tr = p0 - 0.5 * dt * fe.Gamma * (landau_derivative(p0, fe) + landau_derivative(e, fe));
    CHECK(P2(0, 3, 0) == doctest::Approx(tr).epsilon(1e-14));
}

TEST_CASE("frozen-potential functional has -rhs/Gamma as its gradient") {
    const DeviceStack st = mfim(8);
    const FerroelectricParams fe;
    const PolarizationBC bc;
    const auto gp = st.grid_ptr();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField P(gp), phi(gp), dP(gp);
    const int k0 = st.fe_k_lo(), k1 = st.fe_k_hi();
    for (int k = 0; k < 18; ++k)
        for (int j = 0; j < 8; ++j)
            for (int i = 0; i < 8; ++i) {
                phi(i, j, k) = 0.3 * u(rng);
                if (k < k0) continue;
                P(i, j, k) = 0.2 * u(rng);
                // the compact stencil is the exact gradient away from the closure cells
                if (k >= k0 + 2 && k < k1 - 2) dP(i, j, k) = u(rng);
            }
    exchange_ghosts(phi, DirichletZ{0.0, 0.7});
    const ScalarField f = tdgl_rhs(P, phi, fe, bc, st);
    double lin = 0.0;
    for (int k = k0; k < k1; ++k)
        for (int j = 0; j < 8; ++j)
            for (int i = 0; i < 8; ++i) lin -= f(i, j, k) / fe.Gamma * dP(i, j, k);
    lin *= st.grid().cell_volume();

    auto shifted = [&](double eps) {
        ScalarField Q(gp);
        for (int k = k0; k < k1; ++k)
            for (int j = 0; j < 8; ++j)
                for (int i = 0; i < 8; ++i) Q(i, j, k) = P(i, j, k) + eps * dP(i, j, k);
        return free_energy_frozen(Q, phi, st, fe, bc);
    };
    double prev = 1.0;
    for (double eps : {1e-3, 1e-4}) {
        const double d = (shifted(eps) - shifted(-eps)) / (2 * eps);
        const double rel = std::abs(d / lin - 1.0);
        CHECK(rel < prev);
        prev = rel;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("domain-wall energy") {
    const DeviceStack st = mfim(8);
    const FerroelectricParams fe;
    ScalarField P(st.grid_ptr(), 0.1);
    const ScalarField phi = zero_phi(st);
    CHECK(domain_wall_energy(P, phi, fe, st).max_abs() == 0.0);
    const double dx = st.grid().dx();
    for (int k = st.fe_k_lo(); k < st.fe_k_hi(); ++k)
        for (int j = 0; j < 8; ++j)
            for (int i = 0; i < 8; ++i) P(i, j, k) = i < 4 ? 0.1 : -0.1;
    const ScalarField w = domain_wall_energy(P, phi, fe, st);
    CHECK(w(3, 5, 10) == doctest::Approx(0.25 * fe.g44 * std::pow(0.2 / dx, 2)));
    CHECK(w(0, 5, 10) == doctest::Approx(0.25 * fe.g44 * std::pow(0.2 / dx, 2)));  // periodic wall
    CHECK(w(1, 5, 10) == 0.0);
    CHECK(w(1, 5, 2) == 0.0);  // dielectric
}

TEST_CASE("electrostatic energy is positive for uniform P in MFIM") {
    const DeviceStack st = mfim(4);
    const FerroelectricParams fe;
    const PolarizationBC bc{PolarizationBC::Kind::free, 0.0};
    ScalarField P(st.grid_ptr());
    for (int k = st.fe_k_lo(); k < st.fe_k_hi(); ++k)
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < 4; ++i) P(i, j, k) = 0.15;
    const ScalarField rhs = assemble_rhs(P, ScalarField(st.grid_ptr()), st);
    ScalarField phi(st.grid_ptr());
    PoissonSolver solver(st.eps_field());
    solver.solve(rhs, 0.0, 0.0, 1e-12, phi);
    const EnergyBreakdown e = energy_breakdown(P, phi, st, fe, bc, 0.0, 0.0);
    for (int k = st.fe_k_lo(); k < st.fe_k_hi(); ++k) CHECK(e.f_elec(1, 1, k) > 0.0);
    // uniform P: only the Landau and electrostatic parts remain
    double land = 0.0, elec = 0.0;
    for (int k = st.fe_k_lo(); k < st.fe_k_hi(); ++k) {
        land += 16 * landau_density(0.15, fe);
        elec += 16 * e.f_elec(0, 0, k);
    }
    CHECK(e.F_total == doctest::Approx((land + elec) * st.grid().cell_volume()).epsilon(1e-10));
}
