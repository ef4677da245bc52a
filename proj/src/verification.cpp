#include "ferrodyn/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ferrodyn/constants.hpp"
#include "ferrodyn/coupling.hpp"
#include "ferrodyn/semiconductor.hpp"

namespace ferrodyn {

ScalarField gaussian_bump(const DeviceStack& stack, const BumpConfig& cfg) {
    const Grid& g = stack.grid();
    if (!(cfg.sigma1 > 0.0) || !(cfg.sigma2 > 0.0))
        throw std::invalid_argument("gaussian_bump: sigmas must be positive");
    const double z_lo = stack.fe_k_lo() * g.dz(), z_hi = stack.fe_k_hi() * g.dz();
    const double margin = 4.0 * cfg.sigma2;
    // small slack so that a margin landing exactly on a face passes
    const double slack = 1e-9 * g.dz();
    if (cfg.z0 - margin < z_lo - slack || cfg.z0 + margin > z_hi + slack)
        throw std::invalid_argument("gaussian_bump: z0 +- 4 sigma2 leaves the ferroelectric layer");
    ScalarField P(stack.grid_ptr());
    const double xc = 0.5 * g.Lx(), yc = 0.5 * g.Ly();
    const double a1 = 0.5 / (cfg.sigma1 * cfg.sigma1), a2 = 0.5 / (cfg.sigma2 * cfg.sigma2);
    for (int k = stack.fe_k_lo(); k < stack.fe_k_hi(); ++k) {
        const double dz = g.z_center(k) - cfg.z0;
        for (int j = 0; j < g.ny(); ++j) {
            const double dy = g.y_center(j) - yc;
            for (int i = 0; i < g.nx(); ++i) {
                const double dx = g.x_center(i) - xc;
                P(i, j, k) = cfg.amplitude * std::exp(-(a1 * (dx * dx + dy * dy) + a2 * dz * dz));
            }
        }
    }
    return P;
}

ScalarField coarsen(const ScalarField& fine) {
    const Grid& g = fine.grid();
    if (g.nx() % 2 || g.ny() % 2 || g.nz() % 2)
        throw std::invalid_argument("coarsen: cell counts must be even");
    auto cg = create_grid(g.nx() / 2, g.ny() / 2, g.nz() / 2, 2 * g.dx(), 2 * g.dy(), 2 * g.dz(),
                          g.max_tile_cells());
    ScalarField c(cg);
    for_each_tile(*cg, [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                    double s = 0.0;
                    for (int dk = 0; dk < 2; ++dk)
                        for (int dj = 0; dj < 2; ++dj)
                            for (int di = 0; di < 2; ++di) s += fine(2 * i + di, 2 * j + dj, 2 * k + dk);
                    c(i, j, k) = 0.125 * s;
                }
    });
    return c;
}

double l2_error(const ScalarField& a, const ScalarField& b) {
    const Grid& g = a.grid();
    if (!g.same_shape(b.grid())) throw std::invalid_argument("l2_error: grids differ");
    const double s = tile_sum(g, [&](const Box& bx) {
        double acc = 0.0;
        for (int k = bx.lo[2]; k < bx.hi[2]; ++k)
            for (int j = bx.lo[1]; j < bx.hi[1]; ++j)
                for (int i = bx.lo[0]; i < bx.hi[0]; ++i) {
                    const double d = a(i, j, k) - b(i, j, k);
                    acc += d * d;
                }
        return acc;
    });
    return std::sqrt(s / double(g.cell_count()));
}

const char* quantity_name(Quantity q) { return q == Quantity::P ? "P" : "Phi"; }

const char* suite_name(Suite s) {
    switch (s) {
        case Suite::temporal_order1: return "temporal1";
        case Suite::temporal_order2: return "temporal2";
        case Suite::spatial: return "spatial";
    }
    return "?";
}

namespace {

struct Fields {
    ScalarField P, phi;
};

Fields run_bump(int n, double dt, int order, const SuiteOptions& opt, SuiteRun& info) {
    SimConfig cfg = bump_config(n);
    cfg.dt = dt;
    cfg.temporal_order = order;
    cfg.fixedpoint_tol = opt.coupling_tol;
    cfg.poisson_tol = opt.poisson_tol;
    const long steps = std::lround(opt.t_final / dt);
    if (std::abs(steps * dt - opt.t_final) > 1e-9 * opt.t_final)
        throw std::invalid_argument("verification: t_final is not a multiple of dt");
    const auto t0 = std::chrono::steady_clock::now();
    Simulation sim(cfg);
    SimState s = sim.initialize(0.0);
    for (long m = 0; m < steps; ++m) sim.advance(s);
    info = {n, dt, steps,
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
    if (opt.verbose)
        std::fprintf(stderr, "  n=%d dt=%.4g fs steps=%ld  %.1f s\n", n, dt * 1e15, steps, info.seconds);
    return {std::move(s.P), std::move(s.phi)};
}

ConvergenceResult make_result(Quantity q, double e_cm, double e_mf) {
    return {q, e_cm, e_mf, std::log2(e_cm / e_mf)};
}

}  // namespace

SuiteReport run_suite(Suite s, const SuiteOptions& opt) {
    SuiteReport rep{s, {}, {}};
    std::vector<Fields> f;
    if (s == Suite::spatial) {
        const int n0 = opt.n > 0 ? opt.n : opt.full ? 64 : 32;
        const double dt = 25e-15;
        for (int m = 0; m < 3; ++m) {
            SuiteRun r{};
            f.push_back(run_bump(n0 << m, dt, 2, opt, r));
            rep.runs.push_back(r);
        }
        for (Quantity q : {Quantity::P, Quantity::Phi}) {
            auto pick = [&](int m) -> const ScalarField& { return q == Quantity::P ? f[m].P : f[m].phi; };
            const double e_cm = l2_error(coarsen(pick(1)), pick(0));
            const double e_mf = l2_error(coarsen(pick(2)), pick(1));
            rep.results.push_back(make_result(q, e_cm, e_mf));
        }
    } else {
        const int n = opt.n > 0 ? opt.n : opt.full ? 128 : 64;
        const double dt0 = opt.full ? 50e-15 : 100e-15;
        const int order = s == Suite::temporal_order1 ? 1 : 2;
        for (int m = 0; m < 3; ++m) {
            SuiteRun r{};
            f.push_back(run_bump(n, dt0 / double(1 << m), order, opt, r));
            rep.runs.push_back(r);
        }
        for (Quantity q : {Quantity::P, Quantity::Phi}) {
            auto pick = [&](int m) -> const ScalarField& { return q == Quantity::P ? f[m].P : f[m].phi; };
            rep.results.push_back(make_result(q, l2_error(pick(1), pick(0)), l2_error(pick(2), pick(1))));
        }
    }
    return rep;
}

RateBand rate_band(Suite s, Quantity q) {
    switch (s) {
        case Suite::temporal_order1: return {0.85, 1.15};
        case Suite::temporal_order2: return {1.8, 2.2};
        case Suite::spatial: return q == Quantity::P ? RateBand{1.6, 1e300} : RateBand{0.7, 1.3};
    }
    return {0.0, 0.0};
}

bool report_passes(const SuiteReport& r) {
    for (const auto& c : r.results) {
        const RateBand b = rate_band(r.suite, c.quantity);
        if (!(c.rate >= b.lo && c.rate <= b.hi)) return false;
    }
    return true;
}

std::string format_report(const std::vector<SuiteReport>& reports) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-10s  %-4s  %12s  %6s  %12s  %s\n", "suite", "qty", "E_cm", "rate",
                  "E_mf", "band");
    os << buf;
    for (const auto& r : reports)
        for (const auto& c : r.results) {
            const RateBand b = rate_band(r.suite, c.quantity);
            const bool ok = c.rate >= b.lo && c.rate <= b.hi;
            if (b.hi > 1e100)
                std::snprintf(buf, sizeof buf, "%-10s  %-4s  %12.4e  %6.3f  %12.4e  >= %.2f  %s\n",
                              suite_name(r.suite), quantity_name(c.quantity), c.E_cm, c.rate, c.E_mf,
                              b.lo, ok ? "ok" : "OUT");
            else
                std::snprintf(buf, sizeof buf, "%-10s  %-4s  %12.4e  %6.3f  %12.4e  [%.2f, %.2f]  %s\n",
                              suite_name(r.suite), quantity_name(c.quantity), c.E_cm, c.rate, c.E_mf,
                              b.lo, b.hi, ok ? "ok" : "OUT");
            os << buf;
        }
    return os.str();
}

std::string report_csv(const std::vector<SuiteReport>& reports) {
    std::ostringstream os;
    os << "suite,quantity,E_cm,E_mf,rate,band_lo,band_hi,pass\r\n";
    char buf[256];
    for (const auto& r : reports)
        for (const auto& c : r.results) {
            const RateBand b = rate_band(r.suite, c.quantity);
            const bool ok = c.rate >= b.lo && c.rate <= b.hi;
            std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,%.17g,%s,%d\r\n", suite_name(r.suite),
                          quantity_name(c.quantity), c.E_cm, c.E_mf, c.rate, b.lo,
                          b.hi > 1e100 ? "inf" : std::to_string(b.hi).c_str(), ok ? 1 : 0);
            os << buf;
        }
    return os.str();
}

}  // namespace ferrodyn

namespace ferrodyn {

namespace {
constexpr double two_pi = 2.0 * constants::pi;
}

double mms_phi(double x, double y, double z) {
    return std::sin(two_pi * x) * std::sin(two_pi * y) * std::sin(constants::pi * z) + z;
}

double mms_eps(double x, double y, double z) {
    return 2.0 + 0.5 * std::sin(two_pi * x) * std::cos(two_pi * y) + 0.5 * z;
}

double mms_rhs(double x, double y, double z) {
    const double a = two_pi, b = constants::pi;
    const double sx = std::sin(a * x), cx = std::cos(a * x), sy = std::sin(a * y), cy = std::cos(a * y);
    const double sz = std::sin(b * z), cz = std::cos(b * z);
    const double lap = -(2.0 * a * a + b * b) * sx * sy * sz;
    const double px = a * cx * sy * sz, py = a * sx * cy * sz, pz = b * sx * sy * cz + 1.0;
    const double ex = 0.5 * a * cx * cy, ey = -0.5 * a * sx * sy, ez = 0.5;
    return mms_eps(x, y, z) * lap + ex * px + ey * py + ez * pz;
}

std::vector<MmsLevel> poisson_mms_study(const std::vector<int>& ns, double tol,
                                        const MultigridConfig& mg) {
    std::vector<MmsLevel> out;
    for (int n : ns) {
        const double h = 1.0 / n;
        auto g = create_grid(n, n, n, h, h, h);
        ScalarField eps(g), rhs(g), phi(g), exact(g);
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const double x = g->x_center(i), y = g->y_center(j), z = g->z_center(k);
                    eps(i, j, k) = mms_eps(x, y, z);
                    rhs(i, j, k) = mms_rhs(x, y, z);
                    exact(i, j, k) = mms_phi(x, y, z);
                }
        const auto t0 = std::chrono::steady_clock::now();
        PoissonSolver solver(eps, mg);
        const SolveStats st = solver.solve(rhs, 0.0, 1.0, tol, phi);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double e = l2_error(phi, exact);
        const double rate = out.empty() ? 0.0 : std::log2(out.back().error / e);
        out.push_back({n, st.vcycles, st.rel_residual, e, rate, secs});
    }
    return out;
}

double fermi_half_quadrature(double eta) {
    // x = u^2 removes the square-root endpoint singularity.
    auto f = [eta](double u) {
        const double a = u * u - eta;
        if (a > 700.0) return 0.0;
        return 2.0 * u * u / (1.0 + std::exp(a));
    };
    const double upper = std::sqrt(std::max(eta, 0.0) + 60.0);
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 15, 1e-14);
    return 2.0 / std::sqrt(constants::pi) * I;
}

FermiCheck fermi_check(int samples) {
    FermiCheck c{0.0, 0.0, 0.0, 0.0};
    for (int m = 0; m < samples; ++m) {
        const double eta = -10.0 + 30.0 * m / (samples - 1);
        const double rel = std::abs(fermi_half(eta) / fermi_half_quadrature(eta) - 1.0);
        if (rel > c.max_rel_fd) c = {rel, eta, c.max_rel_mb, c.worst_eta_mb};
    }
    for (int m = 0; m < samples; ++m) {
        const double eta = -30.0 + 22.0 * m / (samples - 1);
        const double rel = std::abs(fermi_half(eta) / std::exp(eta) - 1.0);
        if (rel > c.max_rel_mb) {
            c.max_rel_mb = rel;
            c.worst_eta_mb = eta;
        }
    }
    return c;
}

}  // namespace ferrodyn
