#include "ferrodyn/tdgl.hpp"

#include <cmath>

#include "ferrodyn/constants.hpp"
#include "ferrodyn/poisson.hpp"

namespace ferrodyn {

double landau_density(double P, const FerroelectricParams& fe) {
    const double p2 = P * P;
    return p2 * (0.5 * fe.alpha + p2 * (0.25 * fe.beta + p2 * fe.gamma / 6.0));
}

double landau_derivative(double P, const FerroelectricParams& fe) {
    const double p2 = P * P;
    return P * (fe.alpha + p2 * (fe.beta + p2 * fe.gamma));
}

double spontaneous_polarization(const FerroelectricParams& fe) {
    const double disc = fe.beta * fe.beta - 4.0 * fe.gamma * fe.alpha;
    // Stable form of (-beta + sqrt(disc)) / (2 gamma).
    const double u = fe.beta >= 0.0 ? -2.0 * fe.alpha / (fe.beta + std::sqrt(disc))
                                    : (-fe.beta + std::sqrt(disc)) / (2.0 * fe.gamma);
    return std::sqrt(u);
}

namespace {

double face_value(double P0, double P1, const PolarizationBC& bc, double h) {
    switch (bc.kind) {
        case PolarizationBC::Kind::surface_effect:
            return bc.lambda * (9.0 * P0 - P1) / (3.0 * h + 8.0 * bc.lambda);
        case PolarizationBC::Kind::free: return (9.0 * P0 - P1) / 8.0;
        case PolarizationBC::Kind::zero: return 0.0;
    }
    return 0.0;
}

double closure_ghost(double Pb, double P0, double P1) { return (8.0 * Pb - 6.0 * P0 + P1) / 3.0; }

}  // namespace

FaceValues polarization_face_values(const ScalarField& P, const PolarizationBC& bc,
                                    const DeviceStack& stack) {
    const Grid& g = P.grid();
    const int k0 = stack.fe_k_lo(), k1 = stack.fe_k_hi();
    FaceValues fv;
    fv.lo.resize(std::size_t(g.nx()) * g.ny());
    fv.hi.resize(fv.lo.size());
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const std::size_t n = std::size_t(i) + std::size_t(g.nx()) * j;
            fv.lo[n] = face_value(P(i, j, k0), P(i, j, k0 + 1), bc, g.dz());
            fv.hi[n] = face_value(P(i, j, k1 - 1), P(i, j, k1 - 2), bc, g.dz());
        }
    return fv;
}

ScalarField apply_polarization_bc(const ScalarField& P, const PolarizationBC& bc,
                                  const DeviceStack& stack) {
    const Grid& g = P.grid();
    ScalarField out = P;
    exchange_ghosts(out, PeriodicZ{});
    const int k0 = stack.fe_k_lo(), k1 = stack.fe_k_hi();
    const double h = g.dz();
    for (int j = -1; j <= g.ny(); ++j)
        for (int i = -1; i <= g.nx(); ++i) {
            const double a0 = out(i, j, k0), a1 = out(i, j, k0 + 1);
            out(i, j, k0 - 1) = closure_ghost(face_value(a0, a1, bc, h), a0, a1);
            const double b0 = out(i, j, k1 - 1), b1 = out(i, j, k1 - 2);
            out(i, j, k1) = closure_ghost(face_value(b0, b1, bc, h), b0, b1);
        }
    return out;
}

double dphi_dz(const ScalarField& phi, const DeviceStack& stack, int i, int j, int k) {
    const int nz = stack.grid().nz();
    const double ec = stack.eps_at(k);
    const double elo = k > 0 ? stack.eps_at(k - 1) : ec;
    const double ehi = k + 1 < nz ? stack.eps_at(k + 1) : ec;
    const double f_hi = (ec * phi(i, j, k) + ehi * phi(i, j, k + 1)) / (ec + ehi);
    const double f_lo = (elo * phi(i, j, k - 1) + ec * phi(i, j, k)) / (elo + ec);
    return (f_hi - f_lo) / stack.grid().dz();
}

ScalarField gradient_density(const ScalarField& Pext, const FerroelectricParams& fe,
                             const DeviceStack& stack) {
    const Grid& g = Pext.grid();
    ScalarField out(Pext.grid_ptr());
    const double ix = 1.0 / g.dx(), iy = 1.0 / g.dy(), iz = 1.0 / g.dz();
    for_each_tile(g, [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k) {
            if (!stack.in_fe(k)) continue;
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                    const double p = Pext(i, j, k);
                    const double xp = (Pext(i + 1, j, k) - p) * ix, xm = (p - Pext(i - 1, j, k)) * ix;
                    const double yp = (Pext(i, j + 1, k) - p) * iy, ym = (p - Pext(i, j - 1, k)) * iy;
                    const double zp = (Pext(i, j, k + 1) - p) * iz, zm = (p - Pext(i, j, k - 1)) * iz;
                    out(i, j, k) = 0.25 * (fe.g44 * (xp * xp + xm * xm + yp * yp + ym * ym) +
                                           fe.g11 * (zp * zp + zm * zm));
                }
        }
    });
    return out;
}

ScalarField tdgl_rhs(const ScalarField& P, const ScalarField& phi, const FerroelectricParams& fe,
                     const PolarizationBC& bc, const DeviceStack& stack) {
    const Grid& g = P.grid();
    const ScalarField Pe = apply_polarization_bc(P, bc, stack);
    ScalarField out(P.grid_ptr());
    const double ix = 1.0 / (g.dx() * g.dx()), iy = 1.0 / (g.dy() * g.dy()),
                 iz = 1.0 / (g.dz() * g.dz());
    for_each_tile(g, [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k) {
            if (!stack.in_fe(k)) continue;
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                    const double p = Pe(i, j, k);
                    const double lx = (Pe(i + 1, j, k) - 2.0 * p + Pe(i - 1, j, k)) * ix;
                    const double ly = (Pe(i, j + 1, k) - 2.0 * p + Pe(i, j - 1, k)) * iy;
                    const double lz = (Pe(i, j, k + 1) - 2.0 * p + Pe(i, j, k - 1)) * iz;
                    const double drive = landau_derivative(p, fe) - fe.g44 * lx - fe.g44 * ly -
                                         fe.g11 * lz + dphi_dz(phi, stack, i, j, k);
                    out(i, j, k) = -fe.Gamma * drive;
                }
        }
    });
    return out;
}

ScalarField euler_step(const ScalarField& P, const ScalarField& f, double dt) {
    ScalarField out(P.grid_ptr());
    for_each_tile(P.grid(), [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) out(i, j, k) = P(i, j, k) + dt * f(i, j, k);
    });
    return out;
}

ScalarField trapezoidal_step(const ScalarField& P, const ScalarField& f0, const ScalarField& f1,
                             double dt) {
    ScalarField out(P.grid_ptr());
    const double h = 0.5 * dt;
    for_each_tile(P.grid(), [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i)
                    out(i, j, k) = P(i, j, k) + h * f0(i, j, k) + h * f1(i, j, k);
    });
    return out;
}

namespace {

// Same face construction as dphi_dz applied to the layered charge-free potential.
std::vector<double> applied_gradient(const DeviceStack& stack, double v_lo, double v_hi) {
    const Grid& g = stack.grid();
    const auto& eps = stack.eps_profile();
    const std::vector<double> pa = layered_potential(eps, g.dz(), v_lo, v_hi);
    const int nz = g.nz();
    std::vector<double> d(static_cast<std::size_t>(nz));
    for (int k = 0; k < nz; ++k) {
        const auto kk = std::size_t(k);
        const double ec = eps[kk];
        const double f_lo = k > 0 ? (eps[kk - 1] * pa[kk - 1] + ec * pa[kk]) / (eps[kk - 1] + ec) : v_lo;
        const double f_hi = k + 1 < nz ? (ec * pa[kk] + eps[kk + 1] * pa[kk + 1]) / (ec + eps[kk + 1]) : v_hi;
        d[kk] = (f_hi - f_lo) / g.dz();
    }
    return d;
}

}  // namespace

ScalarField domain_wall_energy(const ScalarField& P, const ScalarField& phi,
                               const FerroelectricParams& fe, const DeviceStack& stack) {
    const Grid& g = P.grid();
    const ElectricField E = electric_field(phi);
    ScalarField out(P.grid_ptr());
    const double ix = 1.0 / g.dx(), iy = 1.0 / g.dy();
    const double ce = constants::eps0 * fe.eps_fe;
    const int nx = g.nx(), ny = g.ny();
    for_each_tile(g, [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k) {
            if (!stack.in_fe(k)) continue;
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                    const int ip = (i + 1) % nx, im = (i + nx - 1) % nx;
                    const int jp = (j + 1) % ny, jm = (j + ny - 1) % ny;
                    const double p = P(i, j, k);
                    const double xp = (P(ip, j, k) - p) * ix, xm = (p - P(im, j, k)) * ix;
                    const double yp = (P(i, jp, k) - p) * iy, ym = (p - P(i, jm, k)) * iy;
                    const double ex = E.x(i, j, k), ey = E.y(i, j, k);
                    out(i, j, k) = ce * ex * ex + ce * ey * ey +
                                   0.25 * fe.g44 * (xp * xp + xm * xm) +
                                   0.25 * fe.g44 * (yp * yp + ym * ym);
                }
        }
    });
    return out;
}

EnergyBreakdown energy_breakdown(const ScalarField& P, const ScalarField& phi,
                                 const DeviceStack& stack, const FerroelectricParams& fe,
                                 const PolarizationBC& bc, double v_lo, double v_hi) {
    const Grid& g = P.grid();
    EnergyBreakdown e{ScalarField(P.grid_ptr()), gradient_density(apply_polarization_bc(P, bc, stack), fe, stack),
                      ScalarField(P.grid_ptr()), domain_wall_energy(P, phi, fe, stack), 0.0};
    const std::vector<double> da = applied_gradient(stack, v_lo, v_hi);
    for_each_tile(g, [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k) {
            if (!stack.in_fe(k)) continue;
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                    const double p = P(i, j, k);
                    e.f_land(i, j, k) = landau_density(p, fe);
                    e.f_elec(i, j, k) = 0.5 * p * (dphi_dz(phi, stack, i, j, k) + da[std::size_t(k)]);
                }
        }
    });
    e.F_total = tile_sum(g, [&](const Box& b) {
                    double acc = 0.0;
                    for (int k = b.lo[2]; k < b.hi[2]; ++k) {
                        if (!stack.in_fe(k)) continue;
                        for (int j = b.lo[1]; j < b.hi[1]; ++j)
                            for (int i = b.lo[0]; i < b.hi[0]; ++i)
                                acc += e.f_land(i, j, k) + e.f_grad(i, j, k) + e.f_elec(i, j, k);
                    }
                    return acc;
                }) *
                g.cell_volume();
    return e;
}

double free_energy_frozen(const ScalarField& P, const ScalarField& phi, const DeviceStack& stack,
                          const FerroelectricParams& fe, const PolarizationBC& bc) {
    const Grid& g = P.grid();
    const ScalarField fg = gradient_density(apply_polarization_bc(P, bc, stack), fe, stack);
    return tile_sum(g, [&](const Box& b) {
               double acc = 0.0;
               for (int k = b.lo[2]; k < b.hi[2]; ++k) {
                   if (!stack.in_fe(k)) continue;
                   for (int j = b.lo[1]; j < b.hi[1]; ++j)
                       for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                           const double p = P(i, j, k);
                           acc += landau_density(p, fe) + fg(i, j, k) + p * dphi_dz(phi, stack, i, j, k);
                       }
               }
               return acc;
           }) *
           g.cell_volume();
}

}  // namespace ferrodyn
