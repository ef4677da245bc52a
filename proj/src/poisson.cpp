#include "ferrodyn/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ferrodyn {

void MultigridConfig::validate() const {
    if (pre_smooth < 1 || post_smooth < 1)
        throw std::invalid_argument("poisson.pre_smooth/post_smooth must be >= 1");
    if (max_vcycles < 1) throw std::invalid_argument("poisson.max_vcycles must be >= 1");
    if (bottom_iterations < 1) throw std::invalid_argument("poisson.bottom_iterations must be >= 1");
    if (coarsest_size < 2) throw std::invalid_argument("poisson.coarsest_size must be >= 2");
}

namespace {

constexpr long kDirectLimit = 2048;
constexpr double kJacobiWeight = 6.0 / 7.0;

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

struct Level {
    int nx = 0, ny = 0, nz = 0;
    double hx = 0, hy = 0, hz = 0;
    std::array<int, 3> ratio{1, 1, 1};  // to the next coarser level
    std::vector<Box> tiles;
    std::vector<Box> planes;  // reductions
    std::vector<double> bx, by, bz;      // face permittivity
    std::vector<double> cx, cy, cz, dg;  // scaled stencil; boundary cz doubled
    std::vector<double> dg0, sig;        // diagonal without / with the shift
    std::vector<double> u, f, r, tmp;
    std::vector<double> chol;  // dense factor when this level is solved directly

    std::size_t nxy() const { return std::size_t(nx) * ny; }
    std::size_t size() const { return nxy() * nz; }
    std::size_t lin(int i, int j, int k) const { return i + std::size_t(nx) * (j + std::size_t(ny) * k); }

    void build_stencil() {
        const double ix = 1.0 / (hx * hx), iy = 1.0 / (hy * hy), iz = 1.0 / (hz * hz);
        cx.resize(size());
        cy.resize(size());
        cz.resize(nxy() * (nz + 1));
        dg.resize(size());
        for (std::size_t n = 0; n < size(); ++n) {
            cx[n] = bx[n] * ix;
            cy[n] = by[n] * iy;
        }
        for (std::size_t n = 0; n < cz.size(); ++n) cz[n] = bz[n] * iz;
        for (std::size_t n = 0; n < nxy(); ++n) {
            cz[n] *= 2.0;
            cz[nxy() * nz + n] *= 2.0;
        }
        for (int k = 0; k < nz; ++k)
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    const int ip = i + 1 == nx ? 0 : i + 1, jp = j + 1 == ny ? 0 : j + 1;
                    const std::size_t c = lin(i, j, k);
                    dg[c] = cx[c] + cx[lin(ip, j, k)] + cy[c] + cy[lin(i, jp, k)] + cz[c] +
                            cz[c + nxy()];
                }
        dg0 = dg;
        sig.assign(size(), 0.0);
        u.assign(size(), 0.0);
        f.assign(size(), 0.0);
        r.assign(size(), 0.0);
    }

    // Pointers into one x-row; the Dirichlet values enter through rows of
    // constant boundary potential paired with the doubled boundary coefficients.
    struct Row {
        const double *u, *ujm, *ujp, *ukm, *ukp;
        const double *cx, *cyc, *cyp, *czc, *czp;
        int nx;
        double off(int i) const {
            const int ip = i + 1 == nx ? 0 : i + 1, im = i == 0 ? nx - 1 : i - 1;
            return cx[i] * u[im] + cx[ip] * u[ip] + cyc[i] * ujm[i] + cyp[i] * ujp[i] +
                   czc[i] * ukm[i] + czp[i] * ukp[i];
        }
    };

    Row row(int j, int k, const double* vlo, const double* vhi) const {
        const int jp = j + 1 == ny ? 0 : j + 1, jm = j == 0 ? ny - 1 : j - 1;
        const std::size_t c = lin(0, j, k);
        return Row{&u[c],
                   &u[lin(0, jm, k)],
                   &u[lin(0, jp, k)],
                   k > 0 ? &u[c - nxy()] : vlo,
                   k + 1 < nz ? &u[c + nxy()] : vhi,
                   &cx[c],
                   &cy[c],
                   &cy[lin(0, jp, k)],
                   &cz[c],
                   &cz[c + nxy()],
                   nx};
    }
};

void relax_rb(Level& L, int color, double v0, double v1) {
    const std::vector<double> vlo(std::size_t(L.nx), v0), vhi(std::size_t(L.nx), v1);
    for_each_box(L.tiles, [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j) {
                const Level::Row R = L.row(j, k, vlo.data(), vhi.data());
                double* u = &L.u[L.lin(0, j, k)];
                const double* f = &L.f[L.lin(0, j, k)];
                const double* dg = &L.dg[L.lin(0, j, k)];
                const int i0 = b.lo[0] + ((b.lo[0] + j + k + color) & 1);
                for (int i = i0; i < b.hi[0]; i += 2) u[i] = (R.off(i) - f[i]) / dg[i];
            }
    });
}

void relax_jacobi(Level& L, double v0, double v1) {
    const std::vector<double> vlo(std::size_t(L.nx), v0), vhi(std::size_t(L.nx), v1);
    L.tmp.resize(L.size());
    for_each_box(L.tiles, [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j) {
                const Level::Row R = L.row(j, k, vlo.data(), vhi.data());
                const std::size_t c = L.lin(0, j, k);
                for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                    const double gs = (R.off(i) - L.f[c + i]) / L.dg[c + i];
                    L.tmp[c + i] = L.u[c + i] + kJacobiWeight * (gs - L.u[c + i]);
                }
            }
    });
    L.u.swap(L.tmp);
}

void smooth(Level& L, Smoother s, int sweeps, bool reverse, double v0, double v1) {
    for (int n = 0; n < sweeps; ++n) {
        if (s == Smoother::jacobi) {
            relax_jacobi(L, v0, v1);
        } else {
            relax_rb(L, reverse ? 1 : 0, v0, v1);
            relax_rb(L, reverse ? 0 : 1, v0, v1);
        }
    }
}

// r = f - L u; returns sum of r^2.
double residual(Level& L, double v0, double v1) {
    const std::vector<double> vlo(std::size_t(L.nx), v0), vhi(std::size_t(L.nx), v1);
    return box_sum(L.planes, [&](const Box& b) {
        double acc = 0.0;
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j) {
                const Level::Row R = L.row(j, k, vlo.data(), vhi.data());
                const std::size_t c = L.lin(0, j, k);
                for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                    const double rr = L.f[c + i] - (R.off(i) - L.dg[c + i] * L.u[c + i]);
                    L.r[c + i] = rr;
                    acc += rr * rr;
                }
            }
        return acc;
    });
}

void restrict_residual(const Level& F, Level& C) {
    const auto [rx, ry, rz] = F.ratio;
    const double w = 1.0 / (rx * ry * rz);
    for_each_box(C.tiles, [&](const Box& b) {
        for (int K = b.lo[2]; K < b.hi[2]; ++K)
            for (int J = b.lo[1]; J < b.hi[1]; ++J)
                for (int I = b.lo[0]; I < b.hi[0]; ++I) {
                    double s = 0.0;
                    for (int dk = 0; dk < rz; ++dk)
                        for (int dj = 0; dj < ry; ++dj)
                            for (int di = 0; di < rx; ++di)
                                s += F.r[F.lin(I * rx + di, J * ry + dj, K * rz + dk)];
                    const std::size_t c = C.lin(I, J, K);
                    C.f[c] = s * w;
                    C.u[c] = 0.0;
                }
    });
}

// Per-axis linear interpolation tables for cell-centered prolongation.
struct Interp {
    std::vector<int> i0, i1;
    std::vector<double> w0, w1;
};

Interp interp_table(int nf, int ratio, bool periodic) {
    Interp t;
    t.i0.resize(std::size_t(nf));
    t.i1.resize(std::size_t(nf));
    t.w0.resize(std::size_t(nf));
    t.w1.resize(std::size_t(nf));
    const int nc = nf / ratio;
    for (int i = 0; i < nf; ++i) {
        const int I = i / ratio;
        auto n = std::size_t(i);
        if (ratio == 1) {
            t.i0[n] = t.i1[n] = I;
            t.w0[n] = 1.0;
            t.w1[n] = 0.0;
            continue;
        }
        int Ia = (i % 2 == 0) ? I - 1 : I + 1;
        t.i0[n] = I;
        t.w0[n] = 0.75;
        t.w1[n] = 0.25;
        if (Ia < 0 || Ia >= nc) {
            if (periodic) {
                Ia = (Ia + nc) % nc;
            } else {
                // Homogeneous Dirichlet face: ghost = -interior.
                Ia = I;
                t.w1[n] = -0.25;
            }
        }
        t.i1[n] = Ia;
    }
    return t;
}

struct Hierarchy {
    std::vector<Level> levels;
    std::vector<Interp> ix, iy, iz;  // per fine level
};

void dense_cholesky(Level& L) {
    const std::size_t n = L.size();
    std::vector<double> A(n * n, 0.0);
    for (int k = 0; k < L.nz; ++k)
        for (int j = 0; j < L.ny; ++j)
            for (int i = 0; i < L.nx; ++i) {
                const std::size_t c = L.lin(i, j, k);
                const int ip = i + 1 == L.nx ? 0 : i + 1, im = i == 0 ? L.nx - 1 : i - 1;
                const int jp = j + 1 == L.ny ? 0 : j + 1, jm = j == 0 ? L.ny - 1 : j - 1;
                A[c * n + c] += L.dg[c];
                A[c * n + L.lin(im, j, k)] -= L.cx[c];
                A[c * n + L.lin(ip, j, k)] -= L.cx[L.lin(ip, j, k)];
                A[c * n + L.lin(i, jm, k)] -= L.cy[c];
                A[c * n + L.lin(i, jp, k)] -= L.cy[L.lin(i, jp, k)];
                if (k > 0) A[c * n + c - L.nxy()] -= L.cz[c];
                if (k + 1 < L.nz) A[c * n + c + L.nxy()] -= L.cz[c + L.nxy()];
            }
    for (std::size_t j = 0; j < n; ++j) {
        double d = A[j * n + j];
        for (std::size_t p = 0; p < j; ++p) d -= A[j * n + p] * A[j * n + p];
        if (!(d > 0.0)) throw std::runtime_error("poisson: coarse operator not positive definite");
        d = std::sqrt(d);
        A[j * n + j] = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = A[i * n + j];
            for (std::size_t p = 0; p < j; ++p) s -= A[i * n + p] * A[j * n + p];
            A[i * n + j] = s / d;
        }
    }
    L.chol = std::move(A);
}

// A u = b with A = -L (homogeneous part); b = boundary terms - f.
void direct_solve(Level& L, double v0, double v1) {
    const std::size_t n = L.size(), nxy = L.nxy();
    std::vector<double> b(n);
    for (std::size_t c = 0; c < n; ++c) b[c] = -L.f[c];
    for (std::size_t c = 0; c < nxy; ++c) {
        b[c] += L.cz[c] * v0;
        b[n - nxy + c] += L.cz[n + c] * v1;
    }
    const auto& A = L.chol;
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t p = 0; p < i; ++p) s -= A[i * n + p] * b[p];
        b[i] = s / A[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t p = ii + 1; p < n; ++p) s -= A[p * n + ii] * b[p];
        b[ii] = s / A[ii * n + ii];
    }
    L.u = std::move(b);
}

}  // namespace

struct PoissonSolver::Impl {
    MultigridConfig cfg;
    GridPtr grid;
    Hierarchy h;
    bool direct_bottom = false;

    // Coarse shifts are child means, like the residual restriction.
    void set_shift(const ScalarField* s) {
        auto& lv = h.levels;
        Level& L0 = lv.front();
        for (int k = 0; k < L0.nz; ++k)
            for (int j = 0; j < L0.ny; ++j)
                for (int i = 0; i < L0.nx; ++i) {
                    const double v = s ? (*s)(i, j, k) : 0.0;
                    if (!(v >= 0.0)) throw std::invalid_argument("poisson: shift must be non-negative");
                    L0.sig[L0.lin(i, j, k)] = v;
                }
        for (std::size_t l = 0; l + 1 < lv.size(); ++l) {
            const Level& F = lv[l];
            Level& C = lv[l + 1];
            const auto [rx, ry, rz] = F.ratio;
            const double w = 1.0 / (rx * ry * rz);
            for (int K = 0; K < C.nz; ++K)
                for (int J = 0; J < C.ny; ++J)
                    for (int I = 0; I < C.nx; ++I) {
                        double acc = 0.0;
                        for (int dk = 0; dk < rz; ++dk)
                            for (int dj = 0; dj < ry; ++dj)
                                for (int di = 0; di < rx; ++di)
                                    acc += F.sig[F.lin(I * rx + di, J * ry + dj, K * rz + dk)];
                        C.sig[C.lin(I, J, K)] = acc * w;
                    }
        }
        for (Level& L : lv)
            for (std::size_t n = 0; n < L.size(); ++n) L.dg[n] = L.dg0[n] + L.sig[n];
        if (direct_bottom) dense_cholesky(lv.back());
    }

    void vcycle(std::size_t l, double v0, double v1) {
        Level& L = h.levels[l];
        if (l + 1 == h.levels.size()) {
            if (direct_bottom) {
                direct_solve(L, v0, v1);
            } else {
                smooth(L, cfg.smoother, cfg.bottom_iterations, false, v0, v1);
            }
            return;
        }
        smooth(L, cfg.smoother, cfg.pre_smooth, false, v0, v1);
        residual(L, v0, v1);
        Level& C = h.levels[l + 1];
        restrict_residual(L, C);
        vcycle(l + 1, 0.0, 0.0);
        const Interp &tx = h.ix[l], &ty = h.iy[l], &tz = h.iz[l];
        for_each_box(L.tiles, [&](const Box& b) {
            for (int k = b.lo[2]; k < b.hi[2]; ++k) {
                const auto kz = std::size_t(k);
                for (int j = b.lo[1]; j < b.hi[1]; ++j) {
                    const auto jy = std::size_t(j);
                    for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                        const auto ixx = std::size_t(i);
                        auto at = [&](int I, int J, int K) { return C.u[C.lin(I, J, K)]; };
                        const double e =
                            tz.w0[kz] * (ty.w0[jy] * (tx.w0[ixx] * at(tx.i0[ixx], ty.i0[jy], tz.i0[kz]) +
                                                      tx.w1[ixx] * at(tx.i1[ixx], ty.i0[jy], tz.i0[kz])) +
                                         ty.w1[jy] * (tx.w0[ixx] * at(tx.i0[ixx], ty.i1[jy], tz.i0[kz]) +
                                                      tx.w1[ixx] * at(tx.i1[ixx], ty.i1[jy], tz.i0[kz]))) +
                            tz.w1[kz] * (ty.w0[jy] * (tx.w0[ixx] * at(tx.i0[ixx], ty.i0[jy], tz.i1[kz]) +
                                                      tx.w1[ixx] * at(tx.i1[ixx], ty.i0[jy], tz.i1[kz])) +
                                         ty.w1[jy] * (tx.w0[ixx] * at(tx.i0[ixx], ty.i1[jy], tz.i1[kz]) +
                                                      tx.w1[ixx] * at(tx.i1[ixx], ty.i1[jy], tz.i1[kz])));
                        L.u[L.lin(i, j, k)] += e;
                    }
                }
            }
        });
        smooth(L, cfg.smoother, cfg.post_smooth, true, v0, v1);
    }
};

PoissonSolver::PoissonSolver(const ScalarField& eps, MultigridConfig cfg)
    : impl_(std::make_unique<Impl>()) {
    cfg.validate();
    impl_->cfg = cfg;
    impl_->grid = eps.grid_ptr();
    const Grid& g = eps.grid();
    if (g.nx() % 2 || g.ny() % 2)
        throw std::invalid_argument("poisson: nx and ny must be even (red-black periodic coloring)");

    auto& levels = impl_->h.levels;
    Level L0;
    L0.nx = g.nx();
    L0.ny = g.ny();
    L0.nz = g.nz();
    L0.hx = g.dx();
    L0.hy = g.dy();
    L0.hz = g.dz();
    L0.tiles = g.tiles();
    L0.planes = g.planes();
    L0.bx.resize(L0.size());
    L0.by.resize(L0.size());
    L0.bz.resize(L0.nxy() * (L0.nz + 1));
    for (int k = 0; k < L0.nz; ++k)
        for (int j = 0; j < L0.ny; ++j)
            for (int i = 0; i < L0.nx; ++i) {
                const double e = eps(i, j, k);
                if (!(e > 0.0)) throw std::invalid_argument("poisson: eps must be positive");
                const int im = i == 0 ? L0.nx - 1 : i - 1, jm = j == 0 ? L0.ny - 1 : j - 1;
                L0.bx[L0.lin(i, j, k)] = harmonic(eps(im, j, k), e);
                L0.by[L0.lin(i, j, k)] = harmonic(eps(i, jm, k), e);
                L0.bz[L0.lin(i, j, k)] = k == 0 ? e : harmonic(eps(i, j, k - 1), e);
            }
    for (int j = 0; j < L0.ny; ++j)
        for (int i = 0; i < L0.nx; ++i)
            L0.bz[L0.nxy() * L0.nz + L0.lin(i, j, 0)] = eps(i, j, L0.nz - 1);
    L0.build_stencil();
    levels.push_back(std::move(L0));

    const int cs = cfg.coarsest_size;
    for (;;) {
        Level& F = levels.back();
        const int rx = (F.nx > cs && F.nx % 4 == 0) ? 2 : 1;
        const int ry = (F.ny > cs && F.ny % 4 == 0) ? 2 : 1;
        const int rz = (F.nz > cs && F.nz % 2 == 0) ? 2 : 1;
        if (rx == 1 && ry == 1 && rz == 1) break;
        F.ratio = {rx, ry, rz};
        Level C;
        C.nx = F.nx / rx;
        C.ny = F.ny / ry;
        C.nz = F.nz / rz;
        C.hx = F.hx * rx;
        C.hy = F.hy * ry;
        C.hz = F.hz * rz;
        C.tiles = make_tiles({C.nx, C.ny, C.nz}, g.max_tile_cells());
        C.planes = plane_boxes({C.nx, C.ny, C.nz});
        C.bx.resize(C.size());
        C.by.resize(C.size());
        C.bz.resize(C.nxy() * (C.nz + 1));
        for (int K = 0; K < C.nz; ++K)
            for (int J = 0; J < C.ny; ++J)
                for (int I = 0; I < C.nx; ++I) {
                    double sx = 0.0, sy = 0.0;
                    for (int dk = 0; dk < rz; ++dk) {
                        for (int dj = 0; dj < ry; ++dj) sx += F.bx[F.lin(I * rx, J * ry + dj, K * rz + dk)];
                        for (int di = 0; di < rx; ++di) sy += F.by[F.lin(I * rx + di, J * ry, K * rz + dk)];
                    }
                    C.bx[C.lin(I, J, K)] = sx / (ry * rz);
                    C.by[C.lin(I, J, K)] = sy / (rx * rz);
                }
        for (int K = 0; K <= C.nz; ++K)
            for (int J = 0; J < C.ny; ++J)
                for (int I = 0; I < C.nx; ++I) {
                    double s = 0.0;
                    for (int dj = 0; dj < ry; ++dj)
                        for (int di = 0; di < rx; ++di)
                            s += F.bz[F.nxy() * std::size_t(K * rz) + F.lin(I * rx + di, J * ry + dj, 0)];
                    C.bz[C.nxy() * std::size_t(K) + C.lin(I, J, 0)] = s / (rx * ry);
                }
        C.build_stencil();
        impl_->h.ix.push_back(interp_table(F.nx, rx, true));
        impl_->h.iy.push_back(interp_table(F.ny, ry, true));
        impl_->h.iz.push_back(interp_table(F.nz, rz, false));
        levels.push_back(std::move(C));
    }
    if (cfg.bottom == BottomSolver::direct_small && long(levels.back().size()) <= kDirectLimit) {
        dense_cholesky(levels.back());
        impl_->direct_bottom = true;
    }
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

void PoissonSolver::set_shift(const ScalarField* sigma) {
    if (sigma && !sigma->grid().same_shape(*impl_->grid))
        throw std::invalid_argument("poisson: shift grid mismatch");
    impl_->set_shift(sigma);
}

const MultigridConfig& PoissonSolver::config() const { return impl_->cfg; }
int PoissonSolver::num_levels() const { return int(impl_->h.levels.size()); }
std::array<int, 3> PoissonSolver::level_shape(int level) const {
    const Level& L = impl_->h.levels.at(std::size_t(level));
    return {L.nx, L.ny, L.nz};
}

SolveStats PoissonSolver::solve(const ScalarField& rhs, double v_lo, double v_hi, double tol,
                                ScalarField& phi) {
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("poisson: tol must lie in (0, 1)");
    const Grid& g = *impl_->grid;
    if (!rhs.grid().same_shape(g) || !phi.grid().same_shape(g))
        throw std::invalid_argument("poisson: field grid mismatch");
    Level& L = impl_->h.levels.front();
    for (int k = 0; k < L.nz; ++k)
        for (int j = 0; j < L.ny; ++j)
            for (int i = 0; i < L.nx; ++i) {
                const std::size_t c = L.lin(i, j, k);
                L.u[c] = phi(i, j, k);
                L.f[c] = rhs(i, j, k);
            }
    const double fnorm = std::sqrt(box_sum(L.planes, [&](const Box& b) {
        double acc = 0.0;
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) acc += L.f[L.lin(i, j, k)] * L.f[L.lin(i, j, k)];
        return acc;
    }));
    const double r0 = std::sqrt(residual(L, v_lo, v_hi));
    const double denom = std::max({fnorm, r0, 1e-30});
    SolveStats st;
    st.rel_residual = r0 / denom;
    st.history.push_back(st.rel_residual);
    while (st.rel_residual > tol) {
        if (st.vcycles >= impl_->cfg.max_vcycles)
            throw SolverError("poisson: no convergence after " + std::to_string(st.vcycles) +
                                  " V-cycles, relative residual " + std::to_string(st.rel_residual),
                              st.rel_residual);
        impl_->vcycle(0, v_lo, v_hi);
        ++st.vcycles;
        st.rel_residual = std::sqrt(residual(L, v_lo, v_hi)) / denom;
        st.history.push_back(st.rel_residual);
        if (!std::isfinite(st.rel_residual))
            throw SolverError("poisson: residual is not finite", st.rel_residual);
    }
    for (int k = 0; k < L.nz; ++k)
        for (int j = 0; j < L.ny; ++j)
            for (int i = 0; i < L.nx; ++i) phi(i, j, k) = L.u[L.lin(i, j, k)];
    exchange_ghosts(phi, DirichletZ{v_lo, v_hi});
    return st;
}

ScalarField solve(const PoissonProblem& problem, const MultigridConfig& cfg,
                  const ScalarField& phi_guess, SolveStats* stats) {
    if (!problem.eps_field || !problem.rhs) throw std::invalid_argument("poisson: incomplete problem");
    PoissonSolver s(*problem.eps_field, cfg);
    ScalarField phi = phi_guess;
    SolveStats st = s.solve(*problem.rhs, problem.bc_lo_z, problem.bc_hi_z, problem.tol, phi);
    if (stats) *stats = st;
    return phi;
}

ScalarField assemble_rhs(const ScalarField& P, const ScalarField& rho, const DeviceStack& stack) {
    const Grid& g = stack.grid();
    if (!P.grid().same_shape(g) || !rho.grid().same_shape(g))
        throw std::invalid_argument("assemble_rhs: field grid mismatch");
    const int nz = g.nz();
    for (int k = 0; k < nz; ++k) {
        const bool fe = stack.in_fe(k);
        const bool sc = stack.material_at(k) == Material::semiconductor;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                if (!fe && P(i, j, k) != 0.0)
                    throw std::invalid_argument("assemble_rhs: nonzero P outside the ferroelectric (k=" +
                                                std::to_string(k) + ")");
                if (!sc && rho(i, j, k) != 0.0)
                    throw std::invalid_argument("assemble_rhs: nonzero rho outside the semiconductor (k=" +
                                                std::to_string(k) + ")");
            }
    }
    // Face weights: P_face(k-1/2) = wl[k] P(k-1) + wu[k] P(k).
    std::vector<double> wl(std::size_t(nz + 1)), wu(std::size_t(nz + 1));
    wl[0] = 0.0;
    wu[0] = 1.0;
    wl[std::size_t(nz)] = 1.0;
    wu[std::size_t(nz)] = 0.0;
    for (int k = 1; k < nz; ++k) {
        const double el = stack.eps_at(k - 1), eu = stack.eps_at(k);
        wl[std::size_t(k)] = eu / (el + eu);
        wu[std::size_t(k)] = el / (el + eu);
    }
    ScalarField out(P.grid_ptr());
    const double idz = 1.0 / g.dz();
    for_each_tile(g, [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k) {
            const auto kk = std::size_t(k);
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                    const double pc = P(i, j, k);
                    const double plo = k > 0 ? wl[kk] * P(i, j, k - 1) + wu[kk] * pc : pc;
                    const double phi_ = k + 1 < nz ? wl[kk + 1] * pc + wu[kk + 1] * P(i, j, k + 1) : pc;
                    out(i, j, k) = (phi_ - plo) * idz - rho(i, j, k);
                }
        }
    });
    return out;
}

ScalarField apply_operator(const ScalarField& eps, const ScalarField& phi_in, double v_lo,
                           double v_hi) {
    const Grid& g = eps.grid();
    ScalarField phi = phi_in;
    exchange_ghosts(phi, DirichletZ{v_lo, v_hi});
    ScalarField e = eps;
    // Ghost permittivity equals the adjacent cell, so boundary faces carry eps_cell.
    for (int j = -1; j <= g.ny(); ++j)
        for (int i = -1; i <= g.nx(); ++i) {
            const int ii = (i + g.nx()) % g.nx(), jj = (j + g.ny()) % g.ny();
            for (int k = 0; k < g.nz(); ++k) e(i, j, k) = eps(ii, jj, k);
            e(i, j, -1) = eps(ii, jj, 0);
            e(i, j, g.nz()) = eps(ii, jj, g.nz() - 1);
        }
    ScalarField out(eps.grid_ptr());
    const double ix = 1.0 / (g.dx() * g.dx()), iy = 1.0 / (g.dy() * g.dy()),
                 iz = 1.0 / (g.dz() * g.dz());
    for_each_tile(g, [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                    const double c = phi(i, j, k), ec = e(i, j, k);
                    double s = ix * (harmonic(e(i + 1, j, k), ec) * (phi(i + 1, j, k) - c) -
                                     harmonic(e(i - 1, j, k), ec) * (c - phi(i - 1, j, k)));
                    s += iy * (harmonic(e(i, j + 1, k), ec) * (phi(i, j + 1, k) - c) -
                               harmonic(e(i, j - 1, k), ec) * (c - phi(i, j - 1, k)));
                    s += iz * (harmonic(e(i, j, k + 1), ec) * (phi(i, j, k + 1) - c) -
                               harmonic(e(i, j, k - 1), ec) * (c - phi(i, j, k - 1)));
                    out(i, j, k) = s;
                }
    });
    return out;
}

ElectricField electric_field(const ScalarField& phi) {
    const Grid& g = phi.grid();
    ElectricField E{ScalarField(phi.grid_ptr()), ScalarField(phi.grid_ptr()),
                    ScalarField(phi.grid_ptr())};
    const double hx = 0.5 / g.dx(), hy = 0.5 / g.dy(), hz = 0.5 / g.dz();
    for_each_tile(g, [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                    E.x(i, j, k) = -(phi(i + 1, j, k) - phi(i - 1, j, k)) * hx;
                    E.y(i, j, k) = -(phi(i, j + 1, k) - phi(i, j - 1, k)) * hy;
                    E.z(i, j, k) = -(phi(i, j, k + 1) - phi(i, j, k - 1)) * hz;
                }
    });
    return E;
}

std::vector<double> layered_potential(const std::vector<double>& eps_z, double dz, double v_lo,
                                      double v_hi) {
    const std::size_t nz = eps_z.size();
    // Constant flux q through a chain of face conductances eps_f / dz.
    std::vector<double> res(nz + 1);  // resistance of face k-1/2
    res[0] = 0.5 * dz / eps_z[0];
    res[nz] = 0.5 * dz / eps_z[nz - 1];
    for (std::size_t k = 1; k < nz; ++k) res[k] = dz / harmonic(eps_z[k - 1], eps_z[k]);
    double total = 0.0;
    for (double r : res) total += r;
    const double q = (v_hi - v_lo) / total;
    std::vector<double> phi(nz);
    double v = v_lo;
    for (std::size_t k = 0; k < nz; ++k) {
        v += q * res[k];
        phi[k] = v;
    }
    return phi;
}

}  // namespace ferrodyn
