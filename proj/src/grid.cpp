#include "ferrodyn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ferrodyn {

namespace {

void bisect(const Box& b, long budget, std::vector<Box>& out) {
    if (b.cells() <= budget) {
        out.push_back(b);
        return;
    }
    int axis = 0;
    for (int a = 1; a < 3; ++a)
        if (b.hi[a] - b.lo[a] > b.hi[axis] - b.lo[axis]) axis = a;
    const int len = b.hi[axis] - b.lo[axis];
    if (len < 2) {
        out.push_back(b);
        return;
    }
    Box left = b, right = b;
    left.hi[axis] = b.lo[axis] + len / 2;
    right.lo[axis] = left.hi[axis];
    bisect(left, budget, out);
    bisect(right, budget, out);
}

}  // namespace

std::vector<Box> make_tiles(std::array<int, 3> n, long budget) {
    std::vector<Box> out;
    bisect(Box{{0, 0, 0}, n}, budget, out);
    return out;
}

Grid::Grid(int nx, int ny, int nz, double dx, double dy, double dz, long max_tile_cells)
    : n_{nx, ny, nz}, d_{dx, dy, dz}, max_tile_cells_(max_tile_cells) {
    const char* names[3] = {"nx", "ny", "nz"};
    for (int a = 0; a < 3; ++a) {
        if (n_[a] < 4)
            throw std::invalid_argument(std::string("grid: ") + names[a] + " must be >= 4, got " +
                                        std::to_string(n_[a]));
        if (!(d_[a] > 0.0) || !std::isfinite(d_[a]))
            throw std::invalid_argument("grid: cell sizes must be positive and finite");
    }
    if (max_tile_cells < 64)
        throw std::invalid_argument("grid: max_tile_cells must be >= 64");
    tiles_ = make_tiles(n_, max_tile_cells);
    planes_ = plane_boxes(n_);
}

GridPtr create_grid(int nx, int ny, int nz, double dx, double dy, double dz,
                    long max_tile_cells) {
    return std::make_shared<const Grid>(nx, ny, nz, dx, dy, dz, max_tile_cells);
}

std::vector<Box> plane_boxes(std::array<int, 3> n) {
    std::vector<Box> out;
    out.reserve(std::size_t(n[2]));
    for (int k = 0; k < n[2]; ++k) out.push_back(Box{{0, 0, k}, {n[0], n[1], k + 1}});
    return out;
}

GridPtr retile(const Grid& g, long max_tile_cells) {
    return create_grid(g.nx(), g.ny(), g.nz(), g.dx(), g.dy(), g.dz(), max_tile_cells);
}

ScalarField::ScalarField(GridPtr grid, double value)
    : grid_(std::move(grid)),
      sx_(std::size_t(grid_->nx() + 2)),
      sy_(std::size_t(grid_->ny() + 2)),
      data_(sx_ * sy_ * std::size_t(grid_->nz() + 2), value) {}

void ScalarField::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool ScalarField::all_finite() const {
    const Grid& g = *grid_;
    return tile_sum(g, [&](const Box& b) {
               for (int k = b.lo[2]; k < b.hi[2]; ++k)
                   for (int j = b.lo[1]; j < b.hi[1]; ++j)
                       for (int i = b.lo[0]; i < b.hi[0]; ++i)
                           if (!std::isfinite((*this)(i, j, k))) return 1.0;
               return 0.0;
           }) == 0.0;
}

double ScalarField::max_abs() const {
    return tile_max(*grid_, [&](const Box& b) {
        double m = 0.0;
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) m = std::max(m, std::abs((*this)(i, j, k)));
        return m;
    });
}

std::vector<double> ScalarField::interior() const {
    const Grid& g = *grid_;
    std::vector<double> out;
    out.reserve(std::size_t(g.cell_count()));
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) out.push_back((*this)(i, j, k));
    return out;
}

void ScalarField::set_interior(std::span<const double> values) {
    const Grid& g = *grid_;
    if (long(values.size()) != g.cell_count())
        throw std::invalid_argument("set_interior: size mismatch");
    std::size_t n = 0;
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) (*this)(i, j, k) = values[n++];
}

void exchange_ghosts(ScalarField& f, const ZRule& rule) {
    const Grid& g = f.grid();
    const int nx = g.nx(), ny = g.ny(), nz = g.nz();
    // x then y, so y ghost rows pick up the already-filled x ghosts (edges/corners).
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j) {
            f(-1, j, k) = f(nx - 1, j, k);
            f(nx, j, k) = f(0, j, k);
        }
    for (int k = 0; k < nz; ++k)
        for (int i = -1; i <= nx; ++i) {
            f(i, -1, k) = f(i, ny - 1, k);
            f(i, ny, k) = f(i, 0, k);
        }
    for (int j = -1; j <= ny; ++j)
        for (int i = -1; i <= nx; ++i) {
            double lo, hi;
            if (std::holds_alternative<PeriodicZ>(rule)) {
                lo = f(i, j, nz - 1);
                hi = f(i, j, 0);
            } else if (const auto* d = std::get_if<DirichletZ>(&rule)) {
                lo = 2.0 * d->lo - f(i, j, 0);
                hi = 2.0 * d->hi - f(i, j, nz - 1);
            } else {
                lo = 2.0 * f(i, j, 0) - f(i, j, 1);
                hi = 2.0 * f(i, j, nz - 1) - f(i, j, nz - 2);
            }
            f(i, j, -1) = lo;
            f(i, j, nz) = hi;
        }
}

double plane_average(const ScalarField& f, int k) {
    const Grid& g = f.grid();
    if (k < 0 || k >= g.nz())
        throw std::out_of_range("plane_average: k=" + std::to_string(k) + " outside [0, nz)");
    const double s = tile_sum(g, [&](const Box& b) {
        if (k < b.lo[2] || k >= b.hi[2]) return 0.0;
        double acc = 0.0;
        for (int j = b.lo[1]; j < b.hi[1]; ++j)
            for (int i = b.lo[0]; i < b.hi[0]; ++i) acc += f(i, j, k);
        return acc;
    });
    return s / (double(g.nx()) * g.ny());
}

double volume_integral(const ScalarField& f, const ScalarField* mask) {
    const Grid& g = f.grid();
    if (mask && !mask->grid().same_shape(g))
        throw std::invalid_argument("volume_integral: mask grid mismatch");
    const double s = tile_sum(g, [&](const Box& b) {
        double acc = 0.0;
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i)
                    if (!mask || (*mask)(i, j, k) != 0.0) acc += f(i, j, k);
        return acc;
    });
    return s * g.cell_volume();
}

void set_num_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int num_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace ferrodyn
