#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace ferrodyn {

// Half-open index box [lo, hi).
struct Box {
    std::array<int, 3> lo{};
    std::array<int, 3> hi{};

    long cells() const {
        return long(hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
    }
};

class Grid {
public:
    static constexpr int nghost = 1;

    Grid(int nx, int ny, int nz, double dx, double dy, double dz, long max_tile_cells);

    int nx() const { return n_[0]; }
    int ny() const { return n_[1]; }
    int nz() const { return n_[2]; }
    int n(int axis) const { return n_[axis]; }
    double dx() const { return d_[0]; }
    double dy() const { return d_[1]; }
    double dz() const { return d_[2]; }
    double d(int axis) const { return d_[axis]; }
    double Lx() const { return n_[0] * d_[0]; }
    double Ly() const { return n_[1] * d_[1]; }
    double Lz() const { return n_[2] * d_[2]; }
    double cell_volume() const { return d_[0] * d_[1] * d_[2]; }
    long cell_count() const { return long(n_[0]) * n_[1] * n_[2]; }
    long max_tile_cells() const { return max_tile_cells_; }

    double x_center(int i) const { return (i + 0.5) * d_[0]; }
    double y_center(int j) const { return (j + 0.5) * d_[1]; }
    double z_center(int k) const { return (k + 0.5) * d_[2]; }

    const std::vector<Box>& tiles() const { return tiles_; }
    // One box per z plane; reductions run over these so their summation order
    // depends on neither the tiling nor the thread count.
    const std::vector<Box>& planes() const { return planes_; }

    bool same_shape(const Grid& o) const { return n_ == o.n_ && d_ == o.d_; }

private:
    std::array<int, 3> n_;
    std::array<double, 3> d_;
    long max_tile_cells_;
    std::vector<Box> tiles_;
    std::vector<Box> planes_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Recursive bisection of the longest axis (ties x, y, z) until every box holds
// at most budget cells.
std::vector<Box> make_tiles(std::array<int, 3> n, long budget);

GridPtr create_grid(int nx, int ny, int nz, double dx, double dy, double dz,
                    long max_tile_cells = 32768);

std::vector<Box> plane_boxes(std::array<int, 3> n);

// Same shape, different tiling.
GridPtr retile(const Grid& g, long max_tile_cells);

class ScalarField {
public:
    explicit ScalarField(GridPtr grid, double value = 0.0);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    std::size_t index(int i, int j, int k) const {
        return std::size_t(i + 1) + sx_ * (std::size_t(j + 1) + sy_ * std::size_t(k + 1));
    }
    double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

    std::size_t stride_y() const { return sx_; }
    std::size_t stride_z() const { return sx_ * sy_; }

    std::span<double> raw() { return data_; }
    std::span<const double> raw() const { return data_; }

    void fill(double v);
    // Interior cells only.
    bool all_finite() const;
    double max_abs() const;

    // Interior values in (i fastest, then j, then k) order.
    std::vector<double> interior() const;
    void set_interior(std::span<const double> values);

private:
    GridPtr grid_;
    std::size_t sx_, sy_;
    std::vector<double> data_;
};

struct PeriodicZ {};
struct DirichletZ {
    double lo = 0.0;
    double hi = 0.0;
};
// Linear extrapolation: ghost = 2 f_boundary - f_next.
struct OneSidedZ {};
using ZRule = std::variant<PeriodicZ, DirichletZ, OneSidedZ>;

// x/y ghosts get periodic images; z ghosts follow the rule.  Dirichlet places the
// boundary value on the domain face: ghost = 2 V - interior.
void exchange_ghosts(ScalarField& f, const ZRule& rule);

double plane_average(const ScalarField& f, int k);

// Midpoint rule over cells where mask is nonzero (all cells without a mask).
double volume_integral(const ScalarField& f, const ScalarField* mask = nullptr);

// Threads used by the tile loops; 0 keeps the OpenMP default.
void set_num_threads(int n);
int num_threads();

// Runs fn(box) for every box, concurrently when OpenMP is available.
template <class F>
void for_each_box(const std::vector<Box>& boxes, F&& fn) {
    const long nt = long(boxes.size());
#pragma omp parallel for schedule(static) if (nt > 1)
    for (long t = 0; t < nt; ++t) fn(boxes[std::size_t(t)]);
}

// Per-box partial results combined serially in box order, so the result is
// bitwise independent of the thread count.
template <class F>
double box_sum(const std::vector<Box>& boxes, F&& fn) {
    const long nt = long(boxes.size());
    std::vector<double> partial(boxes.size(), 0.0);
#pragma omp parallel for schedule(static) if (nt > 1)
    for (long t = 0; t < nt; ++t) partial[std::size_t(t)] = fn(boxes[std::size_t(t)]);
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

template <class F>
double box_max(const std::vector<Box>& boxes, F&& fn) {
    const long nt = long(boxes.size());
    std::vector<double> partial(boxes.size(), 0.0);
#pragma omp parallel for schedule(static) if (nt > 1)
    for (long t = 0; t < nt; ++t) partial[std::size_t(t)] = fn(boxes[std::size_t(t)]);
    double m = 0.0;
    for (double p : partial) m = p > m ? p : m;
    return m;
}

template <class F>
void for_each_tile(const Grid& g, F&& fn) {
    for_each_box(g.tiles(), std::forward<F>(fn));
}
// Reductions over the plane boxes (see Grid::planes).
template <class F>
double tile_sum(const Grid& g, F&& fn) {
    return box_sum(g.planes(), std::forward<F>(fn));
}
template <class F>
double tile_max(const Grid& g, F&& fn) {
    return box_max(g.planes(), std::forward<F>(fn));
}

}  // namespace ferrodyn
