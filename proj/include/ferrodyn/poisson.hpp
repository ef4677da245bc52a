#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ferrodyn/grid.hpp"
#include "ferrodyn/materials.hpp"

namespace ferrodyn {

enum class BottomSolver { smoother_iterations, direct_small };
enum class Smoother { rbgs, jacobi };

struct MultigridConfig {
    int pre_smooth = 2;
    int post_smooth = 2;
    int max_vcycles = 100;
    BottomSolver bottom = BottomSolver::smoother_iterations;
    int bottom_iterations = 64;
    int coarsest_size = 4;
    // Damped Jacobi keeps y-uniform data bitwise y-uniform; red-black does not.
    Smoother smoother = Smoother::rbgs;

    void validate() const;
    bool operator==(const MultigridConfig&) const = default;
};

struct PoissonProblem {
    const ScalarField* eps_field = nullptr;  // eps0 * eps_r, F/m
    const ScalarField* rhs = nullptr;        // dP/dz - rho, C/m^3
    double bc_lo_z = 0.0;                    // V at z_min
    double bc_hi_z = 0.0;                    // V at z_max
    double tol = 1e-10;
};

struct SolveStats {
    int vcycles = 0;
    double rel_residual = 0.0;
    std::vector<double> history;  // relative residual after each cycle, starting at cycle 0
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Cell-centered geometric multigrid for div(eps grad phi) = rhs, periodic in x/y
// and Dirichlet on the z faces.  The hierarchy is built once per permittivity
// field and reused across solves.
class PoissonSolver {
public:
    explicit PoissonSolver(const ScalarField& eps, MultigridConfig cfg = {});
    ~PoissonSolver();
    PoissonSolver(PoissonSolver&&) noexcept;
    PoissonSolver& operator=(PoissonSolver&&) noexcept;

    // phi holds the initial guess on entry and the solution (ghosts filled with
    // the Dirichlet rule) on exit.  Throws SolverError after max_vcycles.
    SolveStats solve(const ScalarField& rhs, double v_lo, double v_hi, double tol,
                     ScalarField& phi);

    // Solve div(eps grad phi) - sigma phi = rhs from now on; sigma >= 0 per
    // cell.  nullptr restores the plain operator.
    void set_shift(const ScalarField* sigma);

    const MultigridConfig& config() const;
    int num_levels() const;
    std::array<int, 3> level_shape(int level) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

ScalarField solve(const PoissonProblem& problem, const MultigridConfig& cfg,
                  const ScalarField& phi_guess, SolveStats* stats = nullptr);

// dP/dz - rho.  dP/dz is the face-flux divergence of P with face values
// P_f = (eps_lo P_hi + eps_hi P_lo) / (eps_lo + eps_hi) (the plain average inside
// one material) and the adjacent cell value on the domain z faces.
ScalarField assemble_rhs(const ScalarField& P, const ScalarField& rho, const DeviceStack& stack);

// 7-point flux form with harmonic-mean face permittivity.
ScalarField apply_operator(const ScalarField& eps, const ScalarField& phi, double v_lo,
                           double v_hi);

struct ElectricField {
    ScalarField x, y, z;
};

// Central differences; phi ghosts must already be filled.
ElectricField electric_field(const ScalarField& phi);

// 1D layered solution of the zero-charge problem with the same discretization.
std::vector<double> layered_potential(const std::vector<double>& eps_z, double dz, double v_lo,
                                      double v_hi);

}  // namespace ferrodyn
