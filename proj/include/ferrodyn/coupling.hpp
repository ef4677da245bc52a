#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ferrodyn/config.hpp"
#include "ferrodyn/poisson.hpp"
#include "ferrodyn/semiconductor.hpp"
#include "ferrodyn/tdgl.hpp"

namespace ferrodyn {

struct FixedPointReport {
    int iterations = 0;
    double final_change = 0.0;  // V, mean |dPhi| over all cells
    bool converged = false;
    std::vector<double> changes;  // one entry per iteration
    int vcycles = 0;
};

class FixedPointError : public std::runtime_error {
public:
    FixedPointError(const std::string& what, double change)
        : std::runtime_error(what), final_change_(change) {}
    double final_change() const { return final_change_; }

private:
    double final_change_;
};

// NaN or Inf in the state; carries the step index.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

// Fixed point for div(eps grad phi) = dP/dz - rho(phi).  Owns the multigrid
// hierarchy so repeated solves reuse it.  The lagged scheme stops contracting
// once the Debye length drops below the semiconductor thickness (|V_app| of
// about 1 V for the stock MFISM stack); newton solves
//   div(eps grad phi') + rho'(phi) phi' = dP/dz - rho(phi) + rho'(phi) phi
// instead, with the same stopping rule.
class Coupler {
public:
    Coupler(const DeviceStack& stack, std::optional<ChargeModel> model, MultigridConfig mg,
            double poisson_tol, CouplingScheme scheme = CouplingScheme::lagged);

    // phi: guess on entry, solution on exit (ghosts filled).  rho: charge at the
    // final phi.  Throws FixedPointError past max_iters.
    FixedPointReport solve(const ScalarField& P, ScalarField& phi, ScalarField& rho, double v_lo,
                           double v_hi, double tol, int max_iters);

    const DeviceStack& stack() const { return *stack_; }
    bool has_charge() const { return model_.has_value(); }

private:
    const DeviceStack* stack_;
    std::optional<ChargeModel> model_;
    PoissonSolver solver_;
    double poisson_tol_;
    CouplingScheme scheme_;
    ScalarField shift_;
    int sc_lo_ = 0, sc_hi_ = 0;
};

struct SelfConsistentResult {
    ScalarField phi, rho;
    FixedPointReport report;
};

// One-shot form; builds a solver for this call.
SelfConsistentResult self_consistent_phi(const ScalarField& P, const ScalarField& phi_guess,
                                         const DeviceStack& stack,
                                         const std::optional<ChargeModel>& model, double tol,
                                         int max_iters, double v_lo, double v_hi,
                                         const MultigridConfig& mg = {}, double poisson_tol = 1e-10,
                                         CouplingScheme scheme = CouplingScheme::lagged);

struct SimState {
    double t = 0.0;
    long step_index = 0;
    ScalarField P, phi, rho;
    double v_applied = 0.0;
    int last_fp_iters = 0;
};

// Initial polarization per the config's init block (zero outside the FE layer).
// Random values come from a per-cell hash of (seed, i, j, k) so they do not
// depend on tiling or threads.
ScalarField initial_polarization(const SimConfig& cfg, const DeviceStack& stack);

class Simulation {
public:
    explicit Simulation(const SimConfig& cfg);
    // coupler_ points into stack_
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    const SimConfig& config() const { return cfg_; }
    const DeviceStack& stack() const { return stack_; }
    Coupler& coupler() { return coupler_; }

    // P0 from the init block, phi0 from the fixed point started at zero.
    SimState initialize(double v_applied = 0.0);
    // One time step at state.v_applied (V0 = 0, V1 = V_app).
    void advance(SimState& s);
    // Changes V_app and re-solves phi for the current P.
    void set_voltage(SimState& s, double v_applied);

    EnergyBreakdown energy(const SimState& s) const;

private:
    FixedPointReport fixed_point(const ScalarField& P, ScalarField& phi, ScalarField& rho, double v);

    SimConfig cfg_;
    DeviceStack stack_;
    Coupler coupler_;
};

SimState initialize(const SimConfig& cfg);

}  // namespace ferrodyn
