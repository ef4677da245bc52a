#pragma once

#include <vector>

#include "ferrodyn/config.hpp"
#include "ferrodyn/grid.hpp"
#include "ferrodyn/materials.hpp"

namespace ferrodyn {

double landau_density(double P, const FerroelectricParams& fe);
// d f_Land / dP = alpha P + beta P^3 + gamma P^5
double landau_derivative(double P, const FerroelectricParams& fe);
// Positive root of gamma u^2 + beta u + alpha = 0, square-rooted.
double spontaneous_polarization(const FerroelectricParams& fe);

// Copy of P (zero outside the ferroelectric) whose x/y ghosts hold periodic
// images and whose two planes just outside the FE layer hold the boundary
// closure ghosts.  The closure is the 3-point one-sided stencil through the face
// value P_b and the first two FE cells:
//   dP/dn (face) = (-8 P_b + 9 P0 - P1) / (3h),   n pointing into the FE
//   ghost        = (8 P_b - 6 P0 + P1) / 3
// with P_b = lambda (9 P0 - P1) / (3h + 8 lambda) for lambda dP/dn = P,
// P_b = (9 P0 - P1) / 8 for dP/dn = 0 and P_b = 0 for the zero condition.
ScalarField apply_polarization_bc(const ScalarField& P, const PolarizationBC& bc,
                                  const DeviceStack& stack);

// Boundary-face values P_b (nx*ny each, i fastest) at the bottom and top FE faces.
struct FaceValues {
    std::vector<double> lo, hi;
};
FaceValues polarization_face_values(const ScalarField& P, const PolarizationBC& bc,
                                    const DeviceStack& stack);

// z-derivative of phi on cell k built from face potentials,
//   phi_f = (eps_lo phi_lo + eps_hi phi_hi) / (eps_lo + eps_hi),
// and the Dirichlet value on the domain faces; this is minus the adjoint of the
// polarization divergence in assemble_rhs.  phi ghosts must hold the Dirichlet
// extrapolation (PoissonSolver::solve leaves them that way).
double dphi_dz(const ScalarField& phi, const DeviceStack& stack, int i, int j, int k);

// (1/2) sum over the six faces of (1/2) g (face difference)^2; needs the
// closure ghosts of apply_polarization_bc.
ScalarField gradient_density(const ScalarField& Pext, const FerroelectricParams& fe,
                             const DeviceStack& stack);

// f = -Gamma [ f_Land'(P) - g44 Pxx - g44 Pyy - g11 Pzz + dphi/dz ] on FE cells.
ScalarField tdgl_rhs(const ScalarField& P, const ScalarField& phi, const FerroelectricParams& fe,
                     const PolarizationBC& bc, const DeviceStack& stack);

ScalarField euler_step(const ScalarField& P, const ScalarField& f, double dt);
// P + dt/2 f0 + dt/2 f1
ScalarField trapezoidal_step(const ScalarField& P, const ScalarField& f0, const ScalarField& f1,
                             double dt);

struct EnergyBreakdown {
    ScalarField f_land, f_grad, f_elec, F_dw;  // J/m^3
    double F_total = 0.0;                      // J
};

// f_elec = (1/2) P (dphi/dz + dphi_a/dz), phi_a being the charge-free potential
// for the same contact voltages.  For a stack without free charge this makes
// F_total the Lyapunov functional of the coupled flow.
EnergyBreakdown energy_breakdown(const ScalarField& P, const ScalarField& phi,
                                 const DeviceStack& stack, const FerroelectricParams& fe,
                                 const PolarizationBC& bc, double v_lo, double v_hi);

// Functional whose exact P-gradient at fixed phi is -rhs/Gamma (dV-weighted):
// sum (f_Land + f_grad + P dphi/dz) dV over FE cells.
double free_energy_frozen(const ScalarField& P, const ScalarField& phi, const DeviceStack& stack,
                          const FerroelectricParams& fe, const PolarizationBC& bc);

// eps0 eps_fe (Ex^2 + Ey^2) + (1/2) g44 (Px^2 + Py^2) on FE cells, with face-averaged
// squared in-plane derivatives.
ScalarField domain_wall_energy(const ScalarField& P, const ScalarField& phi,
                               const FerroelectricParams& fe, const DeviceStack& stack);

}  // namespace ferrodyn
