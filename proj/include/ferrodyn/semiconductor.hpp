#pragma once

#include "ferrodyn/grid.hpp"
#include "ferrodyn/materials.hpp"

namespace ferrodyn {

// Normalized complete Fermi-Dirac integral of order 1/2,
// (2/sqrt(pi)) int_0^inf sqrt(x) / (1 + exp(x - eta)) dx, via Bednarczyk's closed
// form F = 1 / (exp(-eta) + xi(eta)).  eta is clamped to [-50, 50].
double fermi_half(double eta);

class ChargeModel {
public:
    explicit ChargeModel(SemiconductorParams p);

    const SemiconductorParams& params() const { return p_; }
    double kT() const { return kT_; }

    // Electrons: Nc F((e phi - Ec) / kT).  Holes: Nv F((Ev - e phi) / kT).
    double electron_density(double phi) const;
    double hole_density(double phi) const;
    // e (p - n + Nd - Na), C/m^3.
    double charge(double phi) const;
    // d charge / d phi (central difference, step 1e-3 kT/e); never positive.
    double charge_slope(double phi) const;

private:
    SemiconductorParams p_;
    double kT_;
};

double electron_density(double phi, const ChargeModel& model);
double hole_density(double phi, const ChargeModel& model);

// rho on cells where sc_mask is nonzero, zero elsewhere.
ScalarField charge_density(const ScalarField& phi, const ChargeModel& model,
                           const ScalarField& sc_mask);
// Same, restricted to the z-range [k_lo, k_hi) (the layered fast path).
void charge_density_layer(const ScalarField& phi, const ChargeModel& model, int k_lo, int k_hi,
                          ScalarField& rho);

}  // namespace ferrodyn
