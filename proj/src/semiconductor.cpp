#include "ferrodyn/semiconductor.hpp"

#include <algorithm>
#include <cmath>

#include "ferrodyn/constants.hpp"

namespace ferrodyn {

double fermi_half(double eta) {
    eta = std::clamp(eta, -50.0, 50.0);
    const double a = eta + 1.0;
    const double nu = eta * eta * eta * eta + 50.0 +
                      33.6 * eta * (1.0 - 0.68 * std::exp(-0.17 * a * a));
    const double xi = 0.75 * std::sqrt(constants::pi) * std::pow(nu, -0.375);
    return 1.0 / (std::exp(-eta) + xi);
}

ChargeModel::ChargeModel(SemiconductorParams p) : p_(p), kT_(constants::k_B * p.T) {
    p_.validate();
}

double ChargeModel::electron_density(double phi) const {
    const double eta = (constants::q_e * phi - p_.Ec) / kT_;
    if (p_.statistics == Statistics::maxwell_boltzmann) return p_.Nc * std::exp(std::min(eta, 50.0));
    return p_.Nc * fermi_half(eta);
}

double ChargeModel::hole_density(double phi) const {
    const double eta = (p_.Ev - constants::q_e * phi) / kT_;
    if (p_.statistics == Statistics::maxwell_boltzmann) return p_.Nv * std::exp(std::min(eta, 50.0));
    return p_.Nv * fermi_half(eta);
}

double ChargeModel::charge(double phi) const {
    return constants::q_e *
           (hole_density(phi) - electron_density(phi) + p_.Nd_plus - p_.Na_minus);
}

double ChargeModel::charge_slope(double phi) const {
    const double h = 1e-3 * kT_ / constants::q_e;
    return std::min(0.0, (charge(phi + h) - charge(phi - h)) / (2.0 * h));
}

double electron_density(double phi, const ChargeModel& model) { return model.electron_density(phi); }
double hole_density(double phi, const ChargeModel& model) { return model.hole_density(phi); }

ScalarField charge_density(const ScalarField& phi, const ChargeModel& model,
                           const ScalarField& sc_mask) {
    ScalarField rho(phi.grid_ptr());
    for_each_tile(phi.grid(), [&](const Box& b) {
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i)
                    rho(i, j, k) = sc_mask(i, j, k) != 0.0 ? model.charge(phi(i, j, k)) : 0.0;
    });
    return rho;
}

void charge_density_layer(const ScalarField& phi, const ChargeModel& model, int k_lo, int k_hi,
                          ScalarField& rho) {
    for_each_tile(phi.grid(), [&](const Box& b) {
        const int k0 = std::max(b.lo[2], k_lo), k1 = std::min(b.hi[2], k_hi);
        for (int k = k0; k < k1; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) rho(i, j, k) = model.charge(phi(i, j, k));
    });
}

}  // namespace ferrodyn
