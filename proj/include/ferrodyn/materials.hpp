#pragma once

#include <string>
#include <vector>

#include "ferrodyn/grid.hpp"

namespace ferrodyn {

struct FerroelectricParams {
    double alpha = -2.5e9;  // V m / C
    double beta = 6.0e10;   // V m^5 / C^3
    double gamma = 1.5e11;  // V m^9 / C^5
    double g11 = 1.0e-9;    // V m^3 / C
    double g44 = 1.0e-9;
    double eps_fe = 24.0;
    double Gamma = 100.0;  // used verbatim as the TDGL rate prefactor

    void validate() const;
    bool operator==(const FerroelectricParams&) const = default;
};

enum class Statistics { fermi_dirac, maxwell_boltzmann };

struct SemiconductorParams {
    double me_eff;  // kg
    double mp_eff;
    double eps_sc = 11.7;
    double Ec;  // J, relative to the Fermi level
    double Ev;
    double Nc;  // 1/m^3
    double Nv;
    double Nd_plus = 0.0;
    double Na_minus = 0.0;
    double T = 300.0;
    Statistics statistics = Statistics::fermi_dirac;

    // Silicon at 300 K, intrinsic Fermi level as the energy zero.  Nc/Nv follow
    // from the masses so that the Fermi-Dirac prefactor and Nc agree.
    static SemiconductorParams silicon();
    void validate() const;
    bool operator==(const SemiconductorParams&) const = default;
};

// 2 (m kT / 2 pi hbar^2)^{3/2}
double effective_dos(double mass, double T);

enum class Material { ferroelectric, dielectric, semiconductor };

const char* material_name(Material m);

struct Layer {
    Material kind;
    double thickness;  // m
    double eps_rel;
    bool operator==(const Layer&) const = default;
};

struct LayerSpan {
    Layer layer;
    int k_lo;  // first cell
    int k_hi;  // one past the last cell
};

class DeviceStack {
public:
    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const std::vector<LayerSpan>& layers() const { return layers_; }

    // eps0 * eps_r per cell.
    const ScalarField& eps_field() const { return eps_; }
    const ScalarField& mask(Material m) const;

    Material material_at(int k) const { return mat_z_[std::size_t(k)]; }
    double eps_at(int k) const { return eps_z_[std::size_t(k)]; }
    const std::vector<double>& eps_profile() const { return eps_z_; }

    int fe_k_lo() const { return fe_lo_; }
    int fe_k_hi() const { return fe_hi_; }
    bool in_fe(int k) const { return k >= fe_lo_ && k < fe_hi_; }
    double fe_thickness() const { return (fe_hi_ - fe_lo_) * grid_->dz(); }

    // Face index (bottom face of the FE layer) of the FE-DE interface, -1 if the
    // FE layer starts at the bottom contact.
    int z_int_fe_de() const { return z_int_; }
    // Span of the dielectric directly below the FE layer, or nullptr.
    const LayerSpan* dielectric_below_fe() const;
    bool has_semiconductor() const { return has_sc_; }

private:
    friend DeviceStack build_stack(const std::vector<Layer>&, GridPtr);
    DeviceStack(GridPtr g);

    GridPtr grid_;
    std::vector<LayerSpan> layers_;
    ScalarField eps_, fe_mask_, de_mask_, sc_mask_;
    std::vector<Material> mat_z_;
    std::vector<double> eps_z_;
    int fe_lo_ = 0, fe_hi_ = 0, z_int_ = -1;
    bool has_sc_ = false;
};

// Layers bottom to top.  Exactly one ferroelectric layer of at least two cells.
DeviceStack build_stack(const std::vector<Layer>& layers, GridPtr grid);

}  // namespace ferrodyn
