#include "ferrodyn/materials.hpp"

#include <cmath>
#include <stdexcept>

#include "ferrodyn/constants.hpp"

namespace ferrodyn {

namespace c = constants;

void FerroelectricParams::validate() const {
    if (!(alpha < 0.0)) throw std::invalid_argument("fe.alpha must be negative");
    if (!(gamma > 0.0)) throw std::invalid_argument("fe.gamma must be positive");
    if (!std::isfinite(beta)) throw std::invalid_argument("fe.beta must be finite");
    if (!(g11 > 0.0)) throw std::invalid_argument("fe.g11 must be positive");
    if (!(g44 > 0.0)) throw std::invalid_argument("fe.g44 must be positive");
    if (!(eps_fe > 0.0)) throw std::invalid_argument("fe.eps must be positive");
    if (!(Gamma > 0.0)) throw std::invalid_argument("fe.Gamma must be positive");
}

double effective_dos(double mass, double T) {
    const double a = mass * c::k_B * T / (2.0 * c::pi * c::hbar * c::hbar);
    return 2.0 * a * std::sqrt(a);
}

SemiconductorParams SemiconductorParams::silicon() {
    SemiconductorParams p;
    p.me_eff = 1.08 * c::m_e;
    p.mp_eff = 0.81 * c::m_e;
    p.Ec = 0.56 * c::q_e;
    p.Ev = -0.56 * c::q_e;
    p.Nc = effective_dos(p.me_eff, p.T);
    p.Nv = effective_dos(p.mp_eff, p.T);
    return p;
}

void SemiconductorParams::validate() const {
    if (!(me_eff > 0.0) || !(mp_eff > 0.0))
        throw std::invalid_argument("sc.me_eff and sc.mp_eff must be positive");
    if (!(eps_sc > 0.0)) throw std::invalid_argument("sc.eps must be positive");
    if (!(Ec > Ev)) throw std::invalid_argument("sc.Ec must exceed sc.Ev");
    if (!(Nc > 0.0) || !(Nv > 0.0)) throw std::invalid_argument("sc.Nc and sc.Nv must be positive");
    if (!(Nd_plus >= 0.0) || !(Na_minus >= 0.0))
        throw std::invalid_argument("sc.Nd_plus and sc.Na_minus must be non-negative");
    if (!(T > 0.0)) throw std::invalid_argument("sc.T must be positive");
}

const char* material_name(Material m) {
    switch (m) {
        case Material::ferroelectric: return "ferroelectric";
        case Material::dielectric: return "dielectric";
        case Material::semiconductor: return "semiconductor";
    }
    return "?";
}

DeviceStack::DeviceStack(GridPtr g)
    : grid_(g), eps_(g), fe_mask_(g), de_mask_(g), sc_mask_(g) {}

const ScalarField& DeviceStack::mask(Material m) const {
    switch (m) {
        case Material::ferroelectric: return fe_mask_;
        case Material::dielectric: return de_mask_;
        case Material::semiconductor: return sc_mask_;
    }
    throw std::invalid_argument("unknown material");
}

const LayerSpan* DeviceStack::dielectric_below_fe() const {
    for (const auto& s : layers_)
        if (s.layer.kind == Material::dielectric && s.k_hi == fe_lo_) return &s;
    return nullptr;
}

DeviceStack build_stack(const std::vector<Layer>& layers, GridPtr grid) {
    if (!grid) throw std::invalid_argument("build_stack: null grid");
    if (layers.empty()) throw std::invalid_argument("build_stack: no layers");
    const Grid& g = *grid;
    DeviceStack s(grid);
    int k = 0, n_fe = 0;
    for (std::size_t n = 0; n < layers.size(); ++n) {
        const Layer& L = layers[n];
        const std::string name = "layer " + std::to_string(n) + " (" + material_name(L.kind) + ")";
        if (!(L.thickness > 0.0)) throw std::invalid_argument(name + ": thickness must be positive");
        if (!(L.eps_rel > 0.0)) throw std::invalid_argument(name + ": eps must be positive");
        const double cells = L.thickness / g.dz();
        const double rounded = std::round(cells);
        if (rounded < 1.0 || std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells))
            throw std::invalid_argument(name + ": thickness " + std::to_string(L.thickness) +
                                        " m is not a multiple of dz");
        const int nk = int(rounded);
        s.layers_.push_back({L, k, k + nk});
        if (L.kind == Material::ferroelectric) {
            ++n_fe;
            s.fe_lo_ = k;
            s.fe_hi_ = k + nk;
            if (nk < 2) throw std::invalid_argument(name + ": ferroelectric needs at least 2 cells");
        }
        if (L.kind == Material::semiconductor) s.has_sc_ = true;
        k += nk;
    }
    if (k != g.nz())
        throw std::invalid_argument("build_stack: layers span " + std::to_string(k) +
                                    " cells but grid has nz=" + std::to_string(g.nz()));
    if (n_fe == 0) throw std::invalid_argument("build_stack: no ferroelectric layer");
    if (n_fe > 1) throw std::invalid_argument("build_stack: more than one ferroelectric layer");
    s.z_int_ = s.fe_lo_ > 0 ? s.fe_lo_ : -1;

    s.mat_z_.resize(std::size_t(g.nz()));
    s.eps_z_.resize(std::size_t(g.nz()));
    for (const auto& span : s.layers_)
        for (int kk = span.k_lo; kk < span.k_hi; ++kk) {
            s.mat_z_[std::size_t(kk)] = span.layer.kind;
            s.eps_z_[std::size_t(kk)] = constants::eps0 * span.layer.eps_rel;
        }
    for (int kk = 0; kk < g.nz(); ++kk) {
        const Material m = s.mat_z_[std::size_t(kk)];
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                s.eps_(i, j, kk) = s.eps_z_[std::size_t(kk)];
                s.fe_mask_(i, j, kk) = m == Material::ferroelectric;
                s.de_mask_(i, j, kk) = m == Material::dielectric;
                s.sc_mask_(i, j, kk) = m == Material::semiconductor;
            }
    }
    exchange_ghosts(s.eps_, DirichletZ{s.eps_z_.front(), s.eps_z_.back()});
    return s;
}

}  // namespace ferrodyn
