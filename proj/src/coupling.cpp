#include "ferrodyn/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "ferrodyn/constants.hpp"
#include "ferrodyn/verification.hpp"

namespace ferrodyn {

Coupler::Coupler(const DeviceStack& stack, std::optional<ChargeModel> model, MultigridConfig mg,
                 double poisson_tol, CouplingScheme scheme)
    : stack_(&stack),
      model_(std::move(model)),
      solver_(stack.eps_field(), mg),
      poisson_tol_(poisson_tol),
      scheme_(scheme),
      shift_(stack.grid_ptr()) {
    if (model_ && !stack.has_semiconductor()) model_.reset();
    for (const auto& s : stack.layers())
        if (s.layer.kind == Material::semiconductor) {
            sc_lo_ = s.k_lo;
            sc_hi_ = s.k_hi;
        }
}

namespace {

double mean_abs_diff(const ScalarField& a, const ScalarField& b) {
    const Grid& g = a.grid();
    return tile_sum(g, [&](const Box& bx) {
               double acc = 0.0;
               for (int k = bx.lo[2]; k < bx.hi[2]; ++k)
                   for (int j = bx.lo[1]; j < bx.hi[1]; ++j)
                       for (int i = bx.lo[0]; i < bx.hi[0]; ++i) acc += std::abs(a(i, j, k) - b(i, j, k));
               return acc;
           }) /
           double(g.cell_count());
}

}  // namespace

FixedPointReport Coupler::solve(const ScalarField& P, ScalarField& phi, ScalarField& rho,
                                double v_lo, double v_hi, double tol, int max_iters) {
    if (!(tol > 0.0)) throw std::invalid_argument("fixed point: tol must be positive");
    if (max_iters < 1) throw std::invalid_argument("fixed point: max_iters must be >= 1");
    FixedPointReport rep;
    rho.fill(0.0);
    ScalarField next = phi;
    const bool newton = model_ && scheme_ == CouplingScheme::newton;
    for (int it = 1; it <= max_iters; ++it) {
        if (model_) charge_density_layer(phi, *model_, sc_lo_, sc_hi_, rho);
        ScalarField rhs = assemble_rhs(P, rho, *stack_);
        if (newton) {
            const Grid& g = phi.grid();
            for_each_tile(g, [&](const Box& b) {
                const int k0 = std::max(b.lo[2], sc_lo_), k1 = std::min(b.hi[2], sc_hi_);
                for (int k = k0; k < k1; ++k)
                    for (int j = b.lo[1]; j < b.hi[1]; ++j)
                        for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                            const double s = -model_->charge_slope(phi(i, j, k));
                            shift_(i, j, k) = s;
                            rhs(i, j, k) -= s * phi(i, j, k);
                        }
            });
            solver_.set_shift(&shift_);
        }
        next = phi;
        rep.vcycles += solver_.solve(rhs, v_lo, v_hi, poisson_tol_, next).vcycles;
        if (newton) {
            // Logarithmic step limit on the semiconductor cells (large updates
            // overshoot the exponential carrier response).
            const double vt = model_->kT() / constants::q_e;
            for_each_tile(phi.grid(), [&](const Box& b) {
                const int k0 = std::max(b.lo[2], sc_lo_), k1 = std::min(b.hi[2], sc_hi_);
                for (int k = k0; k < k1; ++k)
                    for (int j = b.lo[1]; j < b.hi[1]; ++j)
                        for (int i = b.lo[0]; i < b.hi[0]; ++i) {
                            const double d = next(i, j, k) - phi(i, j, k);
                            next(i, j, k) = phi(i, j, k) + std::copysign(vt * std::log1p(std::abs(d) / vt), d);
                        }
            });
            exchange_ghosts(next, DirichletZ{v_lo, v_hi});
        }
        const double change = mean_abs_diff(next, phi);
        std::swap(phi, next);
        rep.iterations = it;
        rep.changes.push_back(change);
        if (!model_) {
            // rho does not depend on phi: one solve is the fixed point.
            rep.final_change = 0.0;
            rep.converged = true;
            return rep;
        }
        rep.final_change = change;
        if (change < tol) {
            rep.converged = true;
            break;
        }
    }
    if (newton) solver_.set_shift(nullptr);
    if (!rep.converged)
        throw FixedPointError("fixed point: no convergence after " + std::to_string(max_iters) +
                                  " iterations, mean |dPhi| = " + std::to_string(rep.final_change) + " V",
                              rep.final_change);
    charge_density_layer(phi, *model_, sc_lo_, sc_hi_, rho);
    return rep;
}

SelfConsistentResult self_consistent_phi(const ScalarField& P, const ScalarField& phi_guess,
                                         const DeviceStack& stack,
                                         const std::optional<ChargeModel>& model, double tol,
                                         int max_iters, double v_lo, double v_hi,
                                         const MultigridConfig& mg, double poisson_tol,
                                         CouplingScheme scheme) {
    Coupler c(stack, model, mg, poisson_tol, scheme);
    SelfConsistentResult r{phi_guess, ScalarField(P.grid_ptr()), {}};
    r.report = c.solve(P, r.phi, r.rho, v_lo, v_hi, tol, max_iters);
    return r;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in [-1, 1).
double cell_random(std::uint64_t seed, int i, int j, int k) {
    std::uint64_t key = std::uint64_t(std::uint32_t(i));
    key = key * 0x100000001b3ULL ^ std::uint64_t(std::uint32_t(j));
    key = key * 0x100000001b3ULL ^ std::uint64_t(std::uint32_t(k));
    const std::uint64_t h = splitmix64(splitmix64(seed) ^ splitmix64(key));
    return 2.0 * double(h >> 11) * 0x1.0p-53 - 1.0;
}

}  // namespace

ScalarField initial_polarization(const SimConfig& cfg, const DeviceStack& stack) {
    const Grid& g = stack.grid();
    if (cfg.init.kind == InitKind::gaussian_bump) return gaussian_bump(stack, cfg.init.bump);
    ScalarField P(stack.grid_ptr());
    const InitConfig& in = cfg.init;
    for (int k = stack.fe_k_lo(); k < stack.fe_k_hi(); ++k)
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                double v = 0.0;
                switch (in.kind) {
                    case InitKind::random:
                        v = in.amplitude * cell_random(in.seed, i, in.y_uniform ? 0 : j, k);
                        break;
                    case InitKind::uniform_value: v = in.value; break;
                    case InitKind::stripe:
                        v = std::sin(2.0 * constants::pi * g.x_center(i) / in.stripe_period) >= 0.0
                                ? in.amplitude
                                : -in.amplitude;
                        break;
                    case InitKind::gaussian_bump: break;
                }
                P(i, j, k) = v;
            }
    return P;
}

namespace {

DeviceStack make_stack(const SimConfig& cfg) {
    cfg.validate();
    auto g = create_grid(cfg.nx, cfg.ny, cfg.nz(), cfg.dx, cfg.dy, cfg.dz, cfg.max_tile_cells);
    return build_stack(cfg.stack_layers(), g);
}

}  // namespace

Simulation::Simulation(const SimConfig& cfg)
    : cfg_(cfg),
      stack_(make_stack(cfg)),
      coupler_(stack_,
               stack_.has_semiconductor() ? std::optional<ChargeModel>(ChargeModel(cfg.sc)) : std::nullopt,
               cfg.mg, cfg.poisson_tol, cfg.coupling_scheme) {}

FixedPointReport Simulation::fixed_point(const ScalarField& P, ScalarField& phi, ScalarField& rho,
                                         double v) {
    return coupler_.solve(P, phi, rho, 0.0, v, cfg_.fixedpoint_tol, cfg_.fixedpoint_max_iters);
}

SimState Simulation::initialize(double v_applied) {
    SimState s{0.0, 0, initial_polarization(cfg_, stack_), ScalarField(stack_.grid_ptr()),
               ScalarField(stack_.grid_ptr()), v_applied, 0};
    s.last_fp_iters = fixed_point(s.P, s.phi, s.rho, v_applied).iterations;
    return s;
}

void Simulation::set_voltage(SimState& s, double v_applied) {
    s.v_applied = v_applied;
    s.last_fp_iters = fixed_point(s.P, s.phi, s.rho, v_applied).iterations;
}

void Simulation::advance(SimState& s) {
    const double dt = cfg_.dt;
    const long next = s.step_index + 1;
    auto check = [&](const ScalarField& f) {
        if (!f.all_finite())
            throw NumericalError("non-finite state at step " + std::to_string(next), next);
    };
    const ScalarField f0 = tdgl_rhs(s.P, s.phi, cfg_.fe, cfg_.pol_bc, stack_);
    ScalarField P_next = euler_step(s.P, f0, dt);
    check(P_next);
    ScalarField phi_next = s.phi;
    ScalarField rho_next(stack_.grid_ptr());
    FixedPointReport rep;
    if (cfg_.temporal_order == 1) {
        rep = fixed_point(P_next, phi_next, rho_next, s.v_applied);
    } else {
        fixed_point(P_next, phi_next, rho_next, s.v_applied);
        const ScalarField f1 = tdgl_rhs(P_next, phi_next, cfg_.fe, cfg_.pol_bc, stack_);
        P_next = trapezoidal_step(s.P, f0, f1, dt);
        check(P_next);
        rep = fixed_point(P_next, phi_next, rho_next, s.v_applied);
    }
    check(phi_next);
    s.P = std::move(P_next);
    s.phi = std::move(phi_next);
    s.rho = std::move(rho_next);
    s.t += dt;
    s.step_index = next;
    s.last_fp_iters = rep.iterations;
}

EnergyBreakdown Simulation::energy(const SimState& s) const {
    return energy_breakdown(s.P, s.phi, stack_, cfg_.fe, cfg_.pol_bc, 0.0, s.v_applied);
}

SimState initialize(const SimConfig& cfg) {
    Simulation sim(cfg);
    return sim.initialize(0.0);
}

}  // namespace ferrodyn
