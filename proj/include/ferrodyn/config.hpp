#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ferrodyn/materials.hpp"
#include "ferrodyn/poisson.hpp"

namespace ferrodyn {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct PolarizationBC {
    enum class Kind { surface_effect, free, zero };
    Kind kind = Kind::surface_effect;
    double lambda = 3.0e-9;  // meaningful only for surface_effect
    bool operator==(const PolarizationBC&) const = default;
};

struct LayerConfig {
    Material kind = Material::dielectric;
    double thickness = 0.0;
    double eps = 0.0;  // dielectric only; FE and SC take fe.eps / sc.eps
    bool operator==(const LayerConfig&) const = default;
};

struct BumpConfig {
    double sigma1 = 5.0e-9;
    double sigma2 = 2.0e-9;
    double z0 = 24.0e-9;  // from the bottom contact
    double amplitude = 0.002;
    bool operator==(const BumpConfig&) const = default;
};

// lagged: rho(phi) from the previous iterate.  newton: additionally linearizes
// rho about that iterate, which keeps converging under strong inversion.
enum class CouplingScheme { lagged, newton };

enum class InitKind { random, gaussian_bump, uniform_value, stripe };

struct InitConfig {
    InitKind kind = InitKind::random;
    double amplitude = 0.002;  // C/m^2, random and stripe
    std::uint64_t seed = 1;
    double value = 0.0;            // uniform_value
    double stripe_period = 8e-9;   // m, along x
    bool y_uniform = false;        // random: one draw per (i, k), replicated along y
    BumpConfig bump;
    bool operator==(const InitConfig&) const = default;
};

struct SteadyStateRule {
    double rel_change_tol = 1e-6;
    int consecutive_steps = 50;
    long max_steps = 200000;
    bool operator==(const SteadyStateRule&) const = default;
};

enum class Waveform { hold, triangular, list };

struct SweepSchedule {
    Waveform waveform = Waveform::hold;
    double v = 0.0;      // hold
    double vmax = 5.0;   // triangular
    int points_per_quarter = 20;
    int cycles = 1;
    std::vector<double> values;  // list
    SteadyStateRule settle;
    bool operator==(const SweepSchedule&) const = default;
};

struct OutputConfig {
    long record_every = 0;              // extra records every N steps; 0 = settled points only
    std::vector<double> snapshot_vapp;  // V_app checkpoints for VTK dumps
    bool snapshot_final = true;
    bool operator==(const OutputConfig&) const = default;
};

struct SimConfig {
    int nx = 32, ny = 32;
    double dx = 0.5e-9, dy = 0.5e-9, dz = 0.5e-9;
    long max_tile_cells = 32768;

    std::vector<LayerConfig> layers;
    FerroelectricParams fe;
    SemiconductorParams sc = SemiconductorParams::silicon();
    PolarizationBC pol_bc;

    double dt = 4.0e-13;
    int temporal_order = 1;
    long fixed_steps = 0;  // > 0: run exactly this many steps per voltage point

    MultigridConfig mg;
    double poisson_tol = 1e-10;
    double fixedpoint_tol = 1e-5;  // V, mean |dPhi| over all cells
    int fixedpoint_max_iters = 100;
    CouplingScheme coupling_scheme = CouplingScheme::lagged;

    InitConfig init;
    SweepSchedule sweep;
    OutputConfig output;

    int nz() const;
    std::vector<Layer> stack_layers() const;
    void validate() const;
    bool operator==(const SimConfig&) const = default;
};

SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);
std::string serialize_config(const SimConfig& cfg);

// Stock stacks used by tests and the verification suites.
SimConfig mfim_config(double lateral = 16e-9);
SimConfig mfism_config(double lateral = 16e-9);
SimConfig mfm_config(double lateral = 16e-9);
// Validation problem: 32 nm cube, SC/DE/FE = 25/25/50 %, Phi = 0 on both faces.
SimConfig bump_config(int n);

}  // namespace ferrodyn
