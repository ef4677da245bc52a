#pragma once

#include <string>
#include <vector>

#include "ferrodyn/config.hpp"
#include "ferrodyn/grid.hpp"
#include "ferrodyn/materials.hpp"

namespace ferrodyn {

// amplitude * exp(-((x-Lx/2)^2 + (y-Ly/2)^2) / 2 sigma1^2 - (z-z0)^2 / 2 sigma2^2)
// at cell centers, zero outside the FE layer.  The bump is centered laterally
// rather than at the periodic corner.  Throws std::invalid_argument unless
// [z0 - 4 sigma2, z0 + 4 sigma2] lies inside the FE layer.
ScalarField gaussian_bump(const DeviceStack& stack, const BumpConfig& cfg);

// Mean of the 8 children of each coarse cell.  All counts must be even.
ScalarField coarsen(const ScalarField& fine);

// sqrt(mean (a - b)^2) over interior cells.
double l2_error(const ScalarField& a, const ScalarField& b);

enum class Quantity { P, Phi };
const char* quantity_name(Quantity q);

struct ConvergenceResult {
    Quantity quantity;
    double E_cm;  // coarse vs medium
    double E_mf;  // medium vs fine
    double rate;  // log2(E_cm / E_mf)
};

enum class Suite { temporal_order1, temporal_order2, spatial };
const char* suite_name(Suite s);

struct SuiteOptions {
    bool full = false;        // 128^3 temporal, 64/128/256 spatial
    double t_final = 400e-15;
    double coupling_tol = 1e-12;
    double poisson_tol = 1e-13;
    bool verbose = false;
    int n = 0;  // > 0: temporal grid size, or the coarsest spatial size
};

struct SuiteRun {
    int n;
    double dt;
    long steps;
    double seconds;
};

struct SuiteReport {
    Suite suite;
    std::vector<SuiteRun> runs;  // coarse, medium, fine
    std::vector<ConvergenceResult> results;  // P then Phi
};

// Temporal suites: one grid, 64^3 at dt = 100/50/25 fs (128^3 at 50/25/12.5 fs
// with full).  Spatial: 32/64/128 cells (64/128/256 with full)
// at dt = 25 fs, second order in time.
SuiteReport run_suite(Suite s, const SuiteOptions& opt = {});

// Acceptance band for a rate.
struct RateBand {
    double lo, hi;
};
RateBand rate_band(Suite s, Quantity q);

std::string format_report(const std::vector<SuiteReport>& reports);
// suite,quantity,E_cm,E_mf,rate,band_lo,band_hi,pass
std::string report_csv(const std::vector<SuiteReport>& reports);
bool report_passes(const SuiteReport& r);

// Manufactured solution for div(eps grad phi) = f on the unit cube with
//   phi = sin(2 pi x) sin(2 pi y) sin(pi z) + z,
//   eps = 2 + sin(2 pi x) cos(2 pi y) / 2 + z / 2,
// Dirichlet 0 / 1 on the z faces.
double mms_phi(double x, double y, double z);
double mms_eps(double x, double y, double z);
double mms_rhs(double x, double y, double z);

struct MmsLevel {
    int n;
    int vcycles;
    double rel_residual;
    double error;  // RMS over cells
    double rate;   // vs the previous level, 0 for the first
    double seconds;
};
std::vector<MmsLevel> poisson_mms_study(const std::vector<int>& ns, double tol = 1e-10,
                                        const MultigridConfig& mg = {});

// (2/sqrt(pi)) int_0^inf sqrt(x) / (1 + exp(x - eta)) dx by adaptive quadrature.
double fermi_half_quadrature(double eta);

struct FermiCheck {
    double max_rel_fd;     // fermi_half vs quadrature over eta in [-10, 20]
    double worst_eta_fd;
    double max_rel_mb;     // fermi_half vs exp(eta) over eta in [-30, -8]
    double worst_eta_mb;
};
FermiCheck fermi_check(int samples = 601);

}  // namespace ferrodyn
