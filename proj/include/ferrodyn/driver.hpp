#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ferrodyn/config.hpp"
#include "ferrodyn/coupling.hpp"

namespace ferrodyn {

// Plane-averaged eps0 eps_DE dphi/dz from the two dielectric cells nearest the
// FE-DE interface (positive for V_app > 0 with the FE on top).  Throws
// std::invalid_argument without a dielectric of at least two cells directly
// below the FE layer.
double interface_charge(const ScalarField& phi, const DeviceStack& stack);

// Plane average of phi at the FE-DE interface, extrapolated from the same two
// dielectric cells.
double interface_potential(const ScalarField& phi, const DeviceStack& stack);

// V_app - interface_potential
double average_fe_voltage(const ScalarField& phi, double v_app, const DeviceStack& stack);

// -P / (eps0 (eps_fe + eps_DE t_fe / t_DE)) for a stack of one dielectric and
// one ferroelectric layer.
double depolarization_field(double P_bar, const DeviceStack& stack);

// Mean P over the FE cells.
double mean_polarization(const ScalarField& P, const DeviceStack& stack);

// V_app values in visiting order.  Triangular: 0, up to vmax, back through 0 to
// -vmax and back to 0, points_per_quarter steps per quarter, repeated cycles
// times (the leading 0 appears once).
std::vector<double> voltage_sequence(const SweepSchedule& s);

// Tracks max|P_new - P_old| / max(max|P_new|, 1e-6) below the tolerance for
// consecutive steps.
class SteadyStateMonitor {
public:
    explicit SteadyStateMonitor(const SteadyStateRule& rule) : rule_(rule) {}
    // True once the rule has fired.
    bool update(const ScalarField& P_old, const ScalarField& P_new);
    void reset() { streak_ = 0; }
    double last_change() const { return last_; }

private:
    SteadyStateRule rule_;
    int streak_ = 0;
    double last_ = 0.0;
};

struct SweepRecord {
    long step = 0;
    double t = 0.0;
    double v_app = 0.0;
    double Q = 0.0;  // C/m^2, NaN without an FE-DE interface
    double v_fe_avg = 0.0;
    double v_int_avg = 0.0;
    double F_total = 0.0;
    double P_mean = 0.0;
    int fp_iters = 0;
    bool settled = false;
};

SweepRecord make_record(const Simulation& sim, const SimState& s, bool settled);

extern const char* const csv_header;
// One RFC 4180 row (CRLF terminated), full precision, "nan" for missing values.
std::string csv_row(const SweepRecord& r);
void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& recs);
// Parses a file produced by write_records_csv; throws std::runtime_error on a
// header or field mismatch.
std::vector<SweepRecord> read_records_csv(std::istream& is);

// Legacy ASCII STRUCTURED_POINTS, cell data, origin at the domain corner.
void write_vtk(const std::string& path, const ScalarField& f, const std::string& name);

struct VtkData {
    std::string name;
    std::array<int, 3> cells{};
    std::array<double, 3> origin{}, spacing{};
    std::vector<double> values;  // i fastest
};
VtkData read_vtk(const std::string& path);

// <field>_vapp<value>_step<n>.vtk
std::string snapshot_name(const std::string& field, double v_app, long step);
// Writes P, Phi, rho and Ez (prefix prepended to each file name); returns the paths.
std::vector<std::string> write_snapshot(const std::string& dir, const SimState& s,
                                        const std::string& prefix = "");

struct RunOptions {
    std::string out_dir;  // empty: nothing written
    bool verbose = false;
    // Called after every time step.
    std::function<void(const Simulation&, const SimState&)> on_step;
    // Called for every record, before it is written.
    std::function<void(const Simulation&, const SimState&, const SweepRecord&)> on_record;
};

struct RunResult {
    std::vector<SweepRecord> records;
    SimState final_state;
    long unsettled_points = 0;
};

// Executes the sweep schedule: at each V_app, steps until the steady-state rule
// fires (or exactly time.steps steps when set), then records.  A timeout records
// settled = 0 and moves on.  On NumericalError the last good state is dumped to
// out_dir as abort_* snapshots before rethrowing.
RunResult run(const SimConfig& cfg, const RunOptions& opt = {});

}  // namespace ferrodyn
