#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "ferrodyn/constants.hpp"
#include "ferrodyn/driver.hpp"

using namespace ferrodyn;
namespace fs = std::filesystem;

namespace {

constexpr double nm = 1e-9;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ferrodyn_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

SimConfig frozen_mfim(double P) {
    SimConfig c = mfim_config(4 * nm);
    c.init.kind = InitKind::uniform_value;
    c.init.value = P;
    return c;
}

}  // namespace

TEST_CASE("zero potential gives zero interface charge") {
    Simulation sim(frozen_mfim(0.0));
    const SimState s = sim.initialize(0.0);
    CHECK(interface_charge(s.phi, sim.stack()) == 0.0);
    CHECK(interface_potential(s.phi, sim.stack()) == 0.0);
    CHECK(average_fe_voltage(s.phi, 0.0, sim.stack()) == 0.0);
}

TEST_CASE("frozen uniform P in MFIM matches the series-capacitor formulas") {
    const double P = 0.15, ed = 10.0, ef = 24.0, td = 4 * nm, tf = 5 * nm;
    Simulation sim(frozen_mfim(P));
    const DeviceStack& st = sim.stack();
    const SimState s = sim.initialize(0.0);
    CHECK(depolarization_field(P, st) == doctest::Approx(-P / (constants::eps0 * 36.5)).epsilon(1e-12));

    const double E_fe = -P / (constants::eps0 * (ef + ed * tf / td));
    const double E_de = -E_fe * tf / td;
    const double Q = -constants::eps0 * ed * E_de;
    CHECK(interface_charge(s.phi, st) == doctest::Approx(Q).epsilon(1e-2));
    CHECK(average_fe_voltage(s.phi, 0.0, st) == doctest::Approx(E_de * td).epsilon(1e-2));
    const ElectricField E = electric_field(s.phi);
    const int kmid = (st.fe_k_lo() + st.fe_k_hi()) / 2;
    CHECK(plane_average(E.z, kmid) == doctest::Approx(depolarization_field(P, st)).epsilon(1e-2));
    CHECK(mean_polarization(s.P, st) == doctest::Approx(P));

    // with bias: superposition of the capacitive divider
    Simulation sim2(frozen_mfim(0.0));
    const SimState s2 = sim2.initialize(1.0);
    const double q_cap = constants::eps0 / (td / ed + tf / ef);
    CHECK(interface_charge(s2.phi, sim2.stack()) == doctest::Approx(q_cap).epsilon(1e-2));
}

TEST_CASE("interface diagnostics need a dielectric below the FE") {
    Simulation sim(mfm_config(4 * nm));
    const SimState s = sim.initialize(0.0);
    CHECK_THROWS_AS(interface_charge(s.phi, sim.stack()), std::invalid_argument);
    CHECK_THROWS_AS(depolarization_field(0.1, sim.stack()), std::invalid_argument);
    const SweepRecord r = make_record(sim, s, true);
    CHECK(std::isnan(r.Q));
    CHECK(std::isnan(r.v_fe_avg));
    CHECK(std::isfinite(r.F_total));
}

TEST_CASE("voltage sequences") {
    SweepSchedule s;
    CHECK(voltage_sequence(s) == std::vector<double>{0.0});
    s.waveform = Waveform::triangular;
    s.vmax = 2.0;
    s.points_per_quarter = 2;
    CHECK(voltage_sequence(s) == std::vector<double>{0, 1, 2, 1, 0, -1, -2, -1, 0});
    s.cycles = 2;
    CHECK(voltage_sequence(s).size() == 17);
    s.waveform = Waveform::list;
    s.values = {0.5, -0.5};
    CHECK(voltage_sequence(s) == s.values);
}

TEST_CASE("steady-state monitor counts consecutive quiet steps") {
    auto g = create_grid(4, 4, 4, 1, 1, 1);
    SteadyStateMonitor m({1e-3, 3, 100});
    ScalarField a(g, 1.0), b(g, 1.0), c(g, 1.0);
    b(1, 1, 1) = 1.0005;  // rel change 5e-4
    c(1, 1, 1) = 1.01;
    CHECK_FALSE(m.update(a, b));
    CHECK_FALSE(m.update(b, a));
    CHECK(m.last_change() == doctest::Approx(5e-4));
    CHECK_FALSE(m.update(a, c));  // resets the streak
    CHECK_FALSE(m.update(a, a));
    CHECK_FALSE(m.update(a, a));
    CHECK(m.update(a, a));
    // near-zero P uses the 1e-6 floor
    ScalarField z(g), tiny(g, 1e-9);
    SteadyStateMonitor m2({1e-2, 1, 10});
    CHECK(m2.update(z, tiny));
}

TEST_CASE("CSV format") {
    SweepRecord r;
    r.step = 42;
    r.t = 1.68e-11;
    r.v_app = -0.1;
    r.Q = 0.0123456789012345;
    r.v_fe_avg = std::numeric_limits<double>::quiet_NaN();
    r.v_int_avg = 0.3;
    r.F_total = -1.5e-20;
    r.P_mean = 1e-3;
    r.fp_iters = 2;
    r.settled = true;
    const std::string row = csv_row(r);
    CHECK(row.substr(row.size() - 2) == "\r\n");
    CHECK(row.find(",nan,") != std::string::npos);
    CHECK(row.rfind("42,", 0) == 0);
    CHECK(std::string(csv_header).find("Q_uC_per_cm2") != std::string::npos);

    std::stringstream ss;
    write_records_csv(ss, {r, r});
    const auto back = read_records_csv(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].Q == r.Q);  // shortest round-trip formatting
    CHECK(back[0].t == r.t);
    CHECK(std::isnan(back[1].v_fe_avg));
    CHECK(back[1].settled);
    CHECK(back[1].fp_iters == 2);

    std::stringstream bad("step,t\r\n1,2\r\n");
    CHECK_THROWS_AS(read_records_csv(bad), std::runtime_error);
}

TEST_CASE("VTK round trip and file names") {
    const fs::path dir = scratch("vtk");
    fs::create_directories(dir);
    auto g = create_grid(4, 4, 4, 0.5e-9, 0.25e-9, 1e-9);
    ScalarField f(g);
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < 4; ++i) f(i, j, k) = i + 10 * j + 100 * k + 0.125;
    const std::string p = (dir / "f.vtk").string();
    write_vtk(p, f, "P");
    const VtkData d = read_vtk(p);
    CHECK(d.name == "P");
    CHECK(d.cells == std::array<int, 3>{4, 4, 4});
    CHECK(d.spacing[1] == 0.25e-9);
    CHECK(d.origin[0] == 0.0);
    REQUIRE(d.values.size() == 64);
    CHECK(d.values[1] == 1.125);
    CHECK(d.values[4] == 10.125);
    CHECK(d.values[16] == 100.125);
    const std::string text = slurp(p);
    CHECK(text.find("DIMENSIONS 5 5 5") != std::string::npos);
    CHECK(text.find("CELL_DATA 64") != std::string::npos);

    CHECK(snapshot_name("P", 0.0, 7) == "P_vapp0_step7.vtk");
    CHECK(snapshot_name("Phi", -0.0, 7) == "Phi_vapp0_step7.vtk");
    CHECK(snapshot_name("Ez", -1.5, 120) == "Ez_vapp-1.5_step120.vtk");
    CHECK_THROWS_AS(read_vtk((dir / "missing.vtk").string()), std::runtime_error);
    fs::remove_all(dir);
}

TEST_CASE("run writes the time series and snapshots") {
    const fs::path dir = scratch("run");
    SimConfig c = mfim_config(4 * nm);
    c.fixed_steps = 6;
    c.output.record_every = 2;
    c.sweep.waveform = Waveform::list;
    c.sweep.values = {0.0, 0.5};
    c.output.snapshot_vapp = {0.0};
    RunOptions opt;
    opt.out_dir = dir.string();
    long steps = 0;
    opt.on_step = [&](const Simulation&, const SimState&) { ++steps; };
    const RunResult r = run(c, opt);
    CHECK(steps == 12);
    // 3 intermediate + 1 settled row per voltage point
    REQUIRE(r.records.size() == 8);
    CHECK_FALSE(r.records[0].settled);
    CHECK(r.records[3].settled);
    CHECK(r.records[3].step == 6);
    CHECK(r.records[7].v_app == 0.5);
    CHECK(r.final_state.step_index == 12);
    CHECK(r.unsettled_points == 0);

    std::ifstream f(dir / "timeseries.csv", std::ios::binary);
    const auto back = read_records_csv(f);
    REQUIRE(back.size() == 8);
    CHECK(back[7].Q == r.records[7].Q);
    for (const char* name : {"P", "Phi", "rho", "Ez"}) {
        CHECK(fs::exists(dir / snapshot_name(name, 0.0, 6)));
        CHECK(fs::exists(dir / snapshot_name(name, 0.5, 12)));  // final state
    }
    const VtkData d = read_vtk((dir / snapshot_name("P", 0.0, 6)).string());
    CHECK(d.values.size() == std::size_t(8 * 8 * 18));
    fs::remove_all(dir);
}

TEST_CASE("run settles on the steady-state rule and reports timeouts") {
    SimConfig c = mfim_config(4 * nm);
    c.init.kind = InitKind::uniform_value;
    c.init.value = 0.0;  // P = 0 is stationary at zero bias
    c.sweep.settle = {1e-6, 5, 100};
    const RunResult r = run(c);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].settled);
    CHECK(r.records[0].step == 5);

    SimConfig d = mfim_config(4 * nm);
    d.sweep.settle = {1e-12, 5, 3};
    const RunResult q = run(d);
    CHECK_FALSE(q.records[0].settled);
    CHECK(q.unsettled_points == 1);
}

TEST_CASE("numerical blow-up dumps the last good state") {
    const fs::path dir = scratch("abort");
    SimConfig c = mfim_config(4 * nm);
    c.dt = 1e-6;
    RunOptions opt;
    opt.out_dir = dir.string();
    CHECK_THROWS_AS(run(c, opt), NumericalError);
    bool found = false;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename().string().rfind("abort_P_vapp0_step", 0) == 0) found = true;
    CHECK(found);
    fs::remove_all(dir);
}
