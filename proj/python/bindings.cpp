#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "ferrodyn/config.hpp"
#include "ferrodyn/coupling.hpp"
#include "ferrodyn/driver.hpp"
#include "ferrodyn/semiconductor.hpp"
#include "ferrodyn/verification.hpp"

namespace py = pybind11;
using namespace ferrodyn;

namespace {

// Interior values as a (nz, ny, nx) array.
py::array_t<double> to_numpy(const ScalarField& f) {
    const Grid& g = f.grid();
    py::array_t<double> a({g.nz(), g.ny(), g.nx()});
    auto v = a.mutable_unchecked<3>();
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) v(k, j, i) = f(i, j, k);
    return a;
}

void from_numpy(ScalarField& f, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    const Grid& g = f.grid();
    if (a.ndim() != 3 || a.shape(0) != g.nz() || a.shape(1) != g.ny() || a.shape(2) != g.nx())
        throw py::value_error("array shape must be (nz, ny, nx) = (" + std::to_string(g.nz()) + ", " +
                              std::to_string(g.ny()) + ", " + std::to_string(g.nx()) + ")");
    auto v = a.unchecked<3>();
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) f(i, j, k) = v(k, j, i);
}

py::dict record_dict(const SweepRecord& r) {
    py::dict d;
    d["step"] = r.step;
    d["t"] = r.t;
    d["v_app"] = r.v_app;
    d["Q"] = r.Q;
    d["v_fe_avg"] = r.v_fe_avg;
    d["v_int_avg"] = r.v_int_avg;
    d["F_total"] = r.F_total;
    d["P_mean"] = r.P_mean;
    d["fp_iters"] = r.fp_iters;
    d["settled"] = r.settled;
    return d;
}

// Owns the Simulation and its state; Simulation itself is not movable.
class PySimulation {
public:
    explicit PySimulation(const SimConfig& cfg) : sim_(cfg), state_(sim_.initialize(0.0)) {}

    void reset(double v) { state_ = sim_.initialize(v); }
    void advance(long n) {
        py::gil_scoped_release rel;
        for (long m = 0; m < n; ++m) sim_.advance(state_);
    }
    void set_voltage(double v) { sim_.set_voltage(state_, v); }
    void set_polarization(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
        from_numpy(state_.P, a);
        sim_.set_voltage(state_, state_.v_applied);
    }

    double t() const { return state_.t; }
    long step() const { return state_.step_index; }
    double v_applied() const { return state_.v_applied; }
    int fp_iters() const { return state_.last_fp_iters; }
    py::array_t<double> P() const { return to_numpy(state_.P); }
    py::array_t<double> phi() const { return to_numpy(state_.phi); }
    py::array_t<double> rho() const { return to_numpy(state_.rho); }
    double F_total() const { return sim_.energy(state_).F_total; }
    py::dict record() const { return record_dict(make_record(sim_, state_, false)); }

private:
    Simulation sim_;
    SimState state_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Phase-field ferroelectric device simulator core";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<FixedPointError>(m, "FixedPointError", PyExc_RuntimeError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_FloatingPointError);

    py::class_<SimConfig>(m, "Config")
        .def_readwrite("nx", &SimConfig::nx)
        .def_readwrite("ny", &SimConfig::ny)
        .def_readwrite("dx", &SimConfig::dx)
        .def_readwrite("dy", &SimConfig::dy)
        .def_readwrite("dz", &SimConfig::dz)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("temporal_order", &SimConfig::temporal_order)
        .def_readwrite("fixed_steps", &SimConfig::fixed_steps)
        .def_readwrite("fixedpoint_tol", &SimConfig::fixedpoint_tol)
        .def_readwrite("poisson_tol", &SimConfig::poisson_tol)
        .def_property_readonly("nz", &SimConfig::nz)
        .def("to_text", [](const SimConfig& c) { return serialize_config(c); })
        .def_static("from_text", &parse_config)
        .def_static("load", &load_config)
        .def_static("mfim", &mfim_config, py::arg("lateral") = 16e-9)
        .def_static("mfism", &mfism_config, py::arg("lateral") = 16e-9)
        .def_static("mfm", &mfm_config, py::arg("lateral") = 16e-9)
        .def_static("bump", &bump_config, py::arg("n"))
        .def("__eq__", [](const SimConfig& a, const SimConfig& b) { return a == b; });

    py::class_<PySimulation>(m, "Simulation")
        .def(py::init<const SimConfig&>())
        .def("reset", &PySimulation::reset, py::arg("v_applied") = 0.0)
        .def("advance", &PySimulation::advance, py::arg("steps") = 1)
        .def("set_voltage", &PySimulation::set_voltage)
        .def("set_polarization", &PySimulation::set_polarization)
        .def_property_readonly("t", &PySimulation::t)
        .def_property_readonly("step", &PySimulation::step)
        .def_property_readonly("v_applied", &PySimulation::v_applied)
        .def_property_readonly("fp_iters", &PySimulation::fp_iters)
        .def_property_readonly("P", &PySimulation::P)
        .def_property_readonly("phi", &PySimulation::phi)
        .def_property_readonly("rho", &PySimulation::rho)
        .def("free_energy", &PySimulation::F_total)
        .def("record", &PySimulation::record);

    m.def(
        "run",
        [](const SimConfig& cfg, const std::string& out_dir) {
            RunOptions opt;
            opt.out_dir = out_dir;
            std::optional<RunResult> r;
            {
                py::gil_scoped_release rel;
                r = run(cfg, opt);
            }
            py::list recs;
            for (const auto& x : r->records) recs.append(record_dict(x));
            return recs;
        },
        py::arg("config"), py::arg("out_dir") = "", "Run the config's schedule; returns the records.");

    m.def("fermi_half", py::vectorize(&fermi_half), py::arg("eta"));
    m.def("fermi_half_quadrature", &fermi_half_quadrature, py::arg("eta"));

    m.def(
        "solve_poisson",
        [](py::array_t<double> eps, py::array_t<double> rhs, double dx, double dy, double dz, double v_lo,
           double v_hi, double tol) {
            if (eps.ndim() != 3) throw py::value_error("eps must be 3-D (nz, ny, nx)");
            auto g = create_grid(int(eps.shape(2)), int(eps.shape(1)), int(eps.shape(0)), dx, dy, dz);
            ScalarField e(g), r(g), phi(g);
            from_numpy(e, eps);
            from_numpy(r, rhs);
            PoissonSolver solver(e);
            const SolveStats st = solver.solve(r, v_lo, v_hi, tol, phi);
            return py::make_tuple(to_numpy(phi), st.vcycles, st.rel_residual);
        },
        py::arg("eps"), py::arg("rhs"), py::arg("dx"), py::arg("dy"), py::arg("dz"), py::arg("v_lo") = 0.0,
        py::arg("v_hi") = 0.0, py::arg("tol") = 1e-10,
        "Solve div(eps grad phi) = rhs, periodic in x/y, Dirichlet in z. Returns (phi, vcycles, residual).");

    m.def(
        "run_suite",
        [](const std::string& name, bool full) {
            Suite s;
            if (name == "temporal1") s = Suite::temporal_order1;
            else if (name == "temporal2") s = Suite::temporal_order2;
            else if (name == "spatial") s = Suite::spatial;
            else throw py::value_error("suite must be temporal1, temporal2 or spatial");
            SuiteOptions opt;
            opt.full = full;
            SuiteReport r;
            {
                py::gil_scoped_release rel;
                r = run_suite(s, opt);
            }
            py::list out;
            for (const auto& c : r.results)
                out.append(py::dict(py::arg("quantity") = quantity_name(c.quantity), py::arg("E_cm") = c.E_cm,
                                    py::arg("E_mf") = c.E_mf, py::arg("rate") = c.rate));
            return out;
        },
        py::arg("suite"), py::arg("full") = false);

    m.def("set_num_threads", &set_num_threads);
    m.def("num_threads", &num_threads);
}
