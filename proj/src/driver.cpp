#include "ferrodyn/driver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ferrodyn/constants.hpp"

namespace ferrodyn {

namespace {

const LayerSpan& interface_dielectric(const DeviceStack& stack) {
    const LayerSpan* de = stack.dielectric_below_fe();
    if (!de) throw std::invalid_argument("no dielectric layer directly below the ferroelectric");
    if (de->k_hi - de->k_lo < 2)
        throw std::invalid_argument("interface dielectric needs at least two cells");
    return *de;
}

}  // namespace

double interface_charge(const ScalarField& phi, const DeviceStack& stack) {
    const LayerSpan& de = interface_dielectric(stack);
    const int k1 = de.k_hi - 1, k2 = de.k_hi - 2;
    const double e = plane_average(phi, k1) - plane_average(phi, k2);
    return constants::eps0 * de.layer.eps_rel * e / stack.grid().dz();
}

double interface_potential(const ScalarField& phi, const DeviceStack& stack) {
    const LayerSpan& de = interface_dielectric(stack);
    const double p1 = plane_average(phi, de.k_hi - 1), p2 = plane_average(phi, de.k_hi - 2);
    return p1 + 0.5 * (p1 - p2);
}

double average_fe_voltage(const ScalarField& phi, double v_app, const DeviceStack& stack) {
    return v_app - interface_potential(phi, stack);
}

double depolarization_field(double P_bar, const DeviceStack& stack) {
    const auto& ls = stack.layers();
    if (ls.size() != 2) throw std::invalid_argument("depolarization_field: needs one DE and one FE layer");
    const LayerSpan* fe = nullptr;
    const LayerSpan* de = nullptr;
    for (const auto& s : ls) {
        if (s.layer.kind == Material::ferroelectric) fe = &s;
        if (s.layer.kind == Material::dielectric) de = &s;
    }
    if (!fe || !de) throw std::invalid_argument("depolarization_field: needs one DE and one FE layer");
    const double t_fe = (fe->k_hi - fe->k_lo) * stack.grid().dz();
    const double t_de = (de->k_hi - de->k_lo) * stack.grid().dz();
    return -P_bar / (constants::eps0 * (fe->layer.eps_rel + de->layer.eps_rel * t_fe / t_de));
}

double mean_polarization(const ScalarField& P, const DeviceStack& stack) {
    double s = 0.0;
    for (int k = stack.fe_k_lo(); k < stack.fe_k_hi(); ++k) s += plane_average(P, k);
    return s / (stack.fe_k_hi() - stack.fe_k_lo());
}

std::vector<double> voltage_sequence(const SweepSchedule& s) {
    switch (s.waveform) {
        case Waveform::hold: return {s.v};
        case Waveform::list: return s.values;
        case Waveform::triangular: {
            const int n = s.points_per_quarter;
            std::vector<double> v{0.0};
            for (int c = 0; c < s.cycles; ++c) {
                for (int m = 1; m <= n; ++m) v.push_back(s.vmax * m / n);
                for (int m = n - 1; m >= -n; --m) v.push_back(s.vmax * m / n);
                for (int m = -n + 1; m <= 0; ++m) v.push_back(s.vmax * m / n);
            }
            return v;
        }
    }
    return {};
}

bool SteadyStateMonitor::update(const ScalarField& P_old, const ScalarField& P_new) {
    const Grid& g = P_new.grid();
    const double dmax = tile_max(g, [&](const Box& b) {
        double m = 0.0;
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i)
                    m = std::max(m, std::abs(P_new(i, j, k) - P_old(i, j, k)));
        return m;
    });
    last_ = dmax / std::max(P_new.max_abs(), 1e-6);
    streak_ = last_ < rule_.rel_change_tol ? streak_ + 1 : 0;
    return streak_ >= rule_.consecutive_steps;
}

SweepRecord make_record(const Simulation& sim, const SimState& s, bool settled) {
    const DeviceStack& st = sim.stack();
    SweepRecord r;
    r.step = s.step_index;
    r.t = s.t;
    r.v_app = s.v_applied;
    if (st.dielectric_below_fe()) {
        r.Q = interface_charge(s.phi, st);
        r.v_int_avg = interface_potential(s.phi, st);
        r.v_fe_avg = s.v_applied - r.v_int_avg;
    } else {
        r.Q = r.v_int_avg = r.v_fe_avg = std::numeric_limits<double>::quiet_NaN();
    }
    r.F_total = sim.energy(s).F_total;
    r.P_mean = mean_polarization(s.P, st);
    r.fp_iters = s.last_fp_iters;
    r.settled = settled;
    return r;
}

const char* const csv_header =
    "step,t_s,v_app_V,Q_C_per_m2,Q_uC_per_cm2,v_fe_avg_V,v_int_avg_V,F_total_J,P_mean_C_per_m2,"
    "fp_iters,settled";

namespace {

void put(std::string& out, double v) {
    if (std::isnan(v)) {
        out += "nan";
        return;
    }
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

double get_double(const std::string& f) {
    if (f == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw std::runtime_error("csv: bad number '" + f + "'");
    return v;
}

long get_long(const std::string& f) {
    long v = 0;
    auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw std::runtime_error("csv: bad integer '" + f + "'");
    return v;
}

std::string chomp(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

std::string csv_row(const SweepRecord& r) {
    std::string out = std::to_string(r.step);
    out += ',';
    put(out, r.t);
    out += ',';
    put(out, r.v_app);
    out += ',';
    put(out, r.Q);
    out += ',';
    put(out, r.Q * 100.0);  // C/m^2 -> uC/cm^2
    out += ',';
    put(out, r.v_fe_avg);
    out += ',';
    put(out, r.v_int_avg);
    out += ',';
    put(out, r.F_total);
    out += ',';
    put(out, r.P_mean);
    out += ',';
    out += std::to_string(r.fp_iters);
    out += ',';
    out += r.settled ? '1' : '0';
    out += "\r\n";
    return out;
}

void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& recs) {
    os << csv_header << "\r\n";
    for (const auto& r : recs) os << csv_row(r);
}

std::vector<SweepRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || chomp(line) != csv_header)
        throw std::runtime_error("csv: header mismatch");
    std::vector<SweepRecord> out;
    while (std::getline(is, line)) {
        line = chomp(line);
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 11) throw std::runtime_error("csv: expected 11 fields, got " + std::to_string(f.size()));
        SweepRecord r;
        r.step = get_long(f[0]);
        r.t = get_double(f[1]);
        r.v_app = get_double(f[2]);
        r.Q = get_double(f[3]);
        r.v_fe_avg = get_double(f[5]);
        r.v_int_avg = get_double(f[6]);
        r.F_total = get_double(f[7]);
        r.P_mean = get_double(f[8]);
        r.fp_iters = int(get_long(f[9]));
        const long st = get_long(f[10]);
        if (st != 0 && st != 1) throw std::runtime_error("csv: settled must be 0 or 1");
        r.settled = st == 1;
        out.push_back(r);
    }
    return out;
}

void write_vtk(const std::string& path, const ScalarField& f, const std::string& name) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    const Grid& g = f.grid();
    os << "# vtk DataFile Version 3.0\n" << name << "\nASCII\nDATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << g.nx() + 1 << ' ' << g.ny() + 1 << ' ' << g.nz() + 1 << '\n';
    os << "ORIGIN 0 0 0\n";
    std::string line = "SPACING ";
    put(line, g.dx());
    line += ' ';
    put(line, g.dy());
    line += ' ';
    put(line, g.dz());
    os << line << '\n';
    os << "CELL_DATA " << g.cell_count() << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    std::string buf;
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.ny(); ++j) {
            buf.clear();
            for (int i = 0; i < g.nx(); ++i) {
                if (i) buf += ' ';
                put(buf, f(i, j, k));
            }
            os << buf << '\n';
        }
    if (!os) throw std::runtime_error("write failed: " + path);
}

VtkData read_vtk(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(is, line);
    if (line.rfind("# vtk DataFile", 0) != 0) throw std::runtime_error("vtk: bad magic in " + path);
    VtkData d;
    std::getline(is, line);  // title
    std::getline(is, line);
    if (chomp(line) != "ASCII") throw std::runtime_error("vtk: only ASCII is supported");
    std::string tok;
    long ncell = -1;
    while (is >> tok) {
        if (tok == "DATASET") {
            is >> tok;
            if (tok != "STRUCTURED_POINTS") throw std::runtime_error("vtk: expected STRUCTURED_POINTS");
        } else if (tok == "DIMENSIONS") {
            for (int a = 0; a < 3; ++a) {
                is >> d.cells[a];
                d.cells[a] -= 1;
            }
        } else if (tok == "ORIGIN") {
            is >> d.origin[0] >> d.origin[1] >> d.origin[2];
        } else if (tok == "SPACING") {
            is >> d.spacing[0] >> d.spacing[1] >> d.spacing[2];
        } else if (tok == "CELL_DATA") {
            is >> ncell;
        } else if (tok == "SCALARS") {
            std::string type;
            int comps = 1;
            is >> d.name >> type >> comps;
            if (comps != 1) throw std::runtime_error("vtk: only scalar data");
        } else if (tok == "LOOKUP_TABLE") {
            is >> tok;
            break;
        } else {
            throw std::runtime_error("vtk: unexpected token " + tok);
        }
    }
    if (ncell < 0 || ncell != long(d.cells[0]) * d.cells[1] * d.cells[2])
        throw std::runtime_error("vtk: CELL_DATA count does not match DIMENSIONS");
    d.values.reserve(std::size_t(ncell));
    for (long m = 0; m < ncell; ++m) {
        if (!(is >> tok)) throw std::runtime_error("vtk: truncated data");
        d.values.push_back(get_double(tok));
    }
    return d;
}

std::string snapshot_name(const std::string& field, double v_app, long step) {
    std::string v;
    put(v, v_app == 0.0 ? 0.0 : v_app);  // no "-0"
    return field + "_vapp" + v + "_step" + std::to_string(step) + ".vtk";
}

std::vector<std::string> write_snapshot(const std::string& dir, const SimState& s,
                                        const std::string& prefix) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> paths;
    const ElectricField E = electric_field(s.phi);
    const std::pair<const char*, const ScalarField*> fields[] = {
        {"P", &s.P}, {"Phi", &s.phi}, {"rho", &s.rho}, {"Ez", &E.z}};
    for (const auto& [name, f] : fields) {
        const std::string p =
            (std::filesystem::path(dir) / (prefix + snapshot_name(name, s.v_applied, s.step_index))).string();
        write_vtk(p, *f, name);
        paths.push_back(p);
    }
    return paths;
}

RunResult run(const SimConfig& cfg, const RunOptions& opt) {
    Simulation sim(cfg);
    const std::vector<double> volts = voltage_sequence(cfg.sweep);
    if (volts.empty()) throw ConfigError("sweep: empty voltage sequence");

    std::ofstream csv;
    if (!opt.out_dir.empty()) {
        std::filesystem::create_directories(opt.out_dir);
        const std::string p = (std::filesystem::path(opt.out_dir) / "timeseries.csv").string();
        csv.open(p, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot open " + p);
        csv << csv_header << "\r\n" << std::flush;
    }

    RunResult res{{}, sim.initialize(volts.front()), 0};
    SimState& s = res.final_state;
    auto emit = [&](bool settled) {
        SweepRecord r = make_record(sim, s, settled);
        if (opt.on_record) opt.on_record(sim, s, r);
        if (csv.is_open()) csv << csv_row(r) << std::flush;
        res.records.push_back(r);
    };
    auto is_checkpoint = [&](double v) {
        return std::any_of(cfg.output.snapshot_vapp.begin(), cfg.output.snapshot_vapp.end(),
                           [&](double c) { return std::abs(c - v) < 1e-9; });
    };

    for (std::size_t n = 0; n < volts.size(); ++n) {
        if (n > 0) sim.set_voltage(s, volts[n]);
        SteadyStateMonitor mon(cfg.sweep.settle);
        bool settled = false;
        const long limit = cfg.fixed_steps > 0 ? cfg.fixed_steps : cfg.sweep.settle.max_steps;
        for (long m = 0; m < limit; ++m) {
            const ScalarField P_old = s.P;
            try {
                sim.advance(s);
            } catch (const NumericalError&) {
                if (!opt.out_dir.empty()) write_snapshot(opt.out_dir, s, "abort_");
                throw;
            }
            if (opt.on_step) opt.on_step(sim, s);
            const bool fired = mon.update(P_old, s.P);
            if (cfg.output.record_every > 0 && s.step_index % cfg.output.record_every == 0) emit(false);
            if (cfg.fixed_steps == 0 && fired) {
                settled = true;
                break;
            }
        }
        if (cfg.fixed_steps > 0) settled = true;
        if (!settled) {
            ++res.unsettled_points;
            std::fprintf(stderr, "warning: V_app = %g V unsettled after %ld steps (last change %.3g)\n",
                         volts[n], limit, mon.last_change());
        }
        emit(settled);
        if (opt.verbose)
            std::fprintf(stderr, "V_app %8.4f  step %8ld  P_mean %+.5f  settled %d\n", volts[n],
                         s.step_index, res.records.back().P_mean, int(settled));
        if (!opt.out_dir.empty() && is_checkpoint(volts[n])) write_snapshot(opt.out_dir, s);
    }
    if (!opt.out_dir.empty() && cfg.output.snapshot_final && !is_checkpoint(volts.back()))
        write_snapshot(opt.out_dir, s);
    return res;
}

}  // namespace ferrodyn
