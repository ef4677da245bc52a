// sim: run relaxations, voltage sweeps and the verification suites.
//
// Exit codes: 0 success, 1 verification out of band or I/O failure, 2 config error,
// 3 solver failure, 4 NaN abort.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ferrodyn/config.hpp"
#include "ferrodyn/coupling.hpp"
#include "ferrodyn/driver.hpp"
#include "ferrodyn/verification.hpp"

using namespace ferrodyn;

namespace {

enum Exit { ok = 0, out_of_band = 1, failure = 1, config_error = 2, solver_failure = 3, nan_abort = 4 };

struct RunArgs {
    std::string config, out;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
};

int do_run(const RunArgs& a, bool require_sweep) {
    SimConfig cfg = load_config(a.config);
    if (a.seed) cfg.init.seed = *a.seed;
    if (require_sweep && cfg.sweep.waveform == Waveform::hold)
        throw ConfigError("sweep.waveform: 'sim sweep' needs triangular or list (use 'sim run' for hold)");
    std::filesystem::create_directories(a.out);
    {
        std::ofstream f(std::filesystem::path(a.out) / "config.resolved");
        f << serialize_config(cfg);
    }
    RunOptions opt;
    opt.out_dir = a.out;
    opt.verbose = a.verbose;
    const RunResult r = run(cfg, opt);
    std::printf("%zu records, %ld unsettled, final step %ld, t = %.6g s\n", r.records.size(),
                r.unsettled_points, r.final_state.step_index, r.final_state.t);
    return ok;
}

int do_verify(const std::string& suite, bool full, const std::string& out, bool verbose) {
    std::string csv;
    bool pass = true;
    if (suite == "poisson") {
        const auto lv = poisson_mms_study(full ? std::vector<int>{32, 64, 128, 256} : std::vector<int>{32, 64, 128});
        csv = "n,vcycles,rel_residual,error,rate,seconds\r\n";
        std::printf("%6s %8s %12s %12s %7s %8s\n", "n", "vcycles", "residual", "L2 error", "rate", "time");
        for (std::size_t m = 0; m < lv.size(); ++m) {
            const auto& l = lv[m];
            std::printf("%6d %8d %12.3e %12.4e %7.3f %7.2fs\n", l.n, l.vcycles, l.rel_residual, l.error, l.rate,
                        l.seconds);
            char buf[200];
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.6g\r\n", l.n, l.vcycles, l.rel_residual,
                          l.error, l.rate, l.seconds);
            csv += buf;
            if (l.vcycles > 30) pass = false;
            if (m > 0 && std::abs(l.rate - 2.0) > 0.1) pass = false;
        }
    } else if (suite == "fermi") {
        const FermiCheck c = fermi_check();
        std::printf("F_1/2 vs quadrature, eta in [-10, 20]: max rel %.3e at eta = %g (limit 5e-3)\n", c.max_rel_fd,
                    c.worst_eta_fd);
        std::printf("F_1/2 vs exp(eta),  eta in [-30, -8]: max rel %.3e at eta = %g (limit 1e-2)\n", c.max_rel_mb,
                    c.worst_eta_mb);
        char buf[200];
        std::snprintf(buf, sizeof buf, "check,max_rel,worst_eta,limit\r\nfermi_dirac,%.17g,%.17g,0.005\r\n"
                                       "maxwell_boltzmann,%.17g,%.17g,0.01\r\n",
                      c.max_rel_fd, c.worst_eta_fd, c.max_rel_mb, c.worst_eta_mb);
        csv = buf;
        pass = c.max_rel_fd < 5e-3 && c.max_rel_mb < 1e-2;
    } else {
        Suite s = suite == "temporal1" ? Suite::temporal_order1
                  : suite == "temporal2" ? Suite::temporal_order2
                                         : Suite::spatial;
        SuiteOptions opt;
        opt.full = full;
        opt.verbose = verbose;
        const SuiteReport r = run_suite(s, opt);
        std::fputs(format_report({r}).c_str(), stdout);
        csv = report_csv({r});
        pass = report_passes(r);
    }
    if (!out.empty()) {
        std::filesystem::create_directories(out);
        std::ofstream f(std::filesystem::path(out) / ("verify_" + suite + ".csv"), std::ios::binary);
        f << csv;
    }
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? ok : out_of_band;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-field ferroelectric device simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);

    RunArgs ra, sa;
    auto add_run_opts = [](CLI::App* c, RunArgs& a) {
        c->add_option("--config", a.config, "Config file")->required()->check(CLI::ExistingFile);
        c->add_option("--out", a.out, "Output directory")->required();
        c->add_option("--seed", a.seed, "Override init.seed");
        c->add_flag("--verbose,-v", a.verbose, "Progress on stderr");
    };
    auto* run_cmd = app.add_subcommand("run", "Run the configured schedule");
    add_run_opts(run_cmd, ra);
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a triangular or list voltage sweep");
    add_run_opts(sweep_cmd, sa);

    std::string suite, vout;
    bool full = false, vverbose = false;
    auto* verify_cmd = app.add_subcommand("verify", "Convergence and accuracy suites");
    verify_cmd->add_option("--suite", suite, "Suite")
        ->required()
        ->check(CLI::IsMember({"temporal1", "temporal2", "spatial", "poisson", "fermi"}));
    verify_cmd->add_flag("--full", full, "Larger ladders (128^3 temporal, up to 256^3 spatial)");
    verify_cmd->add_option("--out", vout, "Directory for the CSV report");
    verify_cmd->add_flag("--verbose,-v", vverbose, "Progress on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }
    if (threads > 0) set_num_threads(threads);

    try {
        if (*run_cmd) return do_run(ra, false);
        if (*sweep_cmd) return do_run(sa, true);
        return do_verify(suite, full, vout, vverbose);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config_error;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return nan_abort;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver failure: %s (residual %.3e)\n", e.what(), e.residual());
        return solver_failure;
    } catch (const FixedPointError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return solver_failure;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return failure;
    }
}
