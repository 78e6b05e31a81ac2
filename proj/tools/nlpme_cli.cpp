// Command-line driver: simulate | front-speed | scaling-check | barrier-audit | bench | acceptance.
//
// Exit codes: 0 success, 1 validation error, 2 runtime abort, 3 invariant failure.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "experiments.hpp"
#include "nlpme/barrier.hpp"
#include "nlpme/operators.hpp"
#include "nlpme/solver.hpp"
#include "nlpme/theory.hpp"

#ifndef NLPME_VERSION
#define NLPME_VERSION "unversioned"
#endif

namespace fs = std::filesystem;
using namespace nlpme;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_abort = 2;
constexpr int exit_invariant = 3;

struct InvariantFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string out = "out";
    std::uint64_t seed = 1;
    std::size_t n = 1024;
    double L_box = 8.0;
    double m = 2.0;
    double alpha = 1.5;
    double delta = 0.0;
    double beta = 3.0;
    double r0 = 1.0;
    double amplitude = 1.0;
    double t_end = 1.0;
    double cfl = 0.4;
    std::size_t save_every = 100;
    std::size_t outputs = 0;
    double decades = 3.0;
    std::vector<double> t_window;
    std::string trajectory;
    double A = 2.0;
    double B = 2.0;
    double tol = 5e-2;
    double omega = 0.05;
    double t_cap = 1.0;
    int only = 0;
    std::string initial = "bump";
    std::string initial_file;
};

/// Every resolved parameter as `key=value`, in the format accepted by --config.
void write_metadata(const fs::path& dir, const std::string& command, const Options& o) {
    fs::create_directories(dir);
    std::map<std::string, std::string> kv{
        {"command", command},
        {"version", NLPME_VERSION},
        {"seed", std::to_string(o.seed)},
        {"n", std::to_string(o.n)},
        {"L-box", format_real(o.L_box)},
        {"m", format_real(o.m)},
        {"alpha", format_real(o.alpha)},
        {"delta", format_real(o.delta)},
        {"beta", format_real(o.beta)},
        {"r0", format_real(o.r0)},
        {"amplitude", format_real(o.amplitude)},
        {"t-end", format_real(o.t_end)},
        {"cfl", format_real(o.cfl)},
        {"save-every", std::to_string(o.save_every)},
        {"outputs", std::to_string(o.outputs)},
        {"decades", format_real(o.decades)},
        {"A", format_real(o.A)},
        {"B", format_real(o.B)},
        {"tol", format_real(o.tol)},
        {"omega", format_real(o.omega)},
        {"t-cap", format_real(o.t_cap)},
    };
    if (!o.t_window.empty()) kv["t-window"] = "[" + format_real(o.t_window[0]) + "," + format_real(o.t_window[1]) + "]";
    if (!o.trajectory.empty()) kv["trajectory"] = o.trajectory;
    kv["initial"] = o.initial;
    if (!o.initial_file.empty()) kv["initial-file"] = o.initial_file;
    std::ofstream out(dir / "metadata.txt");
    if (!out) throw std::runtime_error("cannot write " + (dir / "metadata.txt").string());
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

SolverConfig solver_config(const Options& o) {
    SolverConfig cfg;
    cfg.m = o.m;
    cfg.alpha = o.alpha;
    cfg.delta = o.delta;
    cfg.cfl_safety = o.cfl;
    cfg.t_end = o.t_end;
    cfg.save_every = o.save_every;
    if (o.outputs > 0) cfg.output_times = app::log_spaced_times(o.t_end, o.decades, o.outputs);
    return cfg;
}

Field analytic_initial_data(const Options& o, const Grid& g) {
    return o.initial == "gaussian" ? app::gaussian_field(g, o.amplitude, o.r0) : app::bump_field(g, o.amplitude, o.beta, o.r0);
}

/// A file-backed initial condition brings its own grid; --n and --L-box are then ignored.
Field initial_data(const Options& o) {
    if (o.initial != "file") return analytic_initial_data(o, Grid(o.n, o.L_box));
    if (o.initial_file.empty()) throw std::invalid_argument("--initial file requires --initial-file");
    return read_field_csv(o.initial_file);
}

int cmd_simulate(const Options& o) {
    const SolverConfig cfg = solver_config(o);
    const Trajectory traj = run(initial_data(o), cfg);
    write_metadata(o.out, "simulate", o);
    write_trajectory(traj, o.out);
    std::cout << "simulated " << traj.size() << " snapshots to t = " << format_real(traj.times.back()) << " in "
              << o.out << '\n';
    return exit_ok;
}

int cmd_front_speed(const Options& o) {
    Options eff = o;
    Trajectory traj;
    if (!o.trajectory.empty()) {
        traj = read_trajectory(o.trajectory);
    } else {
        if (eff.outputs == 0) eff.outputs = 90;
        traj = run(initial_data(eff), solver_config(eff));
    }
    const std::pair<double, double> window =
        o.t_window.empty() ? app::detached_window(traj, o.r0) : std::pair{o.t_window[0], o.t_window[1]};
    const FrontFit fit = front_speed_fit(traj, o.r0, window);

    write_metadata(o.out, "front-speed", eff);
    if (o.trajectory.empty()) write_trajectory(traj, o.out, false);
    std::ofstream f(fs::path(o.out) / "front_fit.csv");
    f << "exponent,amplitude,samples,t_lo,t_hi,inverse_alpha\n"
      << format_real(fit.exponent) << ',' << format_real(fit.amplitude) << ',' << fit.samples << ','
      << format_real(window.first) << ',' << format_real(window.second) << ',' << format_real(1.0 / o.alpha) << '\n';
    std::cout << "front exponent " << format_real(fit.exponent) << " (1/alpha = " << format_real(1.0 / o.alpha)
              << ") over [" << format_real(window.first) << ", " << format_real(window.second) << "], "
              << fit.samples << " samples\n";
    return exit_ok;
}

int cmd_scaling_check(const Options& o) {
    const app::ScalingStudy s = app::scaling_study(initial_data(o), solver_config(o), o.A, o.B, 10);
    write_metadata(o.out, "scaling-check", o);
    std::ofstream f(fs::path(o.out) / "scaling.csv");
    f << "t,rel_l2\n";
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        f << format_real(s.times[i]) << ',' << format_real(s.discrepancy[i]) << '\n';
    }
    std::cout << "max relative L2 discrepancy " << format_real(s.max_discrepancy) << " (tol " << format_real(o.tol)
              << ")\n";
    if (!(s.max_discrepancy <= o.tol)) throw InvariantFailure("scaling discrepancy exceeds tolerance");
    return exit_ok;
}

int cmd_barrier_audit(const Options& o) {
    BarrierParams p;
    p.r0 = o.r0;
    p.omega = o.omega;
    p.beta = o.beta;
    p.t_cap = o.t_cap;
    p.m = o.m;
    p.alpha = o.alpha;
    const std::size_t outputs = o.outputs > 0 ? o.outputs : 40;
    const app::DominationStudy s = app::domination_study(Grid(o.n, o.L_box), solver_config(o), p, outputs);
    write_metadata(o.out, "barrier-audit", o);
    write_audit_csv(s.reports, fs::path(o.out) / "audit.csv");
    std::size_t anomalies = 0;
    for (const auto& r : s.reports) anomalies += r.anomaly ? 1 : 0;
    std::cout << "measured speed " << format_real(s.measured_speed) << ", barrier speed "
              << format_real(s.barrier.speed) << ", min margin " << format_real(s.min_margin) << ", anomalies "
              << anomalies << '\n';
    if (!(s.min_margin > 0.0)) throw InvariantFailure("barrier crossed: min(U - u) <= 0");
    return exit_ok;
}

int cmd_bench(const Options& o) {
    write_metadata(o.out, "bench", o);
    std::ofstream f(fs::path(o.out) / "bench.csv");
    f << "n,step_seconds,quadrature_point_seconds\n";
    const OperatorConstants consts = calibrate_constants(o.alpha);
    for (std::size_t n = 256; n <= o.n; n *= 2) {
        const Grid g(n, o.L_box);
        const SolverConfig cfg = solver_config(o);
        const MultiplierPlan plan(g, o.alpha);
        const QuadraturePlan qp(g, consts);
        Field u = analytic_initial_data(o, g);  // the file grid has a fixed size
        const int steps = 200;
        auto t0 = std::chrono::steady_clock::now();
        for (int k = 0; k < steps; ++k) u = step(u, cfg, plan).u;
        const double per_step = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / steps;
        t0 = std::chrono::steady_clock::now();
        double sink = 0.0;
        for (std::size_t i = 0; i < n; i += n / 16) sink += frac_laplacian_quadrature(u, qp, i);
        const double per_point = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 16;
        if (!std::isfinite(sink)) throw std::runtime_error("bench: non-finite quadrature value");
        f << n << ',' << format_real(per_step) << ',' << format_real(per_point) << '\n';
        std::cout << "n=" << n << " step " << per_step << " s, quadrature point " << per_point << " s\n";
    }
    return exit_ok;
}

int cmd_acceptance(const Options& o) {
    app::AcceptanceOptions opt;
    opt.seed = o.seed;
    opt.only = o.only;
    const auto results = app::run_acceptance(opt, &std::cout);
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << '\n';
    if (failed != 0) throw InvariantFailure("acceptance criteria failed");
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal porous medium laboratory"};
    app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::ignore);  // metadata.txt also records command and version
    app.require_subcommand(1);

    Options o;
    app.add_option("--out", o.out, "output directory");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--n", o.n, "grid nodes (even)");
    app.add_option("--L-box", o.L_box, "half-length of the periodic box");
    app.add_option("--m", o.m, "nonlinearity exponent");
    app.add_option("--alpha", o.alpha, "fractional order in (0,2)");
    app.add_option("--delta", o.delta, "viscosity");
    app.add_option("--beta", o.beta, "bump / barrier exponent");
    app.add_option("--r0", o.r0, "initial support radius");
    app.add_option("--amplitude", o.amplitude, "initial amplitude");
    app.add_option("--t-end", o.t_end, "final time");
    app.add_option("--cfl", o.cfl, "CFL safety factor in (0,1]");
    app.add_option("--save-every", o.save_every, "snapshot stride in steps");
    app.add_option("--outputs", o.outputs, "log-spaced snapshot count (0: use --save-every)");
    app.add_option("--decades", o.decades, "decades spanned by log-spaced snapshots");
    app.add_option("--t-window", o.t_window, "front fit window t_lo t_hi")->expected(2);
    app.add_option("--trajectory", o.trajectory, "fit an existing trajectory directory");
    app.add_option("--A", o.A, "scaling amplitude factor");
    app.add_option("--B", o.B, "scaling space factor");
    app.add_option("--tol", o.tol, "scaling-check tolerance");
    app.add_option("--omega", o.omega, "barrier floor omega");
    app.add_option("--t-cap", o.t_cap, "barrier horizon T");
    app.add_option("--only", o.only, "acceptance: run one criterion by number");
    app.add_option("--initial", o.initial, "initial condition: bump, gaussian or file")
        ->check(CLI::IsMember({"bump", "gaussian", "file"}));
    app.add_option("--initial-file", o.initial_file, "snapshot CSV (x,u) used by --initial file")
        ->check(CLI::ExistingFile);

    const std::vector<std::pair<std::string, int (*)(const Options&)>> commands{
        {"simulate", cmd_simulate},           {"front-speed", cmd_front_speed}, {"scaling-check", cmd_scaling_check},
        {"barrier-audit", cmd_barrier_audit}, {"bench", cmd_bench},             {"acceptance", cmd_acceptance},
    };
    for (const auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }
    // Regularized comparisons tie the barrier floor to the viscosity unless it is set explicitly.
    if (app.get_option("--omega")->count() == 0 && o.delta > 0.0) o.omega = std::sqrt(o.delta);

    try {
        for (const auto& [name, fn] : commands) {
            if (app.got_subcommand(name)) return fn(o);
        }
    } catch (const InvariantFailure& e) {
        std::cerr << "invariant failure: " << e.what() << '\n';
        return exit_invariant;
    } catch (const SolverAbort& e) {
        std::cerr << "runtime abort: " << e.what() << '\n';
        return exit_abort;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "runtime abort: " << e.what() << '\n';
        return exit_abort;
    }
    return exit_validation;
}
