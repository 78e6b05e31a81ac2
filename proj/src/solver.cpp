#include "nlpme/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nlpme/theory.hpp"

namespace nlpme {

void SolverConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in (0, 2)");
    if (d < 1) throw std::invalid_argument("dimension d must be positive");
    const double threshold = m_alpha(d, alpha);
    if (!(m > threshold)) {
        throw std::invalid_argument("existence hypothesis m > m_alpha violated: m = " + format_real(m) +
                                    ", m_alpha(d, alpha) = " + format_real(threshold));
    }
    if (!(delta >= 0.0)) throw std::invalid_argument("viscosity delta must be non-negative");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw std::invalid_argument("cfl_safety must lie in (0, 1]");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
    if (save_every == 0) throw std::invalid_argument("save_every must be positive");
    if (!(support_threshold_rel > 0.0)) throw std::invalid_argument("support_threshold_rel must be positive");
    double prev = 0.0;
    for (double t : output_times) {
        if (!(t > prev) || t > t_end) {
            throw std::invalid_argument("output_times must be strictly increasing within (0, t_end]");
        }
        prev = t;
    }
}

void Trajectory::record(double t, Field u) {
    times.push_back(t);
    masses.push_back(mass(u));
    sup_norms.push_back(sup_norm(u));
    support_radii.push_back(support_radius(u, support_threshold));
    snapshots.push_back(std::move(u));
}

StepResult step(const Field& u, const SolverConfig& cfg, const MultiplierPlan& plan, double dt_max) {
    const Grid& g = u.grid();
    const std::size_t n = g.n();
    const double dx = g.dx();

    Field v(g);
    double v_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        v[j] = std::pow(std::max(u[j], 0.0), cfg.m - 1.0);
        v_max = std::max(v_max, v[j]);
    }
    const Field grad = frac_gradient_spectral(v, plan);

    // velocity[j] lives at interface j+1/2
    std::vector<double> velocity(n);
    double w_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        velocity[j] = -0.5 * (grad[j] + grad[g.wrap(static_cast<std::ptrdiff_t>(j) + 1)]);
        w_max = std::max(w_max, std::abs(velocity[j]));
    }

    // Linearized about its maximum the drift term acts as -(m-1) u^{m-1} (-Delta)^{alpha/2},
    // whose largest grid eigenvalue bounds dt alongside transport and viscosity.
    const double k_nyquist = std::numbers::pi / dx;
    const double rate = 2.0 * w_max / dx + 2.0 * cfg.delta / (dx * dx) +
                        (cfg.m - 1.0) * v_max * std::pow(k_nyquist, cfg.alpha);
    if (rate == 0.0) return {u, dt_max};
    const double dt = std::min(dt_max, cfg.cfl_safety / rate);

    std::vector<double> flux(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double w = velocity[j];
        flux[j] = w > 0.0 ? w * u[j] : w * u[g.wrap(static_cast<std::ptrdiff_t>(j) + 1)];
    }

    Field out(g);
    const double lambda = dt / dx;
    const double mu = dt * cfg.delta / (dx * dx);
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<std::ptrdiff_t>(j);
        const double left_flux = flux[g.wrap(jj - 1)];
        out[j] = u[j] - lambda * (flux[j] - left_flux) +
                 mu * (u.at_wrapped(jj + 1) - 2.0 * u[j] + u.at_wrapped(jj - 1));
    }
    if (!out.all_finite()) throw SolverAbort("non-finite value in step", 0.0);
    return {std::move(out), dt};
}

Trajectory run(const Field& u0, const SolverConfig& cfg) {
    cfg.validate();
    const Grid& g = u0.grid();
    const double u0_sup = sup_norm(u0);
    if (min_value(u0) < -1e-12 * u0_sup) throw std::invalid_argument("run: initial data must be non-negative");

    Trajectory traj;
    traj.support_threshold = cfg.support_threshold_rel * u0_sup;
    const double boundary = 0.8 * g.half_length();
    if (support_radius(u0, traj.support_threshold) > boundary) {
        throw std::invalid_argument("run: initial support must lie inside 0.8 L_box");
    }
    traj.record(0.0, u0);
    if (cfg.t_end == 0.0) return traj;

    const MultiplierPlan plan(g, cfg.alpha);
    Field u = u0;
    double t = 0.0;
    std::size_t steps = 0;
    std::size_t next_output = 0;
    while (t < cfg.t_end) {
        const double target = cfg.output_times.empty() ? cfg.t_end : cfg.output_times[next_output];
        StepResult res = [&] {
            try {
                return step(u, cfg, plan, target - t);
            } catch (const SolverAbort&) {
                throw SolverAbort("non-finite value in step", t);
            }
        }();
        const bool reached = res.dt >= target - t;
        t = reached ? target : t + res.dt;
        u = std::move(res.u);
        ++steps;

        const double s = sup_norm(u);
        if (s > 10.0 * u0_sup) throw SolverAbort("blow-up guard: sup norm exceeds 10 sup|u0|", t);
        if (support_radius(u, traj.support_threshold) > boundary) {
            throw SolverAbort("boundary guard: support radius exceeds 0.8 L_box", t);
        }
        if (steps >= cfg.max_steps) throw SolverAbort("step limit reached", t);

        if (cfg.output_times.empty()) {
            if (steps % cfg.save_every == 0 || t >= cfg.t_end) traj.record(t, u);
        } else if (reached) {
            traj.record(t, u);
            ++next_output;
            if (next_output == cfg.output_times.size()) break;
        }
    }
    return traj;
}

namespace {

struct LogSamples {
    std::vector<double> log_t;
    std::vector<double> log_r;
};

LogSamples window_samples(const Trajectory& traj, double r0, std::pair<double, double> w) {
    if (!(w.first < w.second)) throw std::invalid_argument("front fit: empty time window");
    LogSamples s;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        if (t < w.first || t > w.second) continue;
        const double excess = traj.support_radii[i] - r0;
        if (!(t > 0.0) || !(excess > 0.0)) {
            throw std::invalid_argument("front fit: support radius must exceed r0 at positive times in the window (t = " +
                                        format_real(t) + ")");
        }
        s.log_t.push_back(std::log(t));
        s.log_r.push_back(std::log(excess));
    }
    if (s.log_t.size() < 5) throw std::invalid_argument("front fit: fewer than 5 snapshots in window");
    return s;
}

}  // namespace

FrontFit front_speed_fit(const Trajectory& traj, double r0, std::pair<double, double> t_window) {
    const LogSamples s = window_samples(traj, r0, t_window);
    const double n = static_cast<double>(s.log_t.size());
    double mt = 0.0, mr = 0.0;
    for (std::size_t i = 0; i < s.log_t.size(); ++i) {
        mt += s.log_t[i];
        mr += s.log_r[i];
    }
    mt /= n;
    mr /= n;
    double stt = 0.0, str = 0.0;
    for (std::size_t i = 0; i < s.log_t.size(); ++i) {
        stt += (s.log_t[i] - mt) * (s.log_t[i] - mt);
        str += (s.log_t[i] - mt) * (s.log_r[i] - mr);
    }
    if (stt == 0.0) throw std::invalid_argument("front fit: degenerate window (all samples at one time)");
    FrontFit fit;
    fit.exponent = str / stt;
    fit.amplitude = std::exp(mr - fit.exponent * mt);
    fit.samples = s.log_t.size();
    return fit;
}

double front_amplitude_fit(const Trajectory& traj, double r0, std::pair<double, double> t_window, double exponent) {
    const LogSamples s = window_samples(traj, r0, t_window);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.log_t.size(); ++i) acc += s.log_r[i] - exponent * s.log_t[i];
    return std::exp(acc / static_cast<double>(s.log_t.size()));
}

namespace {

std::string snapshot_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%05zu.csv", index);
    return buf;
}

}  // namespace

void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir, bool with_snapshots) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "diagnostics.csv");
    if (!out) throw std::runtime_error("cannot write " + (dir / "diagnostics.csv").string());
    out << "t,mass,sup_norm,support_radius\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << format_real(traj.times[i]) << ',' << format_real(traj.masses[i]) << ','
            << format_real(traj.sup_norms[i]) << ',' << format_real(traj.support_radii[i]) << '\n';
    }
    if (!with_snapshots) return;
    const auto snap_dir = dir / "snapshots";
    std::filesystem::create_directories(snap_dir);
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        write_field_csv(traj.snapshots[i], snap_dir / snapshot_name(i));
    }
}

Trajectory read_trajectory(const std::filesystem::path& dir) {
    const auto diag = dir / "diagnostics.csv";
    std::ifstream in(diag);
    if (!in) throw std::runtime_error("trajectory file not found: " + diag.string());
    std::string line;
    std::getline(in, line);
    if (line != "t,mass,sup_norm,support_radius") {
        throw std::runtime_error(diag.string() + ": unexpected header");
    }
    Trajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(parse_real(cell));
        if (row.size() != 4) throw std::runtime_error(diag.string() + ": malformed row");
        traj.times.push_back(row[0]);
        traj.masses.push_back(row[1]);
        traj.sup_norms.push_back(row[2]);
        traj.support_radii.push_back(row[3]);
    }
    const auto snap_dir = dir / "snapshots";
    if (std::filesystem::exists(snap_dir)) {
        for (std::size_t i = 0; i < traj.size(); ++i) {
            traj.snapshots.push_back(read_field_csv(snap_dir / snapshot_name(i)));
        }
    }
    return traj;
}

}  // namespace nlpme
