#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlpme/theory.hpp"

namespace nlpme::app {

Field bump_field(const Grid& grid, double amplitude, double beta, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("bump_field: radius must be positive");
    return Field::from_function(grid, [&](double x) {
        const double s = 1.0 - std::abs(x) / radius;
        return s > 0.0 ? amplitude * std::pow(s, beta) : 0.0;
    });
}

Field gaussian_field(const Grid& grid, double amplitude, double radius) {
    const double s2 = radius * radius / (2.0 * std::log(1e8));
    return Field::from_function(grid, [&](double x) { return amplitude * std::exp(-x * x / (2.0 * s2)); });
}

std::vector<double> log_spaced_times(double t_end, double decades, std::size_t count) {
    if (!(t_end > 0.0) || !(decades > 0.0) || count == 0) {
        throw std::invalid_argument("log_spaced_times: positive t_end, decades and count required");
    }
    std::vector<double> times(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = static_cast<double>(i + 1) / static_cast<double>(count);
        times[i] = t_end * std::pow(10.0, -decades * (1.0 - f));
    }
    times.back() = t_end;
    return times;
}

std::pair<double, double> detached_window(const Trajectory& traj, double r0, double span) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.support_radii[i] - r0 >= r0) {
            const double t_a = traj.times[i];
            if (!(t_a > 0.0)) throw std::invalid_argument("detached_window: front detached at t = 0");
            if (span * t_a > traj.times.back()) {
                throw std::invalid_argument("detached_window: run ends before " + format_real(span * t_a));
            }
            return {t_a, span * t_a};
        }
    }
    throw std::invalid_argument("detached_window: the front never reaches 2 r0");
}

FrontStudy front_study(const Field& u0, const SolverConfig& cfg, double r0) {
    FrontStudy s;
    s.traj = run(u0, cfg);
    s.window = detached_window(s.traj, r0);
    s.fit = front_speed_fit(s.traj, r0, s.window);
    return s;
}

ScalingStudy scaling_study(const Field& u0, const SolverConfig& cfg, double A, double B, std::size_t outputs) {
    if (outputs == 0) throw std::invalid_argument("scaling_study: outputs must be positive");
    const Grid& g = u0.grid();
    const ScalingTransform s(A, B, cfg.m, cfg.alpha);
    const double T = s.time_factor();

    SolverConfig cu = cfg;
    cu.output_times.clear();
    for (std::size_t i = 1; i <= outputs; ++i) {
        cu.output_times.push_back(cfg.t_end * static_cast<double>(i) / static_cast<double>(outputs));
    }
    // U(t) = A u(T t, B x): the rescaled run covers [0, t_end / T].
    SolverConfig cU = cu;
    cU.t_end = cfg.t_end / T;
    for (double& t : cU.output_times) t /= T;
    cU.output_times.back() = cU.t_end;

    const Trajectory tu = run(u0, cu);
    const Trajectory tU = run(rescale_field(u0, A, B, g), cU);
    const Trajectory mapped = rescale(tu, s, g);

    ScalingStudy out;
    for (std::size_t i = 1; i < tU.size(); ++i) {
        const double e = relative_l2(tU.snapshots[i], mapped.snapshots[i]);
        out.times.push_back(tU.times[i]);
        out.discrepancy.push_back(e);
        out.max_discrepancy = std::max(out.max_discrepancy, e);
    }
    return out;
}

DominationStudy domination_study(const Grid& grid, const SolverConfig& cfg, BarrierParams p, std::size_t outputs) {
    p.speed = 1.0;  // placeholder until measured; U(0,.) does not depend on it
    p.validate();
    if (outputs == 0) throw std::invalid_argument("domination_study: outputs must be positive");
    const Field u0 = Field::from_function(grid, [&](double x) {
        return std::abs(x) < p.r0 ? 0.5 * barrier_eval(p, 0.0, x) : 0.0;
    });
    SolverConfig c = cfg;
    c.m = p.m;
    c.alpha = p.alpha;
    c.t_end = p.t_cap;
    c.output_times.clear();
    for (std::size_t i = 1; i <= outputs; ++i) {
        c.output_times.push_back(p.t_cap * static_cast<double>(i) / static_cast<double>(outputs));
    }

    DominationStudy s;
    s.traj = run(u0, c);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < s.traj.size(); ++i) {
        num += s.traj.times[i] * (s.traj.support_radii[i] - p.r0);
        den += s.traj.times[i] * s.traj.times[i];
    }
    s.measured_speed = num / den;
    if (!(s.measured_speed > 0.0)) throw std::runtime_error("domination_study: front did not advance");
    p.speed = 2.0 * s.measured_speed;
    s.barrier = p;
    s.reports = contact_audit(s.traj, p, c);
    s.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& r : s.reports) {
        if (r.t > 0.0) s.min_margin = std::min(s.min_margin, r.min_margin);
    }
    return s;
}

}  // namespace nlpme::app
