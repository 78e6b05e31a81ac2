#include "nlpme/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

namespace nlpme {

void BarrierParams::validate() const {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("barrier: alpha must lie in (0, 2)");
    if (!(m > 1.0)) throw std::invalid_argument("barrier: m must exceed 1");
    const double beta_min = std::max(2.0, alpha / (m - 1.0));
    if (!(beta > beta_min)) {
        throw std::invalid_argument("barrier: beta must exceed max(2, alpha/(m-1)) = " + format_real(beta_min));
    }
    if (!(r0 >= 2.0)) throw std::invalid_argument("barrier: r0 must be at least 2");
    if (!(speed > 0.0)) throw std::invalid_argument("barrier: speed must be positive");
    if (!(omega > 0.0)) throw std::invalid_argument("barrier: omega must be positive");
    if (!(t_cap > 0.0)) throw std::invalid_argument("barrier: t_cap must be positive");
}

double BarrierParams::h(double t, double x) const {
    const double gap = std::max(radius(t) - std::abs(x), 0.0);
    return std::pow(std::pow(omega, beta) + std::pow(gap, beta), 1.0 / beta);
}

double barrier_eval(const BarrierParams& p, double t, double x) {
    const double wb = std::pow(p.omega, p.beta);
    const double gap = std::max(p.radius(t) - std::abs(x), 0.0);
    return wb + std::pow(gap, p.beta) + wb * t / p.t_cap;
}

BarrierDerivatives barrier_derivatives(const BarrierParams& p, double t, double x) {
    if (!(std::abs(x) > 1.0)) throw std::invalid_argument("barrier_derivatives: requires |x| > 1");
    const double wb = std::pow(p.omega, p.beta);
    BarrierDerivatives d;
    d.dt_U = wb / p.t_cap;
    const double gap = p.radius(t) - std::abs(x);
    if (gap <= 0.0) return d;
    d.dt_U += p.beta * p.speed * std::pow(gap, p.beta - 1.0);
    d.grad_U = -p.beta * std::pow(gap, p.beta - 1.0);
    d.lap_U = p.beta * (p.beta - 1.0) * std::pow(gap, p.beta - 2.0);
    return d;
}

Field barrier_field(const BarrierParams& p, double t, const Grid& grid) {
    return Field::from_function(grid, [&](double x) { return barrier_eval(p, t, x); });
}

double barrier_gamma(const BarrierParams& p, const OperatorConstants& consts, double t, double x) {
    // c_lap / 2 is the coefficient of the symmetric second-difference kernel.
    return 0.5 * consts.c_lap * p.h(t, x) / (p.beta * consts.c_grad);
}

double near_field_constant(const OperatorConstants& consts) { return consts.c_grad / consts.c_lap; }

namespace {

std::size_t node_index(const Grid& g, double x) {
    const double pos = (x + g.half_length()) / g.dx();
    const double idx = std::round(pos);
    if (std::abs(pos - idx) > 1e-9 || idx < 0.0 || idx >= static_cast<double>(g.n())) {
        throw std::invalid_argument("split_integrals: x_c = " + format_real(x) + " is not a grid node");
    }
    return static_cast<std::size_t>(idx);
}

}  // namespace

SplitIntegrals split_integrals(const Field& w, const SplitIntegralParams& sp, double alpha) {
    const Grid& g = w.grid();
    const double h = g.dx();
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("split_integrals: alpha must lie in (0, 2)");
    if (!(sp.gamma >= h)) throw std::invalid_argument("split_integrals: gamma is smaller than the grid spacing");
    if (sp.x_c == 0.0) throw std::invalid_argument("split_integrals: x_c = 0 has no outward direction");
    const std::size_t i = node_index(g, sp.x_c);
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const std::ptrdiff_t s = sp.x_c > 0.0 ? 1 : -1;  // x_hat
    const bool pure = alpha < 1.0;
    const double c_grad = sp.consts.c_grad;
    const double c_bar = 0.5 * sp.consts.c_lap;
    const double wi = w[i];
    const double base = pure ? 0.0 : wi;
    const std::size_t half = g.n() / 2;

    SplitIntegrals r;
    for (std::size_t k = 1; k <= half; ++k) {
        const double z = h * static_cast<double>(k);
        const bool in = z < sp.gamma;
        const auto kk = static_cast<std::ptrdiff_t>(k);
        const double w_plus = w.at_wrapped(ii + s * kk);
        const double w_minus = w.at_wrapped(ii - s * kk);
        // z = L is one node shared by both half-lines.
        const double trap = k == half ? 0.5 : 1.0;
        const double even = trap * h * std::pow(z, -1.0 - alpha);
        const double j_side = c_bar * (w_plus + w_minus - 2.0 * wi) * even;
        (in ? r.J_in_plus : r.J_out_plus) += j_side;
        (in ? r.J_in_minus : r.J_out_minus) += j_side;
        if (k == half) continue;  // the odd kernel cancels at z = L
        const double odd = h * std::pow(z, -alpha);
        (in ? r.I_in_plus : r.I_out_plus) += c_grad * (w_plus - base) * odd;
        (in ? r.I_in_minus : r.I_out_minus) -= c_grad * (w_minus - base) * odd;
    }

    // Excluded y = 0 node: generalized Euler-Maclaurin terms for the power
    // singularities of each half-line, written in the outward coordinate.
    const double d1 = static_cast<double>(s) * (w.at_wrapped(ii + 1) - w.at_wrapped(ii - 1)) / (2.0 * h);
    const double d2 = (w.at_wrapped(ii + 1) + w.at_wrapped(ii - 1) - 2.0 * wi) / (h * h);
    const double z1 = -std::riemann_zeta(alpha - 1.0) * std::pow(h, 2.0 - alpha);
    const double z2 = -std::riemann_zeta(alpha - 2.0) * std::pow(h, 3.0 - alpha);
    double odd_plus = z1 * d1 + z2 * 0.5 * d2;
    double odd_minus = z1 * d1 - z2 * 0.5 * d2;
    if (pure) {
        const double z0 = -std::riemann_zeta(alpha) * std::pow(h, 1.0 - alpha);
        odd_plus += z0 * wi;
        odd_minus -= z0 * wi;
    }
    r.I_in_plus += c_grad * odd_plus;
    r.I_in_minus += c_grad * odd_minus;
    r.J_in_plus += c_bar * z1 * d2;
    r.J_in_minus += c_bar * z1 * d2;
    return r;
}

Estim2Audit audit_estim2(const Field& w, const SplitIntegralParams& sp, double alpha, double rel_tol) {
    const double scale = sup_norm(w);
    const double tol = 1e-12 * std::max(scale, std::numeric_limits<double>::min());
    const Grid& g = w.grid();
    const std::size_t i = node_index(g, sp.x_c);
    double w_max = -std::numeric_limits<double>::infinity();
    for (double x : w.values()) w_max = std::max(w_max, x);
    if (std::abs(w[i]) > tol) throw std::invalid_argument("audit_estim2: w(x_c) must vanish");
    if (w_max > tol) throw std::invalid_argument("audit_estim2: w must be non-positive");

    const SplitIntegrals s = split_integrals(w, sp, alpha);
    Estim2Audit a;
    a.lhs = -s.I_in_plus;
    a.rhs = -near_field_constant(sp.consts) * sp.gamma * s.J_in_plus;
    const double mag = std::max(std::abs(a.lhs), std::abs(a.rhs));
    a.passed = a.lhs <= a.rhs + rel_tol * mag;
    return a;
}

namespace {

ContactReport audit_snapshot(double t, const Field& u, const BarrierParams& p, const SolverConfig& cfg,
                             const MultiplierPlan& plan, const OperatorConstants& consts) {
    const Grid& g = u.grid();
    const Field U = barrier_field(p, t, g);
    ContactReport rep;
    rep.t = t;
    rep.min_margin = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < g.n(); ++j) {
        const double margin = U[j] - u[j];
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            arg = j;
        }
    }
    const double x_c = g.x(arg);
    rep.argmin_x = x_c;
    rep.near_contact = rep.min_margin <= 10.0 * std::pow(g.dx(), p.beta);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (!(std::abs(x_c) > 1.0)) {
        rep.anomaly = rep.near_contact;
        rep.lhs = rep.rhs = rep.i_out_plus_v = rep.i_out_plus_V = rep.error_term_e = nan;
        return rep;
    }

    Field V(g), v(g);
    for (std::size_t j = 0; j < g.n(); ++j) {
        V[j] = std::pow(U[j], cfg.m - 1.0);
        v[j] = std::pow(std::max(u[j], 0.0), cfg.m - 1.0);
    }
    // grad P and Delta P for P = (-Delta)^{alpha/2-1} V, applied as single symbols.
    const double grad_P = frac_gradient_spectral(V, plan)[arg];
    const double lap_P = frac_laplacian_spectral(V, plan)[arg];

    const BarrierDerivatives d = barrier_derivatives(p, t, x_c);
    const double dUdx = x_c > 0.0 ? d.grad_U : -d.grad_U;

    SplitIntegralParams sp;
    sp.x_c = x_c;
    sp.consts = consts;
    sp.gamma = std::max(barrier_gamma(p, consts, t, x_c), g.dx());
    rep.i_out_plus_v = split_integrals(v, sp, cfg.alpha).I_out_plus;
    rep.i_out_plus_V = split_integrals(V, sp, cfg.alpha).I_out_plus;
    rep.error_term_e = std::abs(d.grad_U) * (rep.i_out_plus_V - rep.i_out_plus_v);

    rep.lhs = d.dt_U;
    rep.rhs = dUdx * grad_P + U[arg] * lap_P + cfg.delta * d.lap_U + rep.error_term_e;
    return rep;
}

}  // namespace

std::vector<ContactReport> contact_audit(const Trajectory& traj, const BarrierParams& p, const SolverConfig& cfg) {
    if (p.m != cfg.m || p.alpha != cfg.alpha) {
        throw std::invalid_argument("contact_audit: barrier and solver must share m and alpha");
    }
    std::vector<ContactReport> reports(traj.snapshots.size());
    if (reports.empty()) return reports;
    const MultiplierPlan plan(traj.snapshots.front().grid(), cfg.alpha);
    const OperatorConstants consts = calibrate_constants(cfg.alpha, cfg.d);

    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::min<std::size_t>(reports.size(), 16));
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t k = w; k < reports.size(); k += workers) {
                        if (!(traj.snapshots[k].grid() == plan.grid())) {
                            throw std::invalid_argument("contact_audit: snapshots must share one grid");
                        }
                        reports[k] = audit_snapshot(traj.times[k], traj.snapshots[k], p, cfg, plan, consts);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return reports;
}

void write_audit_csv(const std::vector<ContactReport>& reports, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,min_margin,argmin_x,lhs,rhs,e,i_out_v,i_out_V\n";
    for (const auto& r : reports) {
        out << format_real(r.t) << ',' << format_real(r.min_margin) << ',' << format_real(r.argmin_x) << ','
            << format_real(r.lhs) << ',' << format_real(r.rhs) << ',' << format_real(r.error_term_e) << ','
            << format_real(r.i_out_plus_v) << ',' << format_real(r.i_out_plus_V) << '\n';
    }
}

IoutBound iout_bound_check(const Field& v, const SplitIntegralParams& sp, const BarrierParams& p, double alpha,
                           double eps, double t) {
    const double scale = sup_norm(v);
    if (min_value(v) < -1e-12 * scale) throw std::invalid_argument("iout_bound_check: v must be non-negative");
    IoutBound b;
    const double i_out = split_integrals(v, sp, alpha).I_out_plus;
    if (alpha > 1.0) {
        const double h = p.h(t, sp.x_c);
        b.lhs = -i_out;
        b.bound = std::pow(2.0 * std::pow(h, p.beta), p.m - 1.0) * std::pow(h, 1.0 - alpha);
    } else {
        if (!(eps > 0.0)) throw std::invalid_argument("iout_bound_check: eps must be positive");
        b.lhs = std::abs(i_out);
        b.bound = std::pow(p.r0, 1.0 - alpha + eps);
    }
    b.ratio = b.lhs / b.bound;
    return b;
}

}  // namespace nlpme
