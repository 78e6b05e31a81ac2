#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "nlpme/domain.hpp"
#include "nlpme/operators.hpp"
#include "nlpme/solver.hpp"

namespace nlpme {

/**
 * Parameters of the supersolution
 *
 *   U(t,x) = omega^beta + (R(t) - |x|)_+^beta + omega^beta t / t_cap,   R(t) = r0 + speed t.
 *
 * Writing U = h^beta + H^beta with H^beta = omega^beta t / t_cap gives the
 * local scale h used by the cutoff rule for the split integrals.
 */
struct BarrierParams {
    double r0 = 2.0;
    double speed = 1.0;
    double omega = 0.05;
    double beta = 3.0;
    double t_cap = 1.0;
    double m = 2.0;
    double alpha = 1.5;

    /// beta > max(2, alpha/(m-1)), r0 >= 2, positive speed, omega, t_cap.
    void validate() const;

    double radius(double t) const { return r0 + speed * t; }
    double h(double t, double x) const;
};

double barrier_eval(const BarrierParams& p, double t, double x);

struct BarrierDerivatives {
    double dt_U = 0.0;
    double grad_U = 0.0;  // signed radial derivative, <= 0
    double lap_U = 0.0;   // 1-D second derivative
};

/// Closed-form derivatives; requires |x| > 1.
BarrierDerivatives barrier_derivatives(const BarrierParams& p, double t, double x);

Field barrier_field(const BarrierParams& p, double t, const Grid& grid);

/// Cutoff from c_grad gamma |grad U| <= (c_lap/2) U specialised to the barrier: c_lap h / (2 beta c_grad).
double barrier_gamma(const BarrierParams& p, const OperatorConstants& consts, double t, double x);

struct SplitIntegralParams {
    double gamma = 0.0;
    double x_c = 0.0;  // must be a grid node, x_c != 0; x_c < 0 is handled by mirroring
    OperatorConstants consts;
};

/**
 * The nonlocal drift I and diffusion J at x_c split over |y| < gamma ("in")
 * and |y| >= gamma ("out"), and over the half-lines y.x_hat >= 0 ("plus") and
 * y.x_hat < 0 ("minus").
 *
 *   I: c_grad (w(x_c+y) - w(x_c)) (y.x_hat) |y|^{-1-alpha}   alpha >= 1
 *      c_grad  w(x_c+y)           (y.x_hat) |y|^{-1-alpha}   alpha <  1
 *   J: c_lap/2 (w(x_c+y) + w(x_c-y) - 2 w(x_c)) |y|^{-1-alpha}
 *
 * Displacements range over one period |y| <= L (ImageSum::window), so the
 * pieces add up to the window-mode quadrature evaluators.
 */
struct SplitIntegrals {
    double I_in_plus = 0.0;
    double I_in_minus = 0.0;
    double I_out_plus = 0.0;
    double I_out_minus = 0.0;
    double J_in_plus = 0.0;
    double J_in_minus = 0.0;
    double J_out_plus = 0.0;
    double J_out_minus = 0.0;

    double I() const { return I_in_plus + I_in_minus + I_out_plus + I_out_minus; }
    double J() const { return J_in_plus + J_in_minus + J_out_plus + J_out_minus; }
};

SplitIntegrals split_integrals(const Field& w, const SplitIntegralParams& sp, double alpha);

/// c~ multiplying gamma J_in,+ in the near-field comparison; equals c_grad / c_lap.
double near_field_constant(const OperatorConstants& consts);

struct Estim2Audit {
    double lhs = 0.0;  // -I_in,+(w)
    double rhs = 0.0;  // -c~ gamma J_in,+(w)
    bool passed = false;
};

/// Requires w <= 0 with w(x_c) = 0 (to 1e-12 of max|w|).
Estim2Audit audit_estim2(const Field& w, const SplitIntegralParams& sp, double alpha, double rel_tol = 1e-8);

struct ContactReport {
    double t = 0.0;
    double min_margin = 0.0;
    double argmin_x = 0.0;
    bool near_contact = false;
    bool anomaly = false;  // minimiser inside the unit ball, where the barrier is not C^2
    double lhs = 0.0;      // dt U
    double rhs = 0.0;      // grad U . grad P + U Delta P + delta Delta U + e
    double i_out_plus_v = 0.0;
    double i_out_plus_V = 0.0;
    double error_term_e = 0.0;
};

/// One report per snapshot; near contact means min(U - u) <= 10 dx^beta.
std::vector<ContactReport> contact_audit(const Trajectory& traj, const BarrierParams& p, const SolverConfig& cfg);

void write_audit_csv(const std::vector<ContactReport>& reports, const std::filesystem::path& path);

struct IoutBound {
    double lhs = 0.0;    // -I_out,+(v) for alpha > 1, |I_out,+(v)| for alpha <= 1
    double bound = 0.0;  // G(2 h^beta) h^{1-alpha}, or r0^{1-alpha+eps}
    double ratio = 0.0;
};

/// Far-field drift against its a-priori bound at x_c, with h taken from the barrier at time t.
IoutBound iout_bound_check(const Field& v, const SplitIntegralParams& sp, const BarrierParams& p, double alpha,
                           double eps, double t = 0.0);

}  // namespace nlpme
