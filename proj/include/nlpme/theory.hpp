#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nlpme/domain.hpp"
#include "nlpme/solver.hpp"

namespace nlpme {

/// Exponent threshold 1 + (1-alpha)_+/d + 2 (1 - 1/alpha)_+.
double m_alpha(int d, double alpha);

/// U(t,x) = A u(T t, B x) with T = A^{m-1} B^alpha.
class ScalingTransform {
public:
    ScalingTransform(double A, double B, double m, double alpha);

    double A() const { return A_; }
    double B() const { return B_; }
    double m() const { return m_; }
    double alpha() const { return alpha_; }
    double time_factor() const;

    ScalingTransform inverse() const { return {1.0 / A_, 1.0 / B_, m_, alpha_}; }

private:
    double A_;
    double B_;
    double m_;
    double alpha_;
};

/// Samples A u(x_target * B) from a field on another grid. Every B*x' must be
/// a source node (to 1e-9 dx) or lie outside the source box, where u is taken
/// as 0. Throws std::invalid_argument otherwise.
Field rescale_field(const Field& u, double A, double B, const Grid& target);

/// Rescaled trajectory on `target` (default: the exact relabelling grid (n, L/B)).
Trajectory rescale(const Trajectory& traj, const ScalingTransform& s,
                   const std::optional<Grid>& target = std::nullopt);

struct OptimalR1 {
    double r1 = 0.0;
    double radius = 0.0;
};

/// Minimizer of r1 + C0 L^{m-1} r1^{1-alpha} t for alpha > 1, and R0 plus the minimum.
OptimalR1 optimal_r1(double R0, double L, double t, double m, double alpha, double C0);

enum class EnvelopeCase { alpha_gt1, alpha_le1 };

struct EnvelopeReport {
    EnvelopeCase case_tag = EnvelopeCase::alpha_le1;
    double r0 = 0.0;
    double r1_opt = 0.0;
    double eps = 0.0;
    std::vector<double> tk;  // T_0 = 0, ..., T_{k_max}
    std::vector<double> ck;  // C_0, ..., C_{k_max - 1}
    double fitted_exponent = 0.0;

    /// Piecewise-linear radius (k+1) R0 + C_k (t - T_k) on [T_k, T_{k+1}].
    double radius(double t) const;
    /// Table t -> R(t): the row t = 0, then n log-spaced points up to T_{k_max}.
    std::vector<std::pair<double, double>> table(std::size_t n) const;
};

EnvelopeReport bootstrap_envelope(double R0, double alpha, double eps, int k_max, double c_scale = 1.0);

/// R0 + C0 L^{(m-1)/alpha} t^{1/alpha}.
double predicted_front(double R0, double L, double t, double m, double alpha, double C0);

/// Envelope CSV `t,R_predicted`.
void write_envelope_csv(const std::vector<std::pair<double, double>>& rows, const std::filesystem::path& path);

}  // namespace nlpme
