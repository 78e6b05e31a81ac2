#include "nlpme/theory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace nlpme {

double m_alpha(int d, double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("m_alpha: alpha must lie in (0, 2)");
    if (d < 1) throw std::invalid_argument("m_alpha: dimension must be positive");
    return 1.0 + std::max(0.0, 1.0 - alpha) / d + 2.0 * std::max(0.0, 1.0 - 1.0 / alpha);
}

ScalingTransform::ScalingTransform(double A, double B, double m, double alpha)
    : A_(A), B_(B), m_(m), alpha_(alpha) {
    if (!(A > 0.0) || !(B > 0.0)) throw std::invalid_argument("ScalingTransform: A and B must be positive");
}

double ScalingTransform::time_factor() const { return std::pow(A_, m_ - 1.0) * std::pow(B_, alpha_); }

Field rescale_field(const Field& u, double A, double B, const Grid& target) {
    const Grid& src = u.grid();
    const double L = src.half_length();
    const double dx = src.dx();
    Field out(target);
    for (std::size_t j = 0; j < target.n(); ++j) {
        const double y = B * target.x(j);
        const double pos = (y + L) / dx;
        const double idx = std::round(pos);
        const bool inside = idx >= 0.0 && idx < static_cast<double>(src.n());
        if (inside && std::abs(pos - idx) <= 1e-9) {
            out[j] = A * u[static_cast<std::size_t>(idx)];
        } else if (y < -L - 1e-9 * dx || y >= L - 1e-9 * dx) {
            out[j] = 0.0;  // outside the source box: compact support
        } else {
            throw std::invalid_argument("rescale: B = " + format_real(B) +
                                        " is not grid-compatible (B x is not a source node)");
        }
    }
    return out;
}

Trajectory rescale(const Trajectory& traj, const ScalingTransform& s, const std::optional<Grid>& target) {
    if (traj.snapshots.size() != traj.size()) throw std::invalid_argument("rescale: trajectory has no snapshots");
    Trajectory out;
    out.support_threshold = s.A() * traj.support_threshold;
    if (traj.size() == 0) return out;
    const Grid& src = traj.snapshots.front().grid();
    const Grid dst = target.value_or(Grid(src.n(), src.half_length() / s.B()));
    const double T = s.time_factor();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out.record(traj.times[i] / T, rescale_field(traj.snapshots[i], s.A(), s.B(), dst));
    }
    return out;
}

OptimalR1 optimal_r1(double R0, double L, double t, double m, double alpha, double C0) {
    if (!(alpha > 1.0)) throw std::invalid_argument("optimal_r1: requires alpha > 1");
    if (!(R0 > 0.0 && L > 0.0 && t > 0.0 && m > 0.0 && C0 > 0.0)) {
        throw std::invalid_argument("optimal_r1: arguments must be positive");
    }
    const double K = C0 * std::pow(L, m - 1.0) * t;
    OptimalR1 res;
    res.r1 = std::pow((alpha - 1.0) * K, 1.0 / alpha);
    res.radius = R0 + res.r1 + K * std::pow(res.r1, 1.0 - alpha);
    return res;
}

double EnvelopeReport::radius(double t) const {
    if (tk.empty()) return r0;
    if (t <= 0.0) return r0;
    if (t >= tk.back()) return r0 * static_cast<double>(tk.size());
    const auto it = std::upper_bound(tk.begin(), tk.end(), t);
    const auto k = static_cast<std::size_t>(std::distance(tk.begin(), it)) - 1;
    return static_cast<double>(k + 1) * r0 + ck[k] * (t - tk[k]);
}

std::vector<std::pair<double, double>> EnvelopeReport::table(std::size_t n) const {
    std::vector<std::pair<double, double>> rows;
    rows.emplace_back(0.0, radius(0.0));
    if (tk.size() < 2 || n < 2) return rows;
    const double lo = std::log(tk[1] / 10.0);
    const double hi = std::log(tk.back());
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        rows.emplace_back(t, radius(t));
    }
    return rows;
}

EnvelopeReport bootstrap_envelope(double R0, double alpha, double eps, int k_max, double c_scale) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("bootstrap_envelope: alpha must lie in (0, 1]");
    if (!(eps > 0.0 && eps < alpha)) throw std::invalid_argument("bootstrap_envelope: eps must lie in (0, alpha)");
    if (!(R0 >= 2.0)) throw std::invalid_argument("bootstrap_envelope: R0 must be at least 2");
    if (k_max < 10) throw std::invalid_argument("bootstrap_envelope: k_max must be at least 10");
    if (!(c_scale > 0.0)) throw std::invalid_argument("bootstrap_envelope: c_scale must be positive");

    EnvelopeReport rep;
    rep.case_tag = EnvelopeCase::alpha_le1;
    rep.r0 = R0;
    rep.eps = eps;
    rep.tk.reserve(static_cast<std::size_t>(k_max) + 1);
    rep.ck.reserve(static_cast<std::size_t>(k_max));
    rep.tk.push_back(0.0);
    for (int k = 0; k < k_max; ++k) {
        const double c = c_scale * std::pow((k + 1.0) * R0, 1.0 - alpha + eps);
        rep.ck.push_back(c);
        rep.tk.push_back(rep.tk.back() + R0 / c);
    }

    // Exponent of R(t) - R0 over the last decade of the time range.
    const std::size_t samples = 200;
    const double hi = std::log(rep.tk.back());
    const double lo = hi - std::log(10.0);
    double mt = 0.0, mr = 0.0;
    std::vector<double> lt(samples), lr(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples));
        lt[i] = std::log(t);
        lr[i] = std::log(rep.radius(t) - R0);
        mt += lt[i];
        mr += lr[i];
    }
    mt /= samples;
    mr /= samples;
    double stt = 0.0, str = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        stt += (lt[i] - mt) * (lt[i] - mt);
        str += (lt[i] - mt) * (lr[i] - mr);
    }
    rep.fitted_exponent = str / stt;
    return rep;
}

double predicted_front(double R0, double L, double t, double m, double alpha, double C0) {
    return R0 + C0 * std::pow(L, (m - 1.0) / alpha) * std::pow(t, 1.0 / alpha);
}

void write_envelope_csv(const std::vector<std::pair<double, double>>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,R_predicted\n";
    for (const auto& [t, r] : rows) out << format_real(t) << ',' << format_real(r) << '\n';
}

}  // namespace nlpme
