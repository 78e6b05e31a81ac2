#include "nlpme/operators.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace nlpme {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw std::invalid_argument("alpha must lie in (0, 2)");
    }
}

// B_{2j} / (2j)! for j = 1..8.
constexpr std::array<double, 8> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
};

constexpr int kDirectTerms = 16;

// Everything in the Euler-Maclaurin expansion of zeta(s, q) except the pole term.
double hurwitz_regular_part(double s, double q) {
    double sum = 0.0;
    for (int k = 0; k < kDirectTerms; ++k) sum += std::pow(q + k, -s);
    const double a = q + kDirectTerms;
    sum += 0.5 * std::pow(a, -s);
    double rising = s;  // s (s+1) ... (s+2j-2)
    double power = std::pow(a, -s - 1.0);
    for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
        sum += kBernoulliOverFactorial[j] * rising * power;
        rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
        power /= a * a;
    }
    return sum;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n_real, std::size_t n_complex)
        : real(fftw_alloc_real(n_real)), spec(fftw_alloc_complex(n_complex)) {
        if (real == nullptr || spec == nullptr) throw std::bad_alloc();
    }
    ~FftwBuffer() {
        fftw_free(real);
        fftw_free(spec);
    }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    double* real;
    fftw_complex* spec;
};

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

double hurwitz_zeta(double s, double q) {
    if (s == 1.0) throw std::invalid_argument("hurwitz_zeta: pole at s = 1");
    if (!(q > 0.0)) throw std::invalid_argument("hurwitz_zeta: q must be positive");
    const double a = q + kDirectTerms;
    return hurwitz_regular_part(s, q) + std::pow(a, 1.0 - s) / (s - 1.0);
}

double hurwitz_zeta_difference(double s, double q1, double q2) {
    if (!(q1 > 0.0 && q2 > 0.0)) throw std::invalid_argument("hurwitz_zeta_difference: q must be positive");
    const double a1 = q1 + kDirectTerms;
    const double a2 = q2 + kDirectTerms;
    // (a1^{1-s} - a2^{1-s}) / (s - 1) = -log(a1/a2) * a2^{1-s} * expm1(x)/x, x = (1-s) log(a1/a2)
    const double ell = std::log(a1 / a2);
    const double x = (1.0 - s) * ell;
    const double ratio = std::abs(x) < 1e-300 ? 1.0 : std::expm1(x) / x;
    const double pole = -ell * std::pow(a2, 1.0 - s) * ratio;
    return hurwitz_regular_part(s, q1) - hurwitz_regular_part(s, q2) + pole;
}

double closed_form_c_lap(double alpha, int d) {
    require_alpha(alpha);
    if (d < 1) throw std::invalid_argument("dimension must be positive");
    const double dd = d;
    return std::pow(2.0, alpha) * std::tgamma((dd + alpha) / 2.0) /
           (std::pow(std::numbers::pi, dd / 2.0) * std::abs(std::tgamma(-alpha / 2.0)));
}

double closed_form_c_grad(double alpha, int d) {
    require_alpha(alpha);
    if (d < 1) throw std::invalid_argument("dimension must be positive");
    const double dd = d;
    return std::pow(2.0, alpha - 1.0) * std::tgamma((dd + alpha) / 2.0) /
           (std::pow(std::numbers::pi, dd / 2.0) * std::tgamma(1.0 - alpha / 2.0));
}

CalibrationReport cosine_mode_calibration(double alpha, std::size_t n, int k_max) {
    require_alpha(alpha);
    if (k_max < 1) throw std::invalid_argument("cosine_mode_calibration: k_max must be positive");
    const Grid grid(n, std::numbers::pi);
    const QuadraturePlan raw(grid, OperatorConstants{alpha, 1, 1.0, 1.0});
    const std::size_t stride = std::max<std::size_t>(1, n / 32);

    std::vector<double> raw_lap, target_lap, raw_grad, target_grad;
    for (int k = 1; k <= k_max; ++k) {
        const double kk = k;
        const Field v = Field::from_function(grid, [kk](double x) { return std::cos(kk * x); });
        for (std::size_t i = 0; i < n; i += stride) {
            const double x = grid.x(i);
            raw_lap.push_back(frac_laplacian_quadrature(v, raw, i));
            target_lap.push_back(-std::pow(kk, alpha) * std::cos(kk * x));
            raw_grad.push_back(frac_gradient_quadrature(v, raw, i));
            target_grad.push_back(-std::pow(kk, alpha - 1.0) * std::sin(kk * x));
        }
    }
    const auto fit = [](const std::vector<double>& a, const std::vector<double>& b) {
        double ab = 0.0, aa = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            ab += a[i] * b[i];
            aa += a[i] * a[i];
        }
        const double c = ab / aa;
        double res = 0.0, bb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            res += (c * a[i] - b[i]) * (c * a[i] - b[i]);
            bb += b[i] * b[i];
        }
        return std::pair{c, std::sqrt(res / bb)};
    };
    CalibrationReport rep;
    rep.c_lap_closed = closed_form_c_lap(alpha, 1);
    rep.c_grad_closed = closed_form_c_grad(alpha, 1);
    std::tie(rep.c_lap_fit, rep.residual_lap) = fit(raw_lap, target_lap);
    std::tie(rep.c_grad_fit, rep.residual_grad) = fit(raw_grad, target_grad);
    return rep;
}

OperatorConstants calibrate_constants(double alpha, int d) {
    require_alpha(alpha);
    if (d < 1) throw std::invalid_argument("dimension must be positive");
    static std::mutex cache_mutex;
    static std::map<std::pair<double, int>, OperatorConstants> cache;
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find({alpha, d}); it != cache.end()) return it->second;
    }
    OperatorConstants c{alpha, d, closed_form_c_grad(alpha, d), closed_form_c_lap(alpha, d)};
    if (d == 1) c.c_grad = cosine_mode_calibration(alpha).c_grad_fit;
    std::lock_guard lock(cache_mutex);
    cache.emplace(std::pair{alpha, d}, c);
    return c;
}

// ---------------------------------------------------------------------------
// Spectral path

struct MultiplierPlan::FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    ~FftPlans() {
        std::lock_guard lock(fftw_planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

MultiplierPlan::MultiplierPlan(const Grid& grid, double alpha) : grid_(grid), alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("MultiplierPlan: alpha must lie in (0, 2]");
    const std::size_t n = grid.n();
    const std::size_t nc = n / 2 + 1;
    k_.resize(nc);
    sigma_lap_.resize(nc);
    sigma_grad_.resize(nc);
    sigma_riesz_.resize(nc);
    const double k_unit = std::numbers::pi / grid.half_length();
    for (std::size_t j = 0; j < nc; ++j) {
        const double k = k_unit * static_cast<double>(j);
        k_[j] = k;
        if (j == 0) {
            sigma_lap_[j] = sigma_grad_[j] = sigma_riesz_[j] = 0.0;
            continue;
        }
        sigma_lap_[j] = std::pow(k, alpha);
        sigma_grad_[j] = (j == n / 2) ? 0.0 : std::pow(k, alpha - 1.0);
        sigma_riesz_[j] = std::pow(k, alpha - 2.0);
    }

    auto plans = std::make_shared<FftPlans>();
    FftwBuffer buf(n, nc);
    std::lock_guard lock(fftw_planner_mutex());
    const int ni = static_cast<int>(n);
    plans->forward = fftw_plan_dft_r2c_1d(ni, buf.real, buf.spec, FFTW_ESTIMATE);
    plans->backward = fftw_plan_dft_c2r_1d(ni, buf.spec, buf.real, FFTW_ESTIMATE);
    plans_ = std::move(plans);
}

Field MultiplierPlan::apply(const Field& v, std::span<const double> symbol, bool imaginary) const {
    if (!(v.grid() == grid_)) throw std::invalid_argument("MultiplierPlan: field grid does not match plan grid");
    const std::size_t n = grid_.n();
    const std::size_t nc = n / 2 + 1;
    FftwBuffer buf(n, nc);
    std::copy(v.values().begin(), v.values().end(), buf.real);
    fftw_execute_dft_r2c(plans_->forward, buf.real, buf.spec);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < nc; ++j) {
        const double re = buf.spec[j][0];
        const double im = buf.spec[j][1];
        const double s = symbol[j] * scale;
        if (imaginary) {
            // (re + i im) * (i s)
            buf.spec[j][0] = -im * s;
            buf.spec[j][1] = re * s;
        } else {
            buf.spec[j][0] = re * s;
            buf.spec[j][1] = im * s;
        }
    }
    fftw_execute_dft_c2r(plans_->backward, buf.spec, buf.real);
    Field out(grid_);
    std::copy(buf.real, buf.real + n, out.values().begin());
    return out;
}

Field frac_gradient_spectral(const Field& v, const MultiplierPlan& plan) {
    return plan.apply(v, plan.sigma_grad(), true);
}

Field frac_laplacian_spectral(const Field& v, const MultiplierPlan& plan) {
    Field out = plan.apply(v, plan.sigma_lap(), false);
    for (double& x : out.values()) x = -x;
    return out;
}

Field riesz_potential_spectral(const Field& v, const MultiplierPlan& plan) {
    if (!(plan.alpha() < 2.0)) throw std::invalid_argument("riesz_potential_spectral: requires alpha < 2");
    return plan.apply(v, plan.sigma_riesz(), false);
}

// ---------------------------------------------------------------------------
// Quadrature path

QuadraturePlan::QuadraturePlan(const Grid& grid, OperatorConstants consts, ImageSum images)
    : grid_(grid), consts_(consts), images_(images) {
    const double alpha = consts.alpha;
    require_alpha(alpha);
    const std::size_t n = grid.n();
    const double h = grid.dx();
    const double period = 2.0 * grid.half_length();
    even_.assign(n, 0.0);
    odd_.assign(n, 0.0);
    // Offsets j and n - j are mirror images; compute once and mirror so the
    // odd weights cancel exactly.
    for (std::size_t j = 1; j <= n / 2; ++j) {
        const double z = h * static_cast<double>(j);
        double ev = std::pow(z, -1.0 - alpha);
        double od = std::pow(z, -alpha);
        if (images == ImageSum::periodic) {
            const double a = z / period;
            ev += std::pow(period, -1.0 - alpha) *
                  (hurwitz_zeta(1.0 + alpha, 1.0 + a) + hurwitz_zeta(1.0 + alpha, 1.0 - a));
            od += std::pow(period, -alpha) * hurwitz_zeta_difference(alpha, 1.0 + a, 1.0 - a);
        }
        if (j == n / 2) {
            // z = +L and z = -L are the same node.
            if (images == ImageSum::window) od = 0.0;
            even_[j] = ev;
            odd_[j] = od;  // ~0 by periodicity in the lattice sum
            if (images == ImageSum::periodic) odd_[j] = 0.0;
        } else {
            even_[j] = ev;
            even_[n - j] = ev;
            odd_[j] = od;
            odd_[n - j] = -od;
        }
    }
    origin_coeff_ = -std::riemann_zeta(alpha - 1.0);
}

static void require_index(const Field& v, const QuadraturePlan& plan, std::size_t x_index) {
    if (!(v.grid() == plan.grid())) throw std::invalid_argument("quadrature: field grid does not match plan grid");
    if (x_index >= v.size()) throw std::out_of_range("quadrature: x_index out of range");
}

double frac_laplacian_quadrature(const Field& v, const QuadraturePlan& plan, std::size_t x_index) {
    require_index(v, plan, x_index);
    const std::size_t n = v.size();
    const double h = plan.grid().dx();
    const double alpha = plan.constants().alpha;
    const auto i = static_cast<std::ptrdiff_t>(x_index);
    const double vi = v[x_index];
    double sum = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        sum += (v.at_wrapped(i + static_cast<std::ptrdiff_t>(j)) - vi) * plan.even_weight(j);
    }
    const double second = v.at_wrapped(i + 1) + v.at_wrapped(i - 1) - 2.0 * vi;  // h^2 v''
    const double near = plan.origin_coefficient() * second * std::pow(h, -alpha);
    return plan.constants().c_lap * (h * sum + near);
}

double frac_gradient_quadrature(const Field& v, const QuadraturePlan& plan, std::size_t x_index,
                                GradientForm form) {
    require_index(v, plan, x_index);
    const std::size_t n = v.size();
    const double h = plan.grid().dx();
    const double alpha = plan.constants().alpha;
    const auto i = static_cast<std::ptrdiff_t>(x_index);
    const double base = form == GradientForm::increment ? v[x_index] : 0.0;
    double sum = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        sum += (v.at_wrapped(i + static_cast<std::ptrdiff_t>(j)) - base) * plan.odd_weight(j);
    }
    const double first = v.at_wrapped(i + 1) - v.at_wrapped(i - 1);  // 2 h v'
    const double near = plan.origin_coefficient() * first * std::pow(h, 1.0 - alpha);
    return plan.constants().c_grad * (h * sum + near);
}

Field frac_laplacian_quadrature(const Field& v, const QuadraturePlan& plan) {
    Field out(v.grid());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = frac_laplacian_quadrature(v, plan, i);
    return out;
}

Field frac_gradient_quadrature(const Field& v, const QuadraturePlan& plan) {
    Field out(v.grid());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = frac_gradient_quadrature(v, plan, i);
    return out;
}

}  // namespace nlpme
