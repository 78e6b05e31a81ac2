#include <doctest.h>

#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "nlpme/operators.hpp"

using namespace nlpme;

namespace {

constexpr double pi = std::numbers::pi;

double max_abs_diff(const Field& a, const Field& b) {
    double e = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) e = std::max(e, std::abs(a[j] - b[j]));
    return e;
}

Field smooth_field(const Grid& g) {
    return Field::from_function(g, [](double x) { return std::cos(x) + 0.5 * std::sin(3.0 * x) - 0.25 * std::cos(5.0 * x); });
}

}  // namespace

TEST_CASE("constants at alpha = 1 equal 1/pi") {
    CHECK(closed_form_c_lap(1.0, 1) == doctest::Approx(1.0 / pi).epsilon(1e-12));
    CHECK(closed_form_c_grad(1.0, 1) == doctest::Approx(1.0 / pi).epsilon(1e-12));
    const OperatorConstants c = calibrate_constants(1.0);
    CHECK(c.c_lap == doctest::Approx(1.0 / pi).epsilon(1e-12));
    CHECK(c.c_grad == doctest::Approx(1.0 / pi).epsilon(1e-6));
}

TEST_CASE("one-dimensional gradient constant reduces to Gamma(alpha) sin(pi alpha / 2) / pi") {
    for (double a : {0.3, 0.5, 1.2, 1.5, 1.9}) {
        CHECK(closed_form_c_grad(a, 1) == doctest::Approx(std::tgamma(a) * std::sin(pi * a / 2.0) / pi).epsilon(1e-12));
    }
}

TEST_CASE("cosine calibration reproduces the closed forms") {
    for (double a : {0.5, 1.0, 1.5, 1.9}) {
        const CalibrationReport r = cosine_mode_calibration(a);
        CHECK(std::abs(r.c_lap_fit / r.c_lap_closed - 1.0) < 1e-4);
        CHECK(std::abs(r.c_grad_fit / r.c_grad_closed - 1.0) < 1e-4);
        CHECK(r.residual_lap < 1e-4);
        CHECK(r.residual_grad < 1e-4);
    }
    const OperatorConstants a = calibrate_constants(1.5), b = calibrate_constants(1.5);
    CHECK(a.c_grad == b.c_grad);
    CHECK_THROWS_AS(calibrate_constants(2.5), std::invalid_argument);
}

TEST_CASE("spectral fractional Laplacian has cosine eigenfunctions") {
    const Grid g(512, pi);
    for (double a : {0.5, 1.0, 1.5, 2.0}) {
        const MultiplierPlan plan(g, a);
        const Field c = Field::from_function(g, [](double x) { return std::cos(4.0 * x); });
        const Field expect = Field::from_function(g, [&](double x) { return -std::pow(4.0, a) * std::cos(4.0 * x); });
        CHECK(max_abs_diff(frac_laplacian_spectral(c, plan), expect) < 1e-10);
    }
}

TEST_CASE("spectral gradient of a periodized Gaussian matches its Fourier series") {
    // Coefficients of the periodized Gaussian on [-L, L): (sigma sqrt(2 pi) / 2L) exp(-sigma^2 k^2 / 2);
    // the symbol i sign(k)|k|^{alpha-1} turns each pair into -2 c_k k^{alpha-1} sin(kx).
    const double L = pi, sigma = 0.3;
    const Grid g(256, L);
    const Field v = Field::from_function(g, [&](double x) { return std::exp(-x * x / (2.0 * sigma * sigma)); });
    for (double a : {0.5, 1.0, 1.5}) {
        const MultiplierPlan plan(g, a);
        const Field oracle = Field::from_function(g, [&](double x) {
            double s = 0.0;
            for (int j = 1; j <= 60; ++j) {
                const double k = pi * j / L;
                const double ck = sigma * std::sqrt(2.0 * pi) / (2.0 * L) * std::exp(-0.5 * sigma * sigma * k * k);
                s += -2.0 * ck * std::pow(k, a - 1.0) * std::sin(k * x);
            }
            return s;
        });
        CHECK(max_abs_diff(frac_gradient_spectral(v, plan), oracle) < 1e-10);
    }
}

TEST_CASE("alpha -> 2 recovers the Laplacian") {
    const Grid g(256, pi);
    const Field v = smooth_field(g);
    const Field lap = Field::from_function(
        g, [](double x) { return -std::cos(x) - 4.5 * std::sin(3.0 * x) + 6.25 * std::cos(5.0 * x); });
    const MultiplierPlan near(g, 1.999);
    CHECK(relative_l2(frac_laplacian_spectral(v, near), lap) < 1e-2);
    const MultiplierPlan two(g, 2.0);
    CHECK(relative_l2(frac_laplacian_spectral(v, two), lap) < 1e-12);
}

TEST_CASE("dilation homogeneity of the spectral operators") {
    // v2(x) = v(2x) satisfies Op v2 (x) = 2^s (Op v)(2x) with s = alpha (Laplacian) or alpha - 1 (gradient).
    const Grid g(512, pi);
    const Field v = smooth_field(g);
    const Field v2 = Field::from_function(g, [](double x) {
        return std::cos(2.0 * x) + 0.5 * std::sin(6.0 * x) - 0.25 * std::cos(10.0 * x);
    });
    for (double a : {0.5, 1.5}) {
        const MultiplierPlan plan(g, a);
        const Field lv = frac_laplacian_spectral(v, plan), lv2 = frac_laplacian_spectral(v2, plan);
        const Field gv = frac_gradient_spectral(v, plan), gv2 = frac_gradient_spectral(v2, plan);
        double e_lap = 0.0, e_grad = 0.0;
        for (std::size_t j = g.n() / 4; j < 3 * g.n() / 4; ++j) {
            const std::size_t j2 = 2 * j - g.n() / 2;  // node of 2 x_j
            e_lap = std::max(e_lap, std::abs(lv2[j] - std::pow(2.0, a) * lv[j2]));
            e_grad = std::max(e_grad, std::abs(gv2[j] - std::pow(2.0, a - 1.0) * gv[j2]));
        }
        CHECK(e_lap < 1e-10);
        CHECK(e_grad < 1e-10);
    }
}

TEST_CASE("Riesz potential composes with the gradient") {
    const Grid g(256, pi);
    const Field v = smooth_field(g);
    const MultiplierPlan plan(g, 1.5);
    const Field p = riesz_potential_spectral(v, plan);
    double mean = 0.0;
    for (double x : p.values()) mean += x;
    CHECK(std::abs(mean) < 1e-10);
    // d/dx of P equals the fractional gradient for band-limited data.
    const Field dp = Field::from_function(g, [](double x) {
        return -std::sin(x) + 0.5 * std::pow(3.0, -0.5) * 3.0 * std::cos(3.0 * x) -
               0.25 * std::pow(5.0, -0.5) * -5.0 * std::sin(5.0 * x);
    });
    CHECK(max_abs_diff(frac_gradient_spectral(v, plan), dp) < 1e-10);
    const MultiplierPlan two(g, 2.0);
    CHECK_THROWS_AS(riesz_potential_spectral(v, two), std::invalid_argument);
}

TEST_CASE("gradient symbol vanishes at the zero and Nyquist modes") {
    const MultiplierPlan plan(Grid(64, 1.0), 1.3);
    CHECK(plan.sigma_grad().front() == 0.0);
    CHECK(plan.sigma_grad().back() == 0.0);
    CHECK(plan.sigma_lap().front() == 0.0);
    CHECK(plan.sigma_riesz().front() == 0.0);
    CHECK_THROWS_AS(MultiplierPlan(Grid(64, 1.0), 2.5), std::invalid_argument);
    CHECK_THROWS_AS(MultiplierPlan(Grid(64, 1.0), 0.0), std::invalid_argument);
}

TEST_CASE("spectral operators reject fields on another grid") {
    const MultiplierPlan plan(Grid(64, 1.0), 1.3);
    CHECK_THROWS_AS(frac_laplacian_spectral(Field(Grid(32, 1.0)), plan), std::invalid_argument);
}

TEST_CASE("plans are shareable across threads") {
    const Grid g(1024, pi);
    const MultiplierPlan plan(g, 1.5);
    const Field v = smooth_field(g);
    const Field ref = frac_laplacian_spectral(v, plan);
    std::vector<double> errs(8, 1.0);
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < errs.size(); ++t) {
            pool.emplace_back([&, t] {
                double e = 0.0;
                for (int k = 0; k < 50; ++k) e = std::max(e, max_abs_diff(frac_laplacian_spectral(v, plan), ref));
                const MultiplierPlan own(g, 1.5);  // concurrent planning
                errs[t] = std::max(e, max_abs_diff(frac_laplacian_spectral(v, own), ref));
            });
        }
    }
    for (double e : errs) CHECK(e == 0.0);
}

TEST_CASE("quadrature agrees with the spectral path on band-limited data") {
    const Grid g(1024, pi);
    const Field v = smooth_field(g);
    for (double a : {0.5, 1.0, 1.5}) {
        const MultiplierPlan plan(g, a);
        const QuadraturePlan qp(g, calibrate_constants(a));
        CHECK(relative_l2(frac_laplacian_quadrature(v, qp), frac_laplacian_spectral(v, plan)) < 1e-3);
        CHECK(relative_l2(frac_gradient_quadrature(v, qp), frac_gradient_spectral(v, plan)) < 1e-3);
    }
}

TEST_CASE("pure and increment gradient forms coincide for periodic images") {
    const Grid g(512, pi);
    const Field v = smooth_field(g);
    const QuadraturePlan qp(g, calibrate_constants(0.5));
    for (std::size_t i : {std::size_t{3}, std::size_t{200}, std::size_t{511}}) {
        CHECK(frac_gradient_quadrature(v, qp, i, GradientForm::pure) ==
              doctest::Approx(frac_gradient_quadrature(v, qp, i, GradientForm::increment)).epsilon(1e-12));
    }
}

TEST_CASE("quadrature kernels: odd weights cancel, constants are annihilated") {
    const Grid g(128, 2.0);
    for (ImageSum images : {ImageSum::periodic, ImageSum::window}) {
        const QuadraturePlan qp(g, calibrate_constants(1.5), images);
        double odd = 0.0;
        for (std::size_t j = 1; j < g.n(); ++j) odd += qp.odd_weight(j);
        CHECK(odd == 0.0);
        CHECK(qp.even_weight(0) == 0.0);
        const Field c = Field::from_function(g, [](double) { return 2.0; });
        CHECK(frac_laplacian_quadrature(c, qp, 17) == 0.0);
        CHECK(frac_gradient_quadrature(c, qp, 17) == 0.0);
    }
    const QuadraturePlan qp(g, calibrate_constants(1.5));
    CHECK(qp.origin_coefficient() == doctest::Approx(-std::riemann_zeta(0.5)));
    CHECK_THROWS_AS(frac_laplacian_quadrature(Field(g), qp, g.n()), std::out_of_range);
    CHECK_THROWS_AS(frac_gradient_quadrature(Field(Grid(64, 2.0)), qp, 0), std::invalid_argument);
}

TEST_CASE("Hurwitz zeta") {
    CHECK(hurwitz_zeta(2.0, 1.0) == doctest::Approx(pi * pi / 6.0).epsilon(1e-14));
    CHECK(hurwitz_zeta(1.5, 1.0) == doctest::Approx(std::riemann_zeta(1.5)).epsilon(1e-13));
    CHECK(hurwitz_zeta(0.5, 1.0) == doctest::Approx(std::riemann_zeta(0.5)).epsilon(1e-12));
    for (double s : {0.5, 1.5, 2.5}) {
        for (double q : {0.3, 1.0, 1.7}) {
            CHECK(hurwitz_zeta(s, q) - hurwitz_zeta(s, q + 1.0) == doctest::Approx(std::pow(q, -s)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(hurwitz_zeta(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(hurwitz_zeta(2.0, 0.0), std::invalid_argument);
    // At s = 1 the difference is digamma(q2) - digamma(q1); psi(2) - psi(1) = 1.
    CHECK(hurwitz_zeta_difference(1.0, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hurwitz_zeta_difference(1.0 + 1e-9, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(hurwitz_zeta_difference(1.5, 1.2, 1.7) ==
          doctest::Approx(hurwitz_zeta(1.5, 1.2) - hurwitz_zeta(1.5, 1.7)).epsilon(1e-12));
}
