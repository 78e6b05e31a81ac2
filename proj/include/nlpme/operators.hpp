#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "nlpme/domain.hpp"

namespace nlpme {

/**
 * Normalizations of the two singular-integral operators.
 *
 *   -(-Delta)^{alpha/2} v(x)        = c_lap  * PV int (v(x+z) - v(x)) |z|^{-d-alpha} dz
 *   grad (-Delta)^{alpha/2-1} v(x)  = c_grad * int (v(x+z) - v(x)) z |z|^{-d-alpha} dz
 *
 * The principal-value one-sided form of the first line is half the symmetric
 * second-difference integral, so c_lap multiplies (v(x+z)+v(x-z)-2v(x))/2.
 */
struct OperatorConstants {
    double alpha = 1.0;
    int d = 1;
    double c_grad = 0.0;
    double c_lap = 0.0;
};

double closed_form_c_lap(double alpha, int d);
double closed_form_c_grad(double alpha, int d);

/// c_lap from the closed form; c_grad fitted against cosine modes (d = 1) and cached.
OperatorConstants calibrate_constants(double alpha, int d = 1);

struct CalibrationReport {
    double c_lap_closed = 0.0;
    double c_lap_fit = 0.0;
    double c_grad_closed = 0.0;
    double c_grad_fit = 0.0;
    double residual_lap = 0.0;   // relative residual of the fitted c_lap over all modes
    double residual_grad = 0.0;
};

/// Least-squares fit of both constants on cos(kx), k = 1..k_max, on the 2*pi torus.
CalibrationReport cosine_mode_calibration(double alpha, std::size_t n = 4096, int k_max = 8);

/// Fourier symbols of the three operators on a fixed grid. Immutable and shareable.
class MultiplierPlan {
public:
    MultiplierPlan(const Grid& grid, double alpha);

    const Grid& grid() const { return grid_; }
    double alpha() const { return alpha_; }

    std::span<const double> wavenumbers() const { return k_; }
    std::span<const double> sigma_lap() const { return sigma_lap_; }
    // Imaginary part of i*sign(k)|k|^{alpha-1}; zero at k = 0 and at the Nyquist mode.
    std::span<const double> sigma_grad() const { return sigma_grad_; }
    std::span<const double> sigma_riesz() const { return sigma_riesz_; }

    // Internal application of a real (re) or purely imaginary (im) diagonal symbol.
    Field apply(const Field& v, std::span<const double> symbol, bool imaginary) const;

private:
    struct FftPlans;

    Grid grid_;
    double alpha_;
    std::vector<double> k_;
    std::vector<double> sigma_lap_;
    std::vector<double> sigma_grad_;
    std::vector<double> sigma_riesz_;
    std::shared_ptr<const FftPlans> plans_;
};

Field frac_gradient_spectral(const Field& v, const MultiplierPlan& plan);
/// Returns -(-Delta)^{alpha/2} v.
Field frac_laplacian_spectral(const Field& v, const MultiplierPlan& plan);
/// (-Delta)^{alpha/2-1} v with the zero mode set to 0.
Field riesz_potential_spectral(const Field& v, const MultiplierPlan& plan);

/// How the singular kernels see the torus.
enum class ImageSum {
    periodic,  // full lattice sum over periodic images; agrees with the Fourier symbols
    window,    // displacements restricted to one period |z| <= L
};

/// The alpha in (0,1) branch admits the increment-free integrand v(x+z).
enum class GradientForm { increment, pure };

/**
 * Precomputed node weights of the two singular kernels for one grid.
 *
 * Node sums use the trapezoidal rule over offsets z_j != 0 in one period. The
 * excluded z = 0 node is compensated by the generalized Euler-Maclaurin term
 * -zeta(alpha-1) f''(x) dx^{2-alpha}, with the derivative taken from centered
 * differences.
 */
class QuadraturePlan {
public:
    QuadraturePlan(const Grid& grid, OperatorConstants consts, ImageSum images = ImageSum::periodic);

    const Grid& grid() const { return grid_; }
    const OperatorConstants& constants() const { return consts_; }
    ImageSum images() const { return images_; }

    // Weight of offset j in [0, n): |z|^{-1-alpha} (even) and sign(z)|z|^{-alpha} (odd).
    double even_weight(std::size_t j) const { return even_[j]; }
    double odd_weight(std::size_t j) const { return odd_[j]; }

    // -zeta(alpha - 1), the near-origin coefficient.
    double origin_coefficient() const { return origin_coeff_; }

private:
    Grid grid_;
    OperatorConstants consts_;
    ImageSum images_;
    std::vector<double> even_;
    std::vector<double> odd_;
    double origin_coeff_;
};

double frac_laplacian_quadrature(const Field& v, const QuadraturePlan& plan, std::size_t x_index);
double frac_gradient_quadrature(const Field& v, const QuadraturePlan& plan, std::size_t x_index,
                                GradientForm form = GradientForm::increment);

// Whole-field evaluation, O(n^2).
Field frac_laplacian_quadrature(const Field& v, const QuadraturePlan& plan);
Field frac_gradient_quadrature(const Field& v, const QuadraturePlan& plan);

/// Hurwitz zeta(s, q) for real s != 1 and q > 0 (analytic continuation for s < 1).
double hurwitz_zeta(double s, double q);

/// zeta(s, q1) - zeta(s, q2), finite through s = 1.
double hurwitz_zeta_difference(double s, double q1, double q2);

}  // namespace nlpme
