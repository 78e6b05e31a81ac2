#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nlpme {

/**
 * Uniform periodic 1-D grid on the torus [-L, L).
 *
 * Nodes are x_j = -L + j*dx for j = 0..n-1 with n even, so the origin is
 * node n/2 and is represented exactly.
 */
class Grid {
public:
    Grid(std::size_t n, double half_length);

    std::size_t n() const { return n_; }
    double half_length() const { return half_length_; }
    double dx() const { return dx_; }
    double x(std::size_t j) const { return -half_length_ + static_cast<double>(j) * dx_; }
    std::size_t origin_index() const { return n_ / 2; }

    // Periodic index arithmetic.
    std::size_t wrap(std::ptrdiff_t j) const;

    std::vector<double> nodes() const;

    bool operator==(const Grid& other) const {
        return n_ == other.n_ && half_length_ == other.half_length_;
    }

private:
    std::size_t n_;
    double half_length_;
    double dx_;
};

/// Grid-sampled scalar function. Values are owned; the grid is held by value.
class Field {
public:
    explicit Field(Grid grid);
    Field(Grid grid, std::vector<double> values);

    static Field from_function(const Grid& grid, const std::function<double(double)>& f);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double operator[](std::size_t j) const { return values_[j]; }
    double& operator[](std::size_t j) { return values_[j]; }

    // Periodic access with signed offsets.
    double at_wrapped(std::ptrdiff_t j) const { return values_[grid_.wrap(j)]; }

    bool all_finite() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Linear combination a*f + b*g on a common grid.
Field axpby(double a, const Field& f, double b, const Field& g);

/// Midpoint-rule integral over the torus.
double mass(const Field& f);

double sup_norm(const Field& f);

double min_value(const Field& f);

/// Largest |x_j| over nodes with value above the threshold, or 0 if none.
double support_radius(const Field& f, double threshold);

/// Discrete L2 norm of f - g divided by the L2 norm of g (0 if both vanish).
double relative_l2(const Field& f, const Field& g);

// Snapshot CSV: header `x,u`, increasing x, 17 significant digits.
void write_field_csv(const Field& f, const std::filesystem::path& path);
Field read_field_csv(const std::filesystem::path& path);

/// Formats a real with 17 significant digits (round-trip exact).
std::string format_real(double value);

/// Parses a whole cell as a real. Subnormal values are accepted; overflow and trailing text are errors.
double parse_real(const std::string& text);

}  // namespace nlpme
