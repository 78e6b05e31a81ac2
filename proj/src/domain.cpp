#include "nlpme/domain.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nlpme {

Grid::Grid(std::size_t n, double half_length) : n_(n), half_length_(half_length) {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("Grid: n must be even and at least 2");
    }
    if (!(half_length > 0.0) || !std::isfinite(half_length)) {
        throw std::invalid_argument("Grid: half_length must be positive");
    }
    dx_ = 2.0 * half_length / static_cast<double>(n);
}

std::size_t Grid::wrap(std::ptrdiff_t j) const {
    const auto n = static_cast<std::ptrdiff_t>(n_);
    std::ptrdiff_t r = j % n;
    if (r < 0) r += n;
    return static_cast<std::size_t>(r);
}

std::vector<double> Grid::nodes() const {
    std::vector<double> xs(n_);
    for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
    return xs;
}

Field::Field(Grid grid) : grid_(grid), values_(grid.n(), 0.0) {}

Field::Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n()) {
        throw std::invalid_argument("Field: value count does not match grid size");
    }
}

Field Field::from_function(const Grid& grid, const std::function<double(double)>& f) {
    Field out(grid);
    for (std::size_t j = 0; j < grid.n(); ++j) out[j] = f(grid.x(j));
    return out;
}

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field axpby(double a, const Field& f, double b, const Field& g) {
    if (!(f.grid() == g.grid())) throw std::invalid_argument("axpby: grid mismatch");
    Field out(f.grid());
    for (std::size_t j = 0; j < f.size(); ++j) out[j] = a * f[j] + b * g[j];
    return out;
}

double mass(const Field& f) {
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    return f.grid().dx() * sum;
}

double sup_norm(const Field& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double min_value(const Field& f) {
    const auto vals = f.values();
    return *std::min_element(vals.begin(), vals.end());
}

double support_radius(const Field& f, double threshold) {
    double r = 0.0;
    const Grid& g = f.grid();
    for (std::size_t j = 0; j < g.n(); ++j) {
        if (f[j] > threshold) r = std::max(r, std::abs(g.x(j)));
    }
    return r;
}

double relative_l2(const Field& f, const Field& g) {
    if (f.size() != g.size()) throw std::invalid_argument("relative_l2: size mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        num += (f[j] - g[j]) * (f[j] - g[j]);
        den += g[j] * g[j];
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::sqrt(num);
    return std::sqrt(num / den);
}

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

double parse_real(const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || (errno == ERANGE && std::isinf(v))) {
        throw std::runtime_error("not a finite real: '" + text + "'");
    }
    return v;  // ERANGE with a finite result is gradual underflow
}

void write_field_csv(const Field& f, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "x,u\n";
    for (std::size_t j = 0; j < f.size(); ++j) {
        out << format_real(f.grid().x(j)) << ',' << format_real(f[j]) << '\n';
    }
}

Field read_field_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "x,u") throw std::runtime_error(path.string() + ": expected header 'x,u'");
    std::vector<double> xs;
    std::vector<double> us;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error(path.string() + ": malformed row");
        xs.push_back(parse_real(line.substr(0, comma)));
        us.push_back(parse_real(line.substr(comma + 1)));
    }
    if (xs.size() < 2) throw std::runtime_error(path.string() + ": too few rows");
    const Grid grid(xs.size(), -xs.front());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        if (std::abs(xs[j] - grid.x(j)) > 1e-9 * grid.half_length()) {
            throw std::runtime_error(path.string() + ": nodes are not a centered uniform grid");
        }
    }
    return Field(grid, std::move(us));
}

}  // namespace nlpme
