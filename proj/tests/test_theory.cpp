#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "nlpme/theory.hpp"

using namespace nlpme;

namespace {

Trajectory compact_trajectory(const Grid& g) {
    SolverConfig cfg;
    cfg.t_end = 0.2;
    cfg.output_times = {0.1, 0.2};
    const Field u0 = Field::from_function(g, [](double x) {
        const double s = 1.0 - std::abs(x);
        return s > 0.0 ? s * s : 0.0;
    });
    return run(u0, cfg);
}

}  // namespace

TEST_CASE("m_alpha spot values") {
    CHECK(m_alpha(1, 1.0) == 1.0);
    CHECK(m_alpha(3, 1.0) == 1.0);
    CHECK(m_alpha(1, 0.5) == 1.5);
    CHECK(m_alpha(2, 1.5) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(m_alpha(1, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(m_alpha(1, 0.0), std::invalid_argument);
}

TEST_CASE("scaling time factor") {
    CHECK(ScalingTransform(2.0, 3.0, 2.0, 1.0).time_factor() == doctest::Approx(6.0));
    const ScalingTransform s(2.0, 2.0, 3.0, 1.5);
    CHECK(s.time_factor() * s.inverse().time_factor() == doctest::Approx(1.0));
    CHECK_THROWS_AS(ScalingTransform(0.0, 1.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("identity rescale") {
    const Grid g(128, 4.0);
    const Trajectory t = compact_trajectory(g);
    const Trajectory r = rescale(t, ScalingTransform(1.0, 1.0, 2.0, 1.5));
    REQUIRE(r.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(r.times[i] == t.times[i]);
        CHECK(r.support_radii[i] == t.support_radii[i]);
        for (std::size_t j = 0; j < g.n(); ++j) CHECK(r.snapshots[i][j] == t.snapshots[i][j]);
    }
}

TEST_CASE("rescale round trip is exact") {
    const Grid g(128, 4.0);
    const Trajectory t = compact_trajectory(g);
    const ScalingTransform s(2.0, 2.0, 2.0, 1.5);
    // Relabelled grids both ways: every dilated node lands on a source node.
    const Trajectory back = rescale(rescale(t, s), s.inverse());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(back.times[i] == doctest::Approx(t.times[i]).epsilon(1e-15));
        CHECK(relative_l2(back.snapshots[i], t.snapshots[i]) < 1e-15);
    }
    // The default target relabels the grid and keeps the support radius law R' = R / B.
    const Trajectory relabelled = rescale(t, s);
    CHECK(relabelled.snapshots[0].grid().half_length() == doctest::Approx(2.0));
    CHECK(relabelled.support_radii[2] == doctest::Approx(t.support_radii[2] / 2.0));
    CHECK(relabelled.times[2] == doctest::Approx(t.times[2] / s.time_factor()));
}

TEST_CASE("rescale rejects incompatible dilations") {
    const Grid g(128, 4.0);
    const Trajectory t = compact_trajectory(g);
    try {
        rescale(t, ScalingTransform(1.0, 1.5, 2.0, 1.5), g);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("not grid-compatible") != std::string::npos);
    }
    Trajectory bare = t;
    bare.snapshots.clear();
    CHECK_THROWS_AS(rescale(bare, ScalingTransform(1.0, 1.0, 2.0, 1.5)), std::invalid_argument);
}

TEST_CASE("optimal r1 closed form") {
    const OptimalR1 o = optimal_r1(3.0, 1.0, 1.0, 2.0, 2.0, 1.0);
    CHECK(o.r1 == doctest::Approx(1.0));
    CHECK(o.radius == doctest::Approx(5.0));
    const OptimalR1 tiny = optimal_r1(3.0, 1.0, 1e-12, 2.0, 1.5, 1.0);
    CHECK(tiny.r1 < 1e-7);
    CHECK(tiny.radius == doctest::Approx(3.0).epsilon(1e-6));
    CHECK_THROWS_AS(optimal_r1(3.0, 1.0, 1.0, 2.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(optimal_r1(3.0, -1.0, 1.0, 2.0, 1.5, 1.0), std::invalid_argument);
}

TEST_CASE("optimal r1 beats every point of a brute-force scan") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const double alpha = 1.05 + 0.9 * u(rng), L = 0.1 + 2.0 * u(rng), t = std::pow(10.0, -2.0 + 3.0 * u(rng));
        const double m = 1.5 + 1.5 * u(rng), C0 = 0.1 + 5.0 * u(rng), R0 = 2.0 + 5.0 * u(rng);
        const OptimalR1 o = optimal_r1(R0, L, t, m, alpha, C0);
        const double K = C0 * std::pow(L, m - 1.0) * t;
        double best = INFINITY;
        for (int i = 0; i <= 20000; ++i) {
            const double r1 = std::exp(std::log(1e-6) + (std::log(1e6) - std::log(1e-6)) * i / 20000.0);
            best = std::min(best, R0 + r1 + K * std::pow(r1, 1.0 - alpha));
        }
        CHECK(o.radius <= best * (1.0 + 1e-15));
        CHECK(o.radius == doctest::Approx(best).epsilon(1e-5));
        CHECK(o.radius - R0 == doctest::Approx(alpha / (alpha - 1.0) * std::pow((alpha - 1.0) * K, 1.0 / alpha)));
    }
}

TEST_CASE("bootstrap envelope structure") {
    const EnvelopeReport e = bootstrap_envelope(2.0, 0.5, 0.01, 100);
    REQUIRE(e.tk.size() == 101);
    REQUIRE(e.ck.size() == 100);
    for (std::size_t k = 0; k < e.ck.size(); ++k) {
        CHECK(e.ck[k] > 0.0);
        CHECK(e.tk[k + 1] > e.tk[k]);
        CHECK(e.tk[k + 1] - e.tk[k] == doctest::Approx(2.0 / e.ck[k]).epsilon(1e-12));
        // continuity at the knots
        CHECK(e.radius(e.tk[k + 1]) == doctest::Approx(2.0 * static_cast<double>(k + 2)).epsilon(1e-12));
    }
    CHECK(e.radius(0.0) == 2.0);
    const auto rows = e.table(20);
    CHECK(rows.size() == 21);
}

TEST_CASE("bootstrap exponent approaches 1/(alpha - eps)") {
    const EnvelopeReport e = bootstrap_envelope(2.0, 0.5, 0.01, 10000);
    CHECK(std::abs(e.fitted_exponent * (0.5 - 0.01) - 1.0) < 0.05);
    const EnvelopeReport lin = bootstrap_envelope(2.0, 1.0, 1e-6, 1000);
    CHECK(lin.fitted_exponent == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("bootstrap series diverges") {
    double prev = 0.0;
    for (int k : {100, 1000, 10000}) {
        const double T = bootstrap_envelope(2.0, 0.5, 0.01, k).tk.back();
        CHECK(T > 2.0 * prev);
        prev = T;
    }
}

TEST_CASE("bootstrap domain") {
    CHECK_THROWS_AS(bootstrap_envelope(2.0, 1.5, 0.01, 100), std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_envelope(2.0, 0.5, 0.6, 100), std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_envelope(1.0, 0.5, 0.01, 100), std::invalid_argument);
    CHECK_THROWS_AS(bootstrap_envelope(2.0, 0.5, 0.01, 5), std::invalid_argument);
}

TEST_CASE("predicted front and envelope csv") {
    CHECK(predicted_front(2.0, 1.0, 0.0, 2.0, 1.5, 3.0) == 2.0);
    CHECK(predicted_front(2.0, 4.0, 8.0, 2.0, 1.5, 1.0) == doctest::Approx(2.0 + std::pow(4.0, 1.0 / 1.5) * 4.0));
    const auto path = std::filesystem::temp_directory_path() / "nlpme_envelope.csv";
    write_envelope_csv(bootstrap_envelope(2.0, 0.5, 0.01, 20).table(5), path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,R_predicted");
}
