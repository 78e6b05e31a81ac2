#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nlpme/domain.hpp"
#include "nlpme/operators.hpp"

namespace nlpme {

struct SolverConfig {
    double m = 2.0;
    double alpha = 1.5;
    double delta = 0.0;
    int d = 1;
    double cfl_safety = 0.4;
    double t_end = 1.0;
    std::size_t save_every = 100;
    double support_threshold_rel = 1e-8;
    // When non-empty, snapshots are taken exactly at these times (increasing,
    // within (0, t_end]) instead of every save_every steps.
    std::vector<double> output_times;
    std::size_t max_steps = 100'000'000;

    /// Throws std::invalid_argument naming the violated condition.
    void validate() const;
};

/// Raised when a run leaves the regime where its output means anything.
class SolverAbort : public std::runtime_error {
public:
    SolverAbort(const std::string& what, double time)
        : std::runtime_error(what + " at t = " + format_real(time)), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> snapshots;
    std::vector<double> masses;
    std::vector<double> support_radii;
    std::vector<double> sup_norms;
    double support_threshold = 0.0;

    std::size_t size() const { return times.size(); }
    void record(double t, Field u);
};

struct StepResult {
    Field u;
    double dt;
};

/**
 * One explicit Euler step of the viscous equation in upwind flux form.
 *
 * The velocity at interface j+1/2 is -(g_j + g_{j+1})/2 with g the spectral
 * fractional gradient of max(u,0)^{m-1}. The step is
 *   dt = min(dt_max, cfl / (2 max|w| / dx + 2 delta / dx^2 + (m-1) max(v) (pi/dx)^alpha)),
 * which keeps every update a convex combination of neighbours and the
 * linearized fractional diffusion inside its stability region. A state with
 * zero velocity and zero viscosity is returned unchanged with dt = dt_max.
 */
StepResult step(const Field& u, const SolverConfig& cfg, const MultiplierPlan& plan,
                double dt_max = std::numeric_limits<double>::infinity());

/// Advances u0 to cfg.t_end. Aborts on non-finite values, sup-norm growth
/// beyond 10 sup|u0|, or support radius beyond 0.8 L.
Trajectory run(const Field& u0, const SolverConfig& cfg);

struct FrontFit {
    double exponent = 0.0;
    double amplitude = 0.0;
    std::size_t samples = 0;
};

/// Least-squares fit of log(R(t) - r0) = log C + p log t over snapshots with t in the window.
FrontFit front_speed_fit(const Trajectory& traj, double r0, std::pair<double, double> t_window);

/// Same fit with the exponent held fixed; returns C.
double front_amplitude_fit(const Trajectory& traj, double r0, std::pair<double, double> t_window,
                           double exponent);

// Diagnostics CSV `t,mass,sup_norm,support_radius` plus snapshots/snapshot_NNNNN.csv.
void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir, bool with_snapshots = true);
/// Reads a directory written by write_trajectory. Snapshots are loaded when present.
Trajectory read_trajectory(const std::filesystem::path& dir);

}  // namespace nlpme
