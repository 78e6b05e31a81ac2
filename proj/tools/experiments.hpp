#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "nlpme/barrier.hpp"
#include "nlpme/domain.hpp"
#include "nlpme/solver.hpp"

namespace nlpme::app {

/// amplitude * (1 - |x| / radius)_+^beta
Field bump_field(const Grid& grid, double amplitude, double beta, double radius = 1.0);

/// amplitude exp(-x^2 / (2 s^2)) with s chosen so the 1e-8 relative level sits at |x| = radius.
Field gaussian_field(const Grid& grid, double amplitude, double radius = 1.0);

/// count times log-spaced over `decades` decades, ending at t_end.
std::vector<double> log_spaced_times(double t_end, double decades, std::size_t count);

/// [t_a, span * t_a] with t_a the first snapshot where R(t) - r0 >= r0.
/// Requires the trajectory to cover the whole window.
std::pair<double, double> detached_window(const Trajectory& traj, double r0, double span = 5.0);

struct FrontStudy {
    Trajectory traj;
    std::pair<double, double> window;
    FrontFit fit;
};

/// Runs cfg (which should carry dense output_times) and fits the front over the detached window.
FrontStudy front_study(const Field& u0, const SolverConfig& cfg, double r0);

struct ScalingStudy {
    std::vector<double> times;        // times of the run of the rescaled data
    std::vector<double> discrepancy;  // relative L2 between the two constructions
    double max_discrepancy = 0.0;
};

/// Compares the run of U0 = A u0(B x) with the rescaled run of u0 at `outputs`
/// equispaced times in (0, cfg.t_end]; both live on the grid of u0.
ScalingStudy scaling_study(const Field& u0, const SolverConfig& cfg, double A, double B, std::size_t outputs);

struct DominationStudy {
    Trajectory traj;
    double measured_speed = 0.0;
    BarrierParams barrier;
    std::vector<ContactReport> reports;
    double min_margin = 0.0;  // over snapshots with t > 0
};

/**
 * Runs u0 = U(0,.)/2 on |x| < r0 up to p.t_cap, measures the linear front speed
 * C of the run (slope through the origin of R(t) - r0), then audits the run
 * against the barrier with speed 2C. p.speed is ignored on input.
 */
DominationStudy domination_study(const Grid& grid, const SolverConfig& cfg, BarrierParams p, std::size_t outputs);

}  // namespace nlpme::app
