#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "covshift/instance.hpp"
#include "covshift/schedule.hpp"

namespace covshift {

// Target-domain excess risk 0.5 * sum_i h_i (w_i - w*_i)^2.
double excess_risk(const ProblemInstance& inst, const std::vector<double>& w);

struct TrajectoryPoint {
    std::int64_t step = 0;
    int phase = 0; // 0 = pretrain, 1 = finetune
    double gamma = 0.0;
    double risk = 0.0;
};

struct RunResult {
    std::vector<double> w_final;
    std::vector<TrajectoryPoint> trajectory;
    // Set when an initial stepsize violates gamma < 1/(4 alpha tr(.)) for its
    // phase. The run still executes; exploring divergence is legitimate.
    bool stepsize_warning = false;
};

// Online SGD from w0 = 0: m steps on source samples, then n steps on target
// samples, stepsizes from the schedule. Returns the last iterate. A pure
// function of (instance, schedule, seed).
RunResult run_sgd(const ProblemInstance& inst, const Schedule& sched, std::uint64_t seed,
                  std::optional<std::int64_t> record_every = std::nullopt);

// Trajectory rows as "step,phase,gamma,excess_risk" CSV.
std::string trajectory_csv(const std::vector<TrajectoryPoint>& traj);

} // namespace covshift
