#include "covshift/sgd.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "covshift/rng.hpp"
#include "covshift/sampler.hpp"

namespace covshift {

double excess_risk(const ProblemInstance& inst, const std::vector<double>& w) {
    if (w.size() != inst.dim())
        throw std::invalid_argument("excess_risk: dimension mismatch");
    double r = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double diff = w[i] - inst.w_star[i];
        r += inst.h[i] * diff * diff;
    }
    return 0.5 * r;
}

RunResult run_sgd(const ProblemInstance& inst, const Schedule& sched, std::uint64_t seed,
                  std::optional<std::int64_t> record_every) {
    validate_schedule(sched);
    if (record_every && *record_every <= 0)
        throw std::invalid_argument("run_sgd: record_every must be positive");

    const std::size_t d = inst.dim();
    RunResult result;
    result.w_final.assign(d, 0.0);
    if (sched.m > 0 && sched.gamma0 >= 1.0 / (12.0 * inst.g.trace()))
        result.stepsize_warning = true;
    if (sched.n > 0 && sched.gamma_m >= 1.0 / (12.0 * inst.h.trace()))
        result.stepsize_warning = true;

    RngState rng{seed, 0};
    std::vector<double>& w = result.w_final;
    std::vector<double> x(d);
    const std::int64_t total = sched.m + sched.n;
    for (std::int64_t t = 0; t < total; ++t) {
        const bool pretrain = t < sched.m;
        const double gamma = stepsize_at(sched, t);
        const double y = sample_labeled(inst, pretrain ? Domain::Source : Domain::Target,
                                        rng, x);
        double xw = 0.0;
        for (std::size_t i = 0; i < d; ++i) xw += x[i] * w[i];
        const double scale = gamma * (y - xw);
        for (std::size_t i = 0; i < d; ++i) w[i] += scale * x[i];
        if (record_every && ((t + 1) % *record_every == 0 || t + 1 == total))
            result.trajectory.push_back(
                {t + 1, pretrain ? 0 : 1, gamma, excess_risk(inst, w)});
    }
    return result;
}

std::string trajectory_csv(const std::vector<TrajectoryPoint>& traj) {
    std::string out = "step,phase,gamma,excess_risk\n";
    char buf[128];
    for (const TrajectoryPoint& p : traj) {
        std::snprintf(buf, sizeof(buf), "%lld,%d,%.15g,%.15g\n",
                      static_cast<long long>(p.step), p.phase, p.gamma, p.risk);
        out += buf;
    }
    return out;
}

} // namespace covshift
