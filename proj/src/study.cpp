#include "covshift/study.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "covshift/oracle.hpp"
#include "covshift/sweep.hpp"

namespace covshift {

namespace {

// Prescribed pretrain-finetune budgets. The leading constants were fixed once
// against the oracle and are part of the study definition.
constexpr double kFtGamma0 = 0.25;
constexpr double kFtGammaMScale = 1.0;  // gamma_m = scale * eps
constexpr double kFtSourceScale = 8.0;  // m = scale * ln(1/eps)/eps
constexpr double kFtTargetScale = 16.0; // n = scale * ln^2(1/eps)/eps

double tuned_risk(const ProblemInstance& inst, Mode mode, std::int64_t samples) {
    SweepConfig cfg;
    cfg.instance_spec = "-";
    cfg.mode = mode;
    cfg.sample_grid = {samples};
    return tune_stepsizes(inst, cfg, samples).risk;
}

// Smallest sample count in [1, cap] whose tuned oracle risk drops below the
// threshold; 0 with saturated=true when even the cap fails.
std::int64_t minimal_samples(const ProblemInstance& inst, Mode mode, double threshold,
                             std::int64_t cap, bool& saturated) {
    saturated = false;
    std::int64_t lo = 1, hi = 1;
    while (tuned_risk(inst, mode, hi) >= threshold) {
        lo = hi;
        hi *= 2;
        if (hi > cap) {
            if (tuned_risk(inst, mode, cap) >= threshold) {
                saturated = true;
                return 0;
            }
            hi = cap;
            break;
        }
    }
    while (lo + 1 < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (tuned_risk(inst, mode, mid) < threshold)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

} // namespace

Example1Study example1_study(const std::vector<double>& eps_list, std::int64_t search_cap) {
    if (eps_list.empty())
        throw std::invalid_argument("example1_study: eps list must be nonempty");
    Example1Study study;
    std::vector<double> log_eps_sup, log_n_sup, log_eps_pre, log_m_pre;
    for (double eps : eps_list) {
        const ProblemInstance inst = make_example1_instance(eps);
        Example1Row row;
        row.eps = eps;

        row.supervised_n =
            minimal_samples(inst, Mode::Supervised, eps, search_cap, row.supervised_saturated);
        row.pretrain_m =
            minimal_samples(inst, Mode::Pretrain, eps, search_cap, row.pretrain_saturated);

        const double log_inv = std::log(1.0 / eps);
        row.finetune_m = static_cast<std::int64_t>(std::ceil(kFtSourceScale * log_inv / eps));
        row.finetune_n =
            static_cast<std::int64_t>(std::ceil(kFtTargetScale * log_inv * log_inv / eps));
        row.finetune_gamma0 = kFtGamma0;
        row.finetune_gamma_m = kFtGammaMScale * eps;
        Schedule sched{row.finetune_m, row.finetune_n, row.finetune_gamma0,
                       row.finetune_gamma_m};
        row.finetune_risk = expected_excess_risk(inst, sched).total();

        if (!row.supervised_saturated) {
            log_eps_sup.push_back(std::log(eps));
            log_n_sup.push_back(std::log(static_cast<double>(row.supervised_n)));
        }
        if (!row.pretrain_saturated) {
            log_eps_pre.push_back(std::log(eps));
            log_m_pre.push_back(std::log(static_cast<double>(row.pretrain_m)));
        }
        study.rows.push_back(row);
    }
    study.supervised_exponent = fit_slope(log_eps_sup, log_n_sup);
    study.pretrain_exponent = fit_slope(log_eps_pre, log_m_pre);
    return study;
}

std::string study_to_csv(const Example1Study& study) {
    std::string out =
        "eps,supervised_n,pretrain_m,finetune_m,finetune_n,finetune_gamma0,"
        "finetune_gammaM,finetune_risk,supervised_saturated,pretrain_saturated\n";
    char buf[256];
    for (const Example1Row& r : study.rows) {
        std::snprintf(buf, sizeof(buf), "%.15g,%lld,%lld,%lld,%lld,%.15g,%.15g,%.15g,%d,%d\n",
                      r.eps, static_cast<long long>(r.supervised_n),
                      static_cast<long long>(r.pretrain_m),
                      static_cast<long long>(r.finetune_m),
                      static_cast<long long>(r.finetune_n), r.finetune_gamma0,
                      r.finetune_gamma_m, r.finetune_risk,
                      r.supervised_saturated ? 1 : 0, r.pretrain_saturated ? 1 : 0);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "# supervised_exponent = %.15g\n# pretrain_exponent = %.15g\n",
                  study.supervised_exponent, study.pretrain_exponent);
    out += buf;
    return out;
}

} // namespace covshift
