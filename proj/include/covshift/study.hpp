#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace covshift {

// Per-eps results of the two-spike scaling study: the minimal supervised
// target-sample count and minimal pretraining source-sample count reaching
// excess risk below eps (oracle bisection with grid-tuned stepsizes), and the
// risk of pretraining-finetuning at the prescribed budgets
// gamma0 ~ 1, gamma_m ~ eps, m ~ ln(1/eps)/eps, n ~ ln^2(1/eps)/eps.
struct Example1Row {
    double eps = 0.0;
    std::int64_t supervised_n = 0;
    bool supervised_saturated = false;
    std::int64_t pretrain_m = 0;
    bool pretrain_saturated = false;
    std::int64_t finetune_m = 0;
    std::int64_t finetune_n = 0;
    double finetune_gamma0 = 0.0;
    double finetune_gamma_m = 0.0;
    double finetune_risk = 0.0;
};

struct Example1Study {
    std::vector<Example1Row> rows;
    // Least-squares slopes of ln(minimal count) against ln(eps), over
    // non-saturated rows.
    double supervised_exponent = 0.0;
    double pretrain_exponent = 0.0;
};

Example1Study example1_study(const std::vector<double>& eps_list,
                             std::int64_t search_cap = 10'000'000);

std::string study_to_csv(const Example1Study& study);

} // namespace covshift
