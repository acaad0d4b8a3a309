#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace covshift {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Exact one-step hand value: 1-d identity instance, one pretraining step at
// gamma = 0.5 has expected risk 0.5 split (0.375, 0.125).
CheckResult check_oracle_hand_value();

// Oracle vs an independent Gauss-Hermite quadrature expectation of the
// explicit iterate polynomial, on random short trajectories (d <= 3, at most
// 3 steps), to 1e-8 relative.
CheckResult check_oracle_exactness(std::uint64_t seed);

// Monte Carlo mean over 200 seeds vs oracle on P(5, 50) supervised runs,
// within 3 standard errors and 5 percent relative.
CheckResult check_mc_oracle_agreement(std::uint64_t seed);

// Oracle <H,B> and <H,C> inside the closed-form lower/upper bounds on a grid
// of P(k) instances, budgets, and stepsizes. var_upper_coef is exposed so a
// broken constant can be injected as a negative control.
CheckResult check_bound_sandwich(double var_upper_coef = 8.0);

// The threshold index sets minimize the upper bound over all (J, K) pairs,
// verified exhaustively at d <= 10.
CheckResult check_index_set_optimality(std::uint64_t seed);

// Coordinatewise c_i <= gamma sigma2 / (1 - gamma R^2) along random oracle
// trajectories with admissible stepsizes.
CheckResult check_crude_variance_bound(std::uint64_t seed);

// Example-1 scaling: minimal supervised/pretraining sample exponents near
// -1.5 and -2, and the prescribed pretrain-finetune budgets reach risk < eps.
CheckResult check_example1_scaling();

// Qualitative Figure-1 properties at d = 200 with a 5000-sample pretraining
// budget: alignment ordering of pretraining vs supervised, finetuning sample
// savings at k = 10, and near-parity of pretraining at k = 5.
CheckResult check_figure1_properties();

// Pretraining at the sufficiency threshold matches supervised learning within
// a constant factor, and the finetune threshold never exceeds the pretraining
// threshold.
CheckResult check_threshold_consistency(std::uint64_t seed);

// Byte-identical sweep CSV across repeated runs and worker counts {1, 4}.
CheckResult check_sweep_determinism(const std::string& scratch_dir);

// The four checks behind the `verify` subcommand.
std::vector<CheckResult> run_verify_checks(std::uint64_t seed);

} // namespace covshift
