#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "covshift/instance.hpp"
#include "covshift/schedule.hpp"

namespace covshift {

// Expected excess risk split into the component due to starting at w0 != w*
// (bias) and the component due to label noise (variance). Under well-specified
// Gaussian noise the two add up exactly to the expected excess risk.
struct RiskSplit {
    double bias = 0.0;
    double variance = 0.0;
    double total() const { return bias + variance; }
};

// Diagonals of the bias and variance second-moment matrices of the SGD
// iterate. With diagonal covariances they evolve autonomously: off-diagonal
// entries never feed back into the diagonal nor into the risk.
struct DiagState {
    std::vector<double> b;
    std::vector<double> c;
};

// Diagonal of E[x x^T A x x^T] for A = diag(a) and x ~ N(0, diag(spec)):
// out_i = 2 spec_i^2 a_i + spec_i * sum_j spec_j a_j.
std::vector<double> gaussian_quartic_diag(const Spectrum& spec, const std::vector<double>& a);

// One step of the bias recursion:
// b_i' = (1 - 2 g s_i + 2 g^2 s_i^2) b_i + g^2 s_i sum_j s_j b_j.
std::vector<double> step_bias(const std::vector<double>& b, const Spectrum& spec, double gamma);

// One step of the variance recursion; same linear map plus the noise
// injection g^2 sigma2 s_i.
std::vector<double> step_variance(const std::vector<double>& c, const Spectrum& spec,
                                  double gamma, double sigma2);

// State at t = 0 for SGD started at w0 = 0: b = w*^2 coordinatewise, c = 0.
DiagState initial_state(const ProblemInstance& inst);

// Advances the state through one whole phase (geometric stepsize decay
// included). Only coordinates with a positive eigenvalue are touched; the
// rest are exactly inert under the recursion.
void evolve_phase(DiagState& state, const Spectrum& spec, std::int64_t length,
                  double gamma, double sigma2);

RiskSplit state_risk(const ProblemInstance& inst, const DiagState& state);

// Exact expected excess risk of run_sgd(inst, sched, .) over both data and
// noise, by evolving the recursions through the pretrain and finetune phases.
RiskSplit expected_excess_risk(const ProblemInstance& inst, const Schedule& sched);

// Per-step hook for trajectory checks; called after each step with the step
// index (1-based), phase (0 pretrain / 1 finetune), and stepsize used.
using OracleStepVisitor =
    std::function<void(std::int64_t, int, double, const DiagState&)>;

void evolve(const ProblemInstance& inst, const Schedule& sched, DiagState& state,
            const OracleStepVisitor& visit);

} // namespace covshift
