#pragma once

#include <cstdint>
#include <vector>

namespace covshift {

// Two-phase sample budget and initial stepsizes: m pretraining steps on the
// source domain with initial stepsize gamma0, then n finetuning steps on the
// target domain with initial stepsize gamma_m. Within each phase of length L
// the stepsize halves every epoch of L/ln(L) steps (about ln(L) epochs, the
// last epoch as long as the effective sample count); a phase of length <= 2
// fits inside one epoch and keeps its initial stepsize. gamma_m = 0 is legal
// and makes finetuning a no-op.
struct Schedule {
    std::int64_t m = 0;
    std::int64_t n = 0;
    double gamma0 = 0.0;
    double gamma_m = 0.0;
};

void validate_schedule(const Schedule& sched);

// Stepsize used by SGD step t+1, i.e. the multiplier applied while moving
// from iterate t to t+1. Throws for t outside [0, m+n).
double stepsize_at(const Schedule& sched, std::int64_t t);

// One constant-stepsize run inside a phase.
struct Epoch {
    double gamma = 0.0;
    std::int64_t length = 0;
};

// Epoch decomposition of a phase of the given length, consistent with
// stepsize_at step by step; epoch lengths sum to the phase length.
std::vector<Epoch> phase_epochs(std::int64_t length, double gamma);

// prod_{t over the phase} (1 - gamma_t * lambda), evaluated per epoch as a
// power of the constant factor. Signed product; callers square it as needed.
double phase_decay_product(std::int64_t length, double gamma, double lambda);

} // namespace covshift
