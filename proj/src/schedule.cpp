#include "covshift/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace covshift {

void validate_schedule(const Schedule& sched) {
    if (sched.m < 0 || sched.n < 0)
        throw std::invalid_argument("schedule: sample counts must be >= 0");
    if (sched.m > 0 && !(sched.gamma0 > 0.0))
        throw std::invalid_argument("schedule: gamma0 must be > 0 when m > 0");
    if (sched.n > 0 && !(sched.gamma_m >= 0.0))
        throw std::invalid_argument("schedule: gamma_m must be >= 0");
    if (!std::isfinite(sched.gamma0) || !std::isfinite(sched.gamma_m))
        throw std::invalid_argument("schedule: stepsizes must be finite");
}

namespace {

// Epoch index floor(t / (length / ln(length))): ln(length) epochs, each as
// long as the effective sample count. A phase of length <= 2 is one epoch.
std::int64_t epoch_of(std::int64_t t, std::int64_t length) {
    if (length <= 2) return 0;
    const double epoch_len =
        static_cast<double>(length) / std::log(static_cast<double>(length));
    return static_cast<std::int64_t>(std::floor(static_cast<double>(t) / epoch_len));
}

} // namespace

double stepsize_at(const Schedule& sched, std::int64_t t) {
    if (t < 0 || t >= sched.m + sched.n)
        throw std::invalid_argument("stepsize_at: t out of range");
    if (t < sched.m)
        return sched.gamma0 / std::exp2(static_cast<double>(epoch_of(t, sched.m)));
    return sched.gamma_m / std::exp2(static_cast<double>(epoch_of(t - sched.m, sched.n)));
}

std::vector<Epoch> phase_epochs(std::int64_t length, double gamma) {
    std::vector<Epoch> out;
    if (length <= 0) return out;
    if (length <= 2) {
        out.push_back({gamma, length});
        return out;
    }
    const double epoch_len =
        static_cast<double>(length) / std::log(static_cast<double>(length));
    std::int64_t t = 0;
    while (t < length) {
        const std::int64_t ell = epoch_of(t, length);
        // First step of the next epoch; candidate from the real boundary,
        // nudged to agree with the floor arithmetic of epoch_of.
        std::int64_t next = static_cast<std::int64_t>(
            std::ceil(static_cast<double>(ell + 1) * epoch_len));
        while (next > t + 1 && epoch_of(next - 1, length) >= ell + 1) --next;
        while (next < length && epoch_of(next, length) <= ell) ++next;
        if (next > length) next = length;
        out.push_back({gamma / std::exp2(static_cast<double>(ell)), next - t});
        t = next;
    }
    return out;
}

double phase_decay_product(std::int64_t length, double gamma, double lambda) {
    double prod = 1.0;
    for (const Epoch& e : phase_epochs(length, gamma)) {
        const double factor = 1.0 - e.gamma * lambda;
        if (factor == 0.0) return 0.0;
        prod *= std::pow(factor, static_cast<double>(e.length));
    }
    return prod;
}

} // namespace covshift
