#include <doctest.h>

#include <cmath>

#include "covshift/rng.hpp"
#include "covshift/schedule.hpp"

using namespace covshift;

TEST_CASE("schedule validation") {
    CHECK_THROWS_AS(validate_schedule(Schedule{-1, 0, 0.1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_schedule(Schedule{10, 0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_schedule(Schedule{0, 10, 0.0, -0.1}), std::invalid_argument);
    CHECK_NOTHROW(validate_schedule(Schedule{0, 10, 0.0, 0.0})); // frozen finetune is legal
    CHECK_NOTHROW(validate_schedule(Schedule{0, 0, 0.0, 0.0}));
}

TEST_CASE("stepsize halves once per effective-count epoch") {
    // M = 100: epochs of length 100/ln(100) = 21.71 steps, so the first
    // halving happens at t = 22.
    const Schedule sched{100, 0, 0.1, 0.0};
    CHECK(stepsize_at(sched, 0) == 0.1);
    CHECK(stepsize_at(sched, 5) == 0.1);
    CHECK(stepsize_at(sched, 21) == 0.1);
    CHECK(stepsize_at(sched, 22) == 0.05);
    CHECK(stepsize_at(sched, 43) == 0.05);
    CHECK(stepsize_at(sched, 44) == 0.025);
    CHECK_THROWS_AS(stepsize_at(sched, -1), std::invalid_argument);
    CHECK_THROWS_AS(stepsize_at(sched, 100), std::invalid_argument);
}

TEST_CASE("finetune phase restarts the decay") {
    const Schedule sched{100, 100, 0.1, 0.2};
    CHECK(stepsize_at(sched, 104) == 0.2); // 4 steps into the second phase
    CHECK(stepsize_at(sched, 100 + 22) == 0.1);
}

TEST_CASE("short phases use a constant stepsize") {
    CHECK(stepsize_at(Schedule{1, 0, 0.3, 0.0}, 0) == 0.3);
    const Schedule two{2, 0, 0.3, 0.0};
    CHECK(stepsize_at(two, 0) == 0.3);
    CHECK(stepsize_at(two, 1) == 0.3);
    const Schedule three{3, 0, 0.3, 0.0};
    CHECK(stepsize_at(three, 2) == 0.3); // 3/ln(3) = 2.73 > 2
}

TEST_CASE("epoch decomposition covers each phase exactly") {
    for (std::int64_t length : {1, 2, 3, 7, 50, 101, 1000, 54321, 1000000}) {
        const std::vector<Epoch> epochs = phase_epochs(length, 0.4);
        std::int64_t total = 0;
        double prev = 0.8;
        for (const Epoch& e : epochs) {
            CHECK(e.length > 0);
            CHECK(e.gamma == prev / 2.0); // halves exactly between epochs
            prev = e.gamma;
            total += e.length;
        }
        CHECK(total == length);
    }
}

TEST_CASE("epoch decomposition agrees with stepsize_at step by step") {
    for (std::int64_t m : {1, 2, 5, 37, 400, 9999}) {
        const Schedule sched{m, 0, 0.25, 0.0};
        const std::vector<Epoch> epochs = phase_epochs(m, 0.25);
        std::int64_t t = 0;
        for (const Epoch& e : epochs)
            for (std::int64_t s = 0; s < e.length; ++s, ++t)
                CHECK(stepsize_at(sched, t) == e.gamma);
        CHECK(t == m);
    }
}

TEST_CASE("stepsizes never increase within a phase") {
    const Schedule sched{5000, 3000, 0.5, 0.25};
    double prev = stepsize_at(sched, 0);
    for (std::int64_t t = 1; t < 5000; ++t) {
        const double g = stepsize_at(sched, t);
        CHECK(g <= prev);
        if (g != prev) CHECK(g == prev / 2.0);
        prev = g;
    }
    prev = stepsize_at(sched, 5000);
    for (std::int64_t t = 5001; t < 8000; ++t) {
        const double g = stepsize_at(sched, t);
        CHECK(g <= prev);
        prev = g;
    }
}

TEST_CASE("decay product matches the step-by-step product") {
    RngState rng{99, 0};
    for (int trial = 0; trial < 30; ++trial) {
        const std::int64_t length = 1 + static_cast<std::int64_t>(rng.next_u64() % 3000);
        const double gamma = 0.5 * rng.next_uniform_open();
        const double lambda = 2.0 * rng.next_uniform_open();
        const Schedule sched{length, 0, gamma, 0.0};
        double brute = 1.0;
        for (std::int64_t t = 0; t < length; ++t)
            brute *= 1.0 - stepsize_at(sched, t) * lambda;
        const double fast = phase_decay_product(length, gamma, lambda);
        if (std::abs(brute) < 1e-250)
            CHECK(std::abs(fast) < 1e-240);
        else
            CHECK(fast == doctest::Approx(brute).epsilon(1e-10));
    }
}

TEST_CASE("decay product of an empty phase is one") {
    CHECK(phase_decay_product(0, 0.5, 1.0) == 1.0);
}
