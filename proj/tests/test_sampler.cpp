#include <doctest.h>

#include <cmath>
#include <vector>

#include "covshift/instance.hpp"
#include "covshift/rng.hpp"
#include "covshift/sampler.hpp"

using namespace covshift;

TEST_CASE("zero spectrum gives the zero covariate") {
    const Spectrum spec({0.0, 0.0, 0.0});
    std::vector<double> x;
    for (std::uint64_t seed : {1ull, 99ull, 123456789ull}) {
        RngState rng{seed, 0};
        sample_covariate(spec, rng, x);
        CHECK(x == std::vector<double>{0.0, 0.0, 0.0});
    }
}

TEST_CASE("identical rng states give bitwise identical streams") {
    RngState a{77, 0};
    RngState b{77, 0};
    for (int i = 0; i < 1000; ++i) CHECK(a.next_normal() == b.next_normal());
    CHECK(a.counter == b.counter);

    RngState c{derive_seed(77, 3), 0};
    RngState d{derive_seed(77, 4), 0};
    CHECK(c.next_u64() != d.next_u64());
}

TEST_CASE("sample variance matches the spectrum") {
    const Spectrum spec({4.0});
    RngState rng{2024, 0};
    const int n = 1'000'000;
    double sum = 0.0, sum_sq = 0.0;
    std::vector<double> x;
    for (int i = 0; i < n; ++i) {
        sample_covariate(spec, rng, x);
        sum += x[0];
        sum_sq += x[0] * x[0];
    }
    const double var = sum_sq / n - (sum / n) * (sum / n);
    CHECK(var > 3.97);
    CHECK(var < 4.03);
}

TEST_CASE("coordinates are independent") {
    const Spectrum spec({1.0, 1.0});
    RngState rng{5150, 0};
    const int n = 1'000'000;
    double cross = 0.0;
    std::vector<double> x;
    for (int i = 0; i < n; ++i) {
        sample_covariate(spec, rng, x);
        cross += x[0] * x[1];
    }
    cross /= n;
    CHECK(cross > -0.004);
    CHECK(cross < 0.004);
}

TEST_CASE("empirical covariance converges coordinatewise") {
    const Spectrum spec({2.0, 0.5, 0.0, 1.0});
    RngState rng{31337, 0};
    const int n = 1'000'000;
    std::vector<double> second(4, 0.0);
    std::vector<double> x;
    for (int i = 0; i < n; ++i) {
        sample_covariate(spec, rng, x);
        for (int j = 0; j < 4; ++j) second[j] += x[j] * x[j];
    }
    for (int j = 0; j < 4; ++j) {
        const double est = second[j] / n;
        // Var(x^2) = 2 s^2 for x ~ N(0, s).
        const double se = std::sqrt(2.0 * spec[j] * spec[j] / n);
        CHECK(std::abs(est - spec[j]) <= 5.0 * se + 1e-12);
    }
}

TEST_CASE("labels: no signal and no noise give y = 0") {
    const ProblemInstance inst =
        make_custom_instance(Spectrum({1.0, 2.0}), Spectrum({1.0, 1.0}), {0.0, 0.0}, 0.0);
    RngState rng{9, 0};
    for (int i = 0; i < 100; ++i) CHECK(sample_labeled(inst, Domain::Source, rng).y == 0.0);
}

TEST_CASE("residual variance equals sigma2") {
    const ProblemInstance inst =
        make_custom_instance(Spectrum({1.0}), Spectrum({1.0}), {1.0}, 1.0);
    RngState rng{4242, 0};
    const int n = 1'000'000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const LabeledSample s = sample_labeled(inst, Domain::Source, rng);
        const double r = s.y - s.x[0];
        sum += r * r;
    }
    const double mean = sum / n;
    CHECK(mean > 0.995);
    CHECK(mean < 1.005);
}

TEST_CASE("second moment of target labels") {
    const ProblemInstance inst = make_pk_instance(2, 4);
    const double expected = instance_norms(inst, inst.w_star).norm_h + inst.sigma2;
    RngState rng{777, 0};
    const int n = 1'000'000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const LabeledSample s = sample_labeled(inst, Domain::Target, rng);
        sum += s.y * s.y;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - expected) <= 0.01 * expected);
}

TEST_CASE("residual is uncorrelated with every coordinate") {
    const ProblemInstance inst = make_pk_instance(3, 6);
    RngState rng{616, 0};
    const int n = 1'000'000;
    std::vector<double> cross(6, 0.0);
    std::vector<double> x;
    for (int i = 0; i < n; ++i) {
        const double y = sample_labeled(inst, Domain::Target, rng, x);
        double fit = 0.0;
        for (int j = 0; j < 6; ++j) fit += x[j] * inst.w_star[j];
        const double resid = y - fit;
        for (int j = 0; j < 6; ++j) cross[j] += resid * x[j];
    }
    const double tol = 4.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < 6; ++j) {
        // Correlation scale: sd(resid) = 1, sd(x_j) = sqrt(lambda_j).
        const double corr = (cross[j] / n) / std::sqrt(inst.h[j]);
        CHECK(std::abs(corr) <= tol);
    }
}
