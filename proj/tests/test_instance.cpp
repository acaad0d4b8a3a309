#include <doctest.h>

#include <cmath>

#include "covshift/instance.hpp"

using namespace covshift;

TEST_CASE("pk instance reverses the top-k source eigenvalues") {
    const ProblemInstance inst = make_pk_instance(2, 4);
    CHECK(inst.dim() == 4);
    CHECK(inst.h[0] == 1.0);
    CHECK(inst.h[1] == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
    CHECK(inst.h[2] == doctest::Approx(std::pow(3.0, -1.5)).epsilon(1e-15));
    CHECK(inst.h[3] == doctest::Approx(std::pow(4.0, -1.5)).epsilon(1e-15));
    CHECK(inst.g[0] == 0.25);
    CHECK(inst.g[1] == 1.0);
    CHECK(inst.g[2] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(inst.g[3] == 0.0625);
    CHECK(inst.w_star[0] == 1.0);
    CHECK(inst.w_star[1] == 1.0);
    CHECK(inst.w_star[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(inst.w_star[3] == 0.25);
    CHECK(inst.sigma2 == 1.0);
}

TEST_CASE("pk instance with k=1 keeps the plain power law") {
    const ProblemInstance inst = make_pk_instance(1, 3);
    CHECK(inst.g[0] == 1.0);
    CHECK(inst.g[1] == 0.25);
    CHECK(inst.g[2] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(inst.h[0] == 1.0);
    CHECK(inst.h[1] == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
}

TEST_CASE("pk instance traces stay near one") {
    const ProblemInstance big = make_pk_instance(5, 200);
    CHECK(big.g.trace() > 1.0);
    CHECK(big.g.trace() < 2.5);
    CHECK(big.h.trace() > 1.0);
    CHECK(big.h.trace() < 2.5);

    for (int k : {1, 2, 5, 20}) {
        for (int d : {20, 50, 300}) {
            if (d < k) continue;
            const ProblemInstance inst = make_pk_instance(k, d);
            CHECK(inst.h.trace() < 2.62);
            CHECK(inst.g.trace() < 3.0);
        }
    }
}

TEST_CASE("pk instance rejects bad arguments") {
    CHECK_THROWS_AS(make_pk_instance(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_pk_instance(5, 4), std::invalid_argument);
}

TEST_CASE("example1 instance matches the paper's layout") {
    const ProblemInstance inst = make_example1_instance(0.25);
    REQUIRE(inst.dim() == 5);
    CHECK(inst.h[0] == 1.0);
    for (int i = 1; i < 5; ++i) CHECK(inst.h[i] == 0.5);
    CHECK(inst.g[0] == 0.0625);
    CHECK(inst.g[1] == 1.0);
    CHECK(inst.g[2] == 0.0);
    CHECK(inst.w_star[0] == 1.0);
    CHECK(inst.w_star[1] == 1.0);
    CHECK(inst.w_star[2] == 0.0);
    CHECK(inst.sigma2 == 1.0);

    const ProblemInstance fine = make_example1_instance(1.0 / 16.0);
    CHECK(fine.dim() == 9);
    CHECK(fine.h.trace() == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(fine.g[0] == doctest::Approx(1.0 / 256.0).epsilon(1e-15));
}

TEST_CASE("example1 signal norms sit in [1, 2]") {
    for (double eps : {0.25, 1.0 / 16.0, 1.0 / 64.0}) {
        const ProblemInstance inst = make_example1_instance(eps);
        const NormPair norms = instance_norms(inst, inst.w_star);
        CHECK(norms.norm_h == doctest::Approx(1.0 + std::sqrt(eps)).epsilon(1e-14));
        CHECK(norms.norm_g == doctest::Approx(1.0 + eps * eps).epsilon(1e-14));
        CHECK(norms.norm_h >= 1.0);
        CHECK(norms.norm_h <= 2.0);
        CHECK(norms.norm_g >= 1.0);
        CHECK(norms.norm_g <= 2.0);
    }
}

TEST_CASE("example1 rejects eps with non-integer copy count") {
    CHECK_THROWS_AS(make_example1_instance(0.3), std::invalid_argument);
    CHECK_THROWS_AS(make_example1_instance(1.5), std::invalid_argument);
    CHECK_THROWS_AS(make_example1_instance(0.0), std::invalid_argument);
}

TEST_CASE("custom instance validation") {
    const ProblemInstance one =
        make_custom_instance(Spectrum({1.0}), Spectrum({1.0}), {1.0}, 1.0);
    CHECK(one.dim() == 1);

    CHECK_THROWS_AS(
        make_custom_instance(Spectrum({1.0, 0.5}), Spectrum({1.0}), {1.0}, 1.0),
        std::invalid_argument);
    CHECK_THROWS_AS(make_custom_instance(Spectrum({0.0, 0.0}), Spectrum({1.0, 1.0}),
                                         {1.0, 1.0}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_custom_instance(Spectrum({1.0}), Spectrum({1.0}), {1.0}, -1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(Spectrum({-0.5}), std::invalid_argument);
}

TEST_CASE("instance norms") {
    const ProblemInstance inst =
        make_custom_instance(Spectrum({2.0, 3.0}), Spectrum({1.0, 1.0}), {0.0, 0.0}, 1.0);
    CHECK(instance_norms(inst, {1.0, 1.0}).norm_g == 5.0);

    const ProblemInstance pk = make_pk_instance(2, 4);
    const NormPair at_star = instance_norms(pk, pk.w_star);
    CHECK(at_star.norm_h == doctest::Approx(1.3827492338965933).epsilon(1e-12));

    const NormPair at_zero = instance_norms(pk, {0.0, 0.0, 0.0, 0.0});
    CHECK(at_zero.norm_g == 0.0);
    CHECK(at_zero.norm_h == 0.0);

    CHECK_THROWS_AS(instance_norms(pk, {1.0}), std::invalid_argument);
}

TEST_CASE("norms scale quadratically") {
    const ProblemInstance pk = make_pk_instance(3, 6);
    std::vector<double> w{0.3, -1.2, 0.7, 0.0, 2.0, -0.4};
    const NormPair base = instance_norms(pk, w);
    for (double c : {-2.0, 0.5, 3.0}) {
        std::vector<double> scaled = w;
        for (double& v : scaled) v *= c;
        const NormPair got = instance_norms(pk, scaled);
        CHECK(got.norm_g == doctest::Approx(c * c * base.norm_g).epsilon(1e-12));
        CHECK(got.norm_h == doctest::Approx(c * c * base.norm_h).epsilon(1e-12));
    }
}

TEST_CASE("instance file round trip is exact") {
    const ProblemInstance inst = make_pk_instance(3, 7);
    const ProblemInstance back = parse_instance(format_instance(inst));
    REQUIRE(back.dim() == inst.dim());
    for (std::size_t i = 0; i < inst.dim(); ++i) {
        CHECK(back.g[i] == inst.g[i]);
        CHECK(back.h[i] == inst.h[i]);
        CHECK(back.w_star[i] == inst.w_star[i]);
    }
    CHECK(back.sigma2 == inst.sigma2);
}

TEST_CASE("instance file parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_instance("g = 1\nh = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_instance("g = 1\nh = 1\nw_star = 1\nsigma2 = 1\nbogus = 2\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_instance("g = 1,x\nh = 1\nw_star = 1\nsigma2 = 1\n"),
                    std::invalid_argument);
}

TEST_CASE("instance specs resolve") {
    const ProblemInstance pk = resolve_instance_spec("pk:5:20");
    CHECK(pk.dim() == 20);
    const ProblemInstance ex = resolve_instance_spec("example1:0.25");
    CHECK(ex.dim() == 5);
    CHECK_THROWS_AS(resolve_instance_spec("pk:0:10"), std::invalid_argument);
    CHECK_THROWS(resolve_instance_spec("/nonexistent/path/instance.txt"));
}

TEST_CASE("gaussian constants") {
    const ProblemInstance pk = make_pk_instance(2, 4);
    const MomentConstants c = MomentConstants::gaussian(pk);
    CHECK(c.alpha == 3.0);
    CHECK(c.beta == 1.0);
    CHECK(c.r2 ==
          doctest::Approx(3.0 * std::max(pk.g.trace(), pk.h.trace())).epsilon(1e-15));
}
