#include "covshift/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "covshift/bounds.hpp"
#include "covshift/oracle.hpp"
#include "covshift/rng.hpp"
#include "covshift/sgd.hpp"
#include "covshift/study.hpp"
#include "covshift/sweep.hpp"

namespace covshift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

double uniform_in(RngState& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.next_uniform_open();
}

double log_uniform_in(RngState& rng, double lo, double hi) {
    return std::exp(uniform_in(rng, std::log(lo), std::log(hi)));
}

// Expected excess risk by tensor-product Gauss-Hermite quadrature over every
// covariate coordinate and noise draw of a short SGD trajectory. Independent
// of the oracle recursions: it runs the raw update on quadrature nodes.
double quadrature_expected_risk(const ProblemInstance& inst, const Schedule& sched) {
    const std::size_t d = inst.dim();
    const std::int64_t steps = sched.m + sched.n;
    // Degree-5-exact nodes for the covariate coordinates (iterate risk has
    // degree <= 4 per coordinate), degree-3-exact for noise (degree <= 2).
    const double x_nodes[3] = {-std::sqrt(3.0), 0.0, std::sqrt(3.0)};
    const double x_weights[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
    const double e_nodes[2] = {-1.0, 1.0};
    const double e_weights[2] = {0.5, 0.5};

    const std::size_t vars = static_cast<std::size_t>(steps) * (d + 1);
    std::vector<int> digit(vars, 0);
    std::vector<int> radix(vars);
    for (std::size_t v = 0; v < vars; ++v)
        radix[v] = (v % (d + 1) < d) ? 3 : 2; // last slot per step is the noise draw

    double total = 0.0;
    std::vector<double> w(d), x(d);
    const double noise_sd = std::sqrt(inst.sigma2);
    for (;;) {
        double weight = 1.0;
        for (std::size_t v = 0; v < vars; ++v)
            weight *= (radix[v] == 3) ? x_weights[digit[v]] : e_weights[digit[v]];

        std::fill(w.begin(), w.end(), 0.0);
        for (std::int64_t t = 0; t < steps; ++t) {
            const Spectrum& spec = (t < sched.m) ? inst.g : inst.h;
            const double gamma = stepsize_at(sched, t);
            const std::size_t base = static_cast<std::size_t>(t) * (d + 1);
            double y = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                x[i] = std::sqrt(spec[i]) * x_nodes[digit[base + i]];
                y += x[i] * inst.w_star[i];
            }
            y += noise_sd * e_nodes[digit[base + d]];
            double xw = 0.0;
            for (std::size_t i = 0; i < d; ++i) xw += x[i] * w[i];
            const double scale = gamma * (y - xw);
            for (std::size_t i = 0; i < d; ++i) w[i] += scale * x[i];
        }
        total += weight * excess_risk(inst, w);

        std::size_t v = 0;
        while (v < vars && ++digit[v] == radix[v]) digit[v++] = 0;
        if (v == vars) break;
        if (vars == 0) break;
    }
    return total;
}

ProblemInstance random_small_instance(RngState& rng, int max_d) {
    const int d = 1 + static_cast<int>(rng.next_u64() % max_d);
    std::vector<double> g(d), h(d), w(d);
    for (int i = 0; i < d; ++i) {
        g[i] = uniform_in(rng, 0.1, 2.0);
        h[i] = uniform_in(rng, 0.1, 2.0);
        w[i] = uniform_in(rng, -1.5, 1.5);
    }
    if (d >= 2 && rng.next_uniform_open() < 0.3)
        g[rng.next_u64() % d] = 0.0; // inert source coordinate
    double sigma2 = uniform_in(rng, 0.0, 1.5);
    if (rng.next_uniform_open() < 0.2) sigma2 = 0.0;
    return make_custom_instance(Spectrum(g), Spectrum(h), w, sigma2);
}

} // namespace

CheckResult check_oracle_hand_value() {
    CheckResult res{"oracle-hand-value", false, ""};
    const ProblemInstance inst =
        make_custom_instance(Spectrum({1.0}), Spectrum({1.0}), {1.0}, 1.0);
    const RiskSplit split = expected_excess_risk(inst, Schedule{1, 0, 0.5, 0.0});
    const double err = std::max(std::abs(split.bias - 0.375),
                                std::abs(split.variance - 0.125));
    res.pass = err < 1e-15;
    res.detail = strf("bias=%.17g variance=%.17g (want 0.375, 0.125)", split.bias,
                      split.variance);
    return res;
}

CheckResult check_oracle_exactness(std::uint64_t seed) {
    CheckResult res{"oracle-exactness", true, ""};
    RngState rng{seed, 0};
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const ProblemInstance inst = random_small_instance(rng, 3);
        const double cap = 0.5 / std::max(inst.g.trace(), inst.h.trace());
        Schedule sched;
        sched.m = static_cast<std::int64_t>(rng.next_u64() % 4);
        sched.n = static_cast<std::int64_t>(rng.next_u64() % (4 - sched.m));
        sched.gamma0 = uniform_in(rng, 0.01, cap);
        sched.gamma_m = (rng.next_uniform_open() < 0.2) ? 0.0 : uniform_in(rng, 0.01, cap);

        const double quad = quadrature_expected_risk(inst, sched);
        const double oracle = expected_excess_risk(inst, sched).total();
        const double rel =
            std::abs(quad - oracle) / std::max({std::abs(quad), std::abs(oracle), 1e-12});
        worst = std::max(worst, rel);
        if (rel > 1e-8) res.pass = false;
    }
    res.detail = strf("worst relative deviation %.3g (tolerance 1e-8)", worst);
    return res;
}

CheckResult check_mc_oracle_agreement(std::uint64_t seed) {
    CheckResult res{"mc-oracle-agreement", true, ""};
    const ProblemInstance inst = make_pk_instance(5, 50);
    SweepConfig cfg;
    cfg.instance_spec = "pk:5:50";
    cfg.mode = Mode::Supervised;
    std::string detail;
    for (std::int64_t n : {200, 2000}) {
        const TunedGammas tuned = tune_stepsizes(inst, cfg, n);
        const Schedule sched{0, n, 0.0, tuned.gamma_m};
        const double oracle = tuned.risk;
        const int repeats = 200;
        std::vector<double> risks(repeats);
        for (int r = 0; r < repeats; ++r) {
            const RunResult run = run_sgd(inst, sched, derive_seed(seed, 1000 + r));
            risks[r] = excess_risk(inst, run.w_final);
        }
        const double mean = pairwise_sum(risks) / repeats;
        double sq = 0.0;
        for (double v : risks) sq += (v - mean) * (v - mean);
        const double se = std::sqrt(sq / (repeats - 1) / repeats);
        const double dev = std::abs(mean - oracle);
        const bool ok = dev <= 3.0 * se && dev <= 0.05 * oracle;
        if (!ok) res.pass = false;
        detail += strf("[N=%lld oracle=%.4g mc=%.4g dev=%.2gse,%.2g%%] ",
                       static_cast<long long>(n), oracle, mean, se > 0 ? dev / se : 0.0,
                       100.0 * dev / oracle);
    }
    res.detail = detail;
    return res;
}

CheckResult check_bound_sandwich(double var_upper_coef) {
    CheckResult res{"bound-sandwich", true, ""};
    double worst_lower = kInf;  // min(actual/lower); must stay >= 1
    double worst_upper = kInf;  // min(upper/actual); must stay >= 1
    int points = 0;
    const std::int64_t budgets[][2] = {{1000, 0}, {0, 1000}, {1000, 100}};
    for (int k : {1, 2, 5}) {
        const ProblemInstance inst = make_pk_instance(k, 30);
        MomentConstants constants = MomentConstants::gaussian(inst);
        constants.var_upper_coef = var_upper_coef;
        for (const auto& mn : budgets) {
            for (double gamma : {0.004, 0.01, 0.02, 0.035}) {
                const Schedule sched{mn[0], mn[1], gamma, gamma};
                const RiskSplit oracle = expected_excess_risk(inst, sched);
                const double hb = 2.0 * oracle.bias;     // <H, B>
                const double hc = 2.0 * oracle.variance; // <H, C>
                const BoundReport rep = make_bound_report(inst, sched, constants);
                if (!rep.lower_bound_valid) {
                    res.pass = false;
                    res.detail = strf("lower bound preconditions unmet at k=%d", k);
                    return res;
                }
                ++points;
                auto ratio = [](double num, double den) {
                    return den > 0.0 ? num / den : kInf;
                };
                worst_lower = std::min({worst_lower, ratio(hb, rep.bias_lower),
                                        ratio(hc, rep.var_lower)});
                worst_upper = std::min({worst_upper, ratio(rep.bias_upper, hb),
                                        ratio(rep.var_upper, hc)});
                if (hb < rep.bias_lower || hb > rep.bias_upper || hc < rep.var_lower ||
                    hc > rep.var_upper)
                    res.pass = false;
            }
        }
    }
    res.detail = strf("%d grid points; min oracle/lower %.3g, min upper/oracle %.3g",
                      points, worst_lower, worst_upper);
    return res;
}

CheckResult check_index_set_optimality(std::uint64_t seed) {
    CheckResult res{"index-set-optimality", true, ""};
    RngState rng{seed, 0};
    double worst_excess = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_u64() % 9);
        std::vector<double> g(d), h(d), w(d);
        for (int i = 0; i < d; ++i) {
            g[i] = log_uniform_in(rng, 0.02, 1.0);
            h[i] = log_uniform_in(rng, 0.02, 1.0);
            w[i] = uniform_in(rng, -1.0, 1.0);
        }
        const ProblemInstance inst =
            make_custom_instance(Spectrum(g), Spectrum(h), w, uniform_in(rng, 0.5, 1.5));
        const double cap = 1.0 / (12.0 * std::max(inst.g.trace(), inst.h.trace()));
        Schedule sched;
        sched.m = 100 + static_cast<std::int64_t>(rng.next_u64() % 2900);
        sched.n = 100 + static_cast<std::int64_t>(rng.next_u64() % 2900);
        sched.gamma0 = log_uniform_in(rng, 1e-3, cap);
        sched.gamma_m = log_uniform_in(rng, 1e-3, cap);

        const MomentConstants constants = MomentConstants::gaussian(inst);
        const BoundEvaluator eval(inst, sched, constants);
        const IndexSetPair opt = optimal_index_sets(inst, sched);
        const double opt_value =
            eval.upper_total(opt.j_set.mask(d), opt.k_set.mask(d));

        double best = kInf;
        std::vector<char> jm(d), km(d);
        for (std::uint32_t jbits = 0; jbits < (1u << d); ++jbits) {
            for (int i = 0; i < d; ++i) jm[i] = (jbits >> i) & 1u;
            for (std::uint32_t kbits = 0; kbits < (1u << d); ++kbits) {
                for (int i = 0; i < d; ++i) km[i] = (kbits >> i) & 1u;
                best = std::min(best, eval.upper_total(jm, km));
            }
        }
        const double excess = (opt_value - best) / std::max(best, 1e-300);
        worst_excess = std::max(worst_excess, excess);
        if (opt_value > best * (1.0 + 1e-12))
            res.pass = false;
    }
    res.detail = strf("worst relative excess over brute-force minimum %.3g", worst_excess);
    return res;
}

CheckResult check_crude_variance_bound(std::uint64_t seed) {
    CheckResult res{"crude-variance-bound", true, ""};
    RngState rng{seed, 0};
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        ProblemInstance inst = random_small_instance(rng, 8);
        if (!(inst.sigma2 > 0.0)) inst.sigma2 = 1.0;
        const double r2 = 3.0 * std::max(inst.g.trace(), inst.h.trace());
        Schedule sched;
        sched.m = 50 + static_cast<std::int64_t>(rng.next_u64() % 350);
        sched.n = 50 + static_cast<std::int64_t>(rng.next_u64() % 350);
        sched.gamma0 = uniform_in(rng, 0.05, 0.8) / r2;
        sched.gamma_m = uniform_in(rng, 0.05, 0.8) / r2;
        const double gamma = std::max(sched.gamma0, sched.gamma_m);
        const double cap = gamma * inst.sigma2 / (1.0 - gamma * r2);
        DiagState st = initial_state(inst);
        double max_ratio = 0.0;
        evolve(inst, sched, st,
               [&](std::int64_t, int, double, const DiagState& state) {
                   for (double c : state.c) max_ratio = std::max(max_ratio, c / cap);
               });
        worst = std::max(worst, max_ratio);
        if (max_ratio > 1.0 + 1e-12) res.pass = false;
    }
    res.detail = strf("max c_i / cap over trajectories %.4g", worst);
    return res;
}

CheckResult check_example1_scaling() {
    CheckResult res{"example1-scaling", true, ""};
    const Example1Study study = example1_study({0.25, 0.0625, 0.015625});
    std::string detail;
    for (const Example1Row& row : study.rows) {
        if (row.supervised_saturated || row.pretrain_saturated) res.pass = false;
        if (!(row.finetune_risk < row.eps)) res.pass = false;
        detail += strf("[eps=%.4g N*=%lld M*=%lld ft=%.3g] ", row.eps,
                       static_cast<long long>(row.supervised_n),
                       static_cast<long long>(row.pretrain_m), row.finetune_risk);
    }
    if (std::abs(study.supervised_exponent + 1.5) > 0.4) res.pass = false;
    if (std::abs(study.pretrain_exponent + 2.0) > 0.4) res.pass = false;
    res.detail = detail + strf("exponents: supervised %.3f (want -1.5+-0.4), pretrain %.3f (want -2.0+-0.4)",
                               study.supervised_exponent, study.pretrain_exponent);
    return res;
}

CheckResult check_figure1_properties() {
    CheckResult res{"figure1-properties", true, ""};
    const std::int64_t budget = 5000;
    double prev_ratio = 0.0;
    double sup_risk_k10 = 0.0;
    std::string detail;
    for (int k : {5, 10, 20}) {
        const ProblemInstance inst = make_pk_instance(k, 200);
        SweepConfig sup_cfg;
        sup_cfg.instance_spec = "-";
        sup_cfg.mode = Mode::Supervised;
        const double sup_risk = tune_stepsizes(inst, sup_cfg, budget).risk;
        SweepConfig pre_cfg = sup_cfg;
        pre_cfg.mode = Mode::Pretrain;
        const double pre_risk = tune_stepsizes(inst, pre_cfg, budget).risk;
        const double ratio = pre_risk / sup_risk;
        detail += strf("[k=%d sup=%.4g pre=%.4g ratio=%.3g] ", k, sup_risk, pre_risk, ratio);
        if (ratio < prev_ratio) res.pass = false; // alignment ordering
        prev_ratio = ratio;
        if (k == 10) sup_risk_k10 = sup_risk;
        if (k == 5 && !(pre_risk <= 2.0 * sup_risk)) res.pass = false;
    }

    // Finetuning from a 5000-sample pretrained model at k=10 should reach the
    // supervised 5000-sample risk with strictly fewer target samples.
    const ProblemInstance inst10 = make_pk_instance(10, 200);
    SweepConfig ft_cfg;
    ft_cfg.instance_spec = "-";
    ft_cfg.mode = Mode::Finetune;
    ft_cfg.pretrain_budget = budget;
    std::int64_t reached_at = -1;
    for (std::int64_t n : {250, 500, 1000, 2000, 4000}) {
        const double risk = tune_stepsizes(inst10, ft_cfg, n).risk;
        if (risk <= sup_risk_k10) {
            reached_at = n;
            break;
        }
    }
    if (reached_at < 0) res.pass = false;
    res.detail = detail + strf("k=10 finetune reaches supervised level at N=%lld",
                               static_cast<long long>(reached_at));
    return res;
}

CheckResult check_threshold_consistency(std::uint64_t seed) {
    CheckResult res{"threshold-consistency", true, ""};
    RngState rng{seed, 0};
    const double slack = 100.0;
    double worst_factor = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 3 + static_cast<int>(rng.next_u64() % 8);
        const double decay = uniform_in(rng, 1.2, 2.2);
        std::vector<double> h(d), g(d), w(d);
        for (int i = 0; i < d; ++i) {
            h[i] = std::pow(static_cast<double>(i + 1), -decay);
            g[i] = h[i] * log_uniform_in(rng, 0.25, 4.0);
            w[i] = uniform_in(rng, -1.0, 1.0);
        }
        ProblemInstance inst = make_custom_instance(Spectrum(g), Spectrum(h), w, 1.0);
        // Bounded signal-to-noise: scale w* so that ||w*||_G^2 <= sigma2.
        const double target_snr = uniform_in(rng, 0.2, 1.0);
        const double scale =
            std::sqrt(target_snr * inst.sigma2 / instance_norms(inst, inst.w_star).norm_g);
        for (double& v : inst.w_star) v *= scale;

        const std::int64_t n_sup = 500;
        SweepConfig sup_cfg;
        sup_cfg.instance_spec = "-";
        sup_cfg.mode = Mode::Supervised;
        const TunedGammas sup = tune_stepsizes(inst, sup_cfg, n_sup);
        const MomentConstants constants = MomentConstants::gaussian(inst);
        const PretrainThreshold thr = pretrain_sufficient_m(inst, n_sup, sup.gamma_m, constants);
        const FinetuneThreshold thr_ft =
            finetune_sufficient_m(inst, n_sup, sup.gamma_m, 100, constants);
        if (!(thr_ft.m_threshold <= thr.m_threshold)) res.pass = false;
        if (std::isinf(thr.m_threshold)) {
            res.pass = false;
            continue;
        }

        const std::int64_t m = static_cast<std::int64_t>(thr.m_threshold);
        SweepConfig pre_cfg;
        pre_cfg.instance_spec = "-";
        pre_cfg.mode = Mode::Pretrain;
        // Tuning grid extended with the stepsize used in the sufficiency
        // argument, deff_sup / (n_eff_sup * tr(H)).
        pre_cfg.gamma_grid = default_gamma_grid(inst);
        pre_cfg.gamma_grid.push_back(thr.deff_sup /
                                     (effective_count(n_sup) * inst.h.trace()));
        std::sort(pre_cfg.gamma_grid.begin(), pre_cfg.gamma_grid.end());
        const double pre_risk = tune_stepsizes(inst, pre_cfg, m).risk;

        const double snr = instance_norms(inst, inst.w_star).norm_g / inst.sigma2;
        const double allowed = slack * (1.0 + 3.0 * snr) * sup.risk;
        worst_factor = std::max(worst_factor, pre_risk / ((1.0 + 3.0 * snr) * sup.risk));
        if (!(pre_risk <= allowed)) res.pass = false;
    }
    res.detail = strf("worst pretrain/supervised factor %.3g (allowed %.0f)", worst_factor,
                      slack);
    return res;
}

CheckResult check_sweep_determinism(const std::string& scratch_dir) {
    CheckResult res{"sweep-determinism", true, ""};
    SweepConfig cfg;
    cfg.instance_spec = "pk:5:50";
    cfg.mode = Mode::Supervised;
    cfg.sample_grid = {50, 100, 200, 400};
    cfg.repeats = 10;
    cfg.base_seed = 42;
    cfg.evaluator = Evaluator::MonteCarlo;
    const ProblemInstance inst = make_pk_instance(5, 50);

    const std::string csv_a = rows_to_csv(run_sweep(inst, cfg, 1));
    const std::string csv_b = rows_to_csv(run_sweep(inst, cfg, 1));
    const std::string csv_c = rows_to_csv(run_sweep(inst, cfg, 4));
    const bool repeat_ok = csv_a == csv_b;
    const bool worker_ok = csv_a == csv_c;

    // Also exercise the file path end to end.
    const std::string p1 = scratch_dir + "/sweep_run1.csv";
    const std::string p2 = scratch_dir + "/sweep_run2.csv";
    emit_csv(run_sweep(inst, cfg, 1), p1);
    emit_csv(run_sweep(inst, cfg, 4), p2);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const bool file_ok = slurp(p1) == slurp(p2) && slurp(p1) == csv_a;
    res.pass = repeat_ok && worker_ok && file_ok;
    res.detail = strf("rerun=%s workers{1,4}=%s files=%s", repeat_ok ? "identical" : "DIFFER",
                      worker_ok ? "identical" : "DIFFER", file_ok ? "identical" : "DIFFER");
    return res;
}

std::vector<CheckResult> run_verify_checks(std::uint64_t seed) {
    std::vector<CheckResult> results;
    results.push_back(check_oracle_hand_value());
    results.push_back(check_mc_oracle_agreement(seed));
    results.push_back(check_bound_sandwich());
    results.push_back(check_index_set_optimality(seed));
    results.push_back(check_crude_variance_bound(seed));
    return results;
}

} // namespace covshift
