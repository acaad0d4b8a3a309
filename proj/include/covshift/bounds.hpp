#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covshift/instance.hpp"
#include "covshift/schedule.hpp"

namespace covshift {

// Coordinate subset, 1-based indices in ascending order.
struct IndexSet {
    std::vector<std::uint32_t> members;

    std::size_t size() const { return members.size(); }
    std::vector<char> mask(std::size_t d) const;
    static IndexSet from_mask(const std::vector<char>& mask);
    std::string to_string() const;
};

// Effective sample counts m/ln(m), n/ln(n). Counts 0, 1, 2 pass through
// unchanged (ln would be <= 1 there and inflate the count).
struct EffectiveCounts {
    double m_eff = 0.0;
    double n_eff = 0.0;
};
EffectiveCounts effective_counts(std::int64_t m, std::int64_t n);
double effective_count(std::int64_t n);

// Head-eigenvalue sets that optimize the upper bound:
// J = {j : mu_j >= 1/(gamma0 m_eff)}, K = {k : lambda_k >= 1/(gamma_m n_eff)}.
// A phase with zero samples or zero stepsize yields the empty set.
struct IndexSetPair {
    IndexSet j_set;
    IndexSet k_set;
};
IndexSetPair optimal_index_sets(const ProblemInstance& inst, const Schedule& sched);

// Effective dimension of the finetuning phase:
// |K| + n_eff^2 gamma_m^2 * sum_{i not in K} lambda_i^2.
double deff(const ProblemInstance& inst, const IndexSet& k_set, double n_eff,
            double gamma_m);

// Effective dimension carried over from pretraining through finetuning:
// sum_j p_j lambda_j [1/mu_j if j in J else m_eff^2 gamma0^2 mu_j], where
// p_j is the squared finetune decay product on coordinate j. With n = 0 this
// is the pretraining effective dimension tr(H G_J^{-1}) + m_eff^2 gamma0^2
// tr(H G_{J^c}). Throws if J contains a zero source eigenvalue.
double deff_finetune(const ProblemInstance& inst, const IndexSet& j_set,
                     const Schedule& sched);

// Everything the closed-form risk bounds produce for one (instance,
// schedule): effective counts, index sets, effective dimensions, and the
// explicit-constant upper/lower bias and variance bounds. The bounds bracket
// <H, B> and <H, C>, i.e. twice the bias/variance components of RiskSplit.
struct BoundReport {
    std::int64_t m = 0, n = 0;
    double gamma0 = 0.0, gamma_m = 0.0;
    double m_eff = 0.0, n_eff = 0.0;
    IndexSet j_set, k_set;
    double deff = 0.0;
    double deff_finetune = 0.0;
    double leading_bias = 0.0;
    double bias_upper = 0.0, var_upper = 0.0;
    double bias_lower = 0.0, var_lower = 0.0;
    bool lower_bound_valid = false;
    double snr = 0.0;
    double sigma2 = 0.0;
    MomentConstants constants_used;
};

// Precomputes the per-coordinate decay products once so that bound values at
// arbitrary index sets cost O(d). Used both for the default report and for
// exhaustive (J, K) enumeration.
class BoundEvaluator {
public:
    BoundEvaluator(const ProblemInstance& inst, const Schedule& sched,
                   const MomentConstants& constants);

    double upper_total(const std::vector<char>& j_mask, const std::vector<char>& k_mask) const;
    BoundReport report() const;

private:
    const ProblemInstance& inst_;
    Schedule sched_;
    MomentConstants constants_;
    double m_eff_ = 0.0, n_eff_ = 0.0;
    std::vector<double> pretrain_prod_; // prod (1 - gamma_t mu_i) over phase 1
    std::vector<double> finetune_prod_; // prod (1 - gamma_t lambda_i) over phase 2
    double leading_ = 0.0;

    struct Parts {
        double deff_ft = 0.0;
        double deff = 0.0;
        double norm_j = 0.0; // ||w*||^2 weighted by I_J/(m_eff g0) + G_{J^c}
        double norm_k = 0.0; // ||prod_G w*||^2 weighted by I_K/(n_eff gM) + H_{K^c}
        double norm_g_jc = 0.0;
        double norm_h_kc = 0.0;
        bool valid = true;
    };
    Parts parts(const std::vector<char>& j_mask, const std::vector<char>& k_mask) const;
};

// Full report at the optimizing index sets of optimal_index_sets.
BoundReport risk_upper_bound(const ProblemInstance& inst, const Schedule& sched,
                             const MomentConstants& constants);
BoundReport risk_lower_bound(const ProblemInstance& inst, const Schedule& sched,
                             const MomentConstants& constants);
inline BoundReport make_bound_report(const ProblemInstance& inst, const Schedule& sched,
                                     const MomentConstants& constants) {
    return BoundEvaluator(inst, sched, constants).report();
}

// Unified assembly: leading bias + (1 + sigma2) * SNR * (deff_ft/m_eff +
// deff/n_eff), zero-sample phases dropped.
double unified_risk_bound(const BoundReport& report);

// Flat key-value record, one key per field, 15 significant digits.
std::string serialize_bound_report(const BoundReport& report);

// Smallest source-sample budget whose effective count meets the sufficiency
// threshold for pretraining to match supervised learning at (n_sup,
// gamma_sup): m_eff >= (n_eff_sup)^2 * 4 ||H_K*||_G / (alpha deff_sup).
struct PretrainThreshold {
    double m_threshold = 0.0; // +inf when a needed direction has no source mass
    IndexSet k_star;
    double deff_sup = 0.0;
    double h_over_g_norm = 0.0;
};
PretrainThreshold pretrain_sufficient_m(const ProblemInstance& inst, std::int64_t n_sup,
                                        double gamma_sup, const MomentConstants& constants);

// Same threshold with the head set shrunk by finetuning on n_finetune target
// samples (two-sided eigenvalue condition); always at most the pretraining
// threshold since the set only loses members.
struct FinetuneThreshold {
    double m_threshold = 0.0;
    IndexSet k_dagger;
};
FinetuneThreshold finetune_sufficient_m(const ProblemInstance& inst, std::int64_t n_sup,
                                        double gamma_sup, std::int64_t n_finetune,
                                        const MomentConstants& constants);

} // namespace covshift
