#include "covshift/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace covshift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

} // namespace

std::vector<char> IndexSet::mask(std::size_t d) const {
    std::vector<char> m(d, 0);
    for (std::uint32_t i : members) {
        if (i < 1 || i > d)
            throw std::invalid_argument("IndexSet: index out of 1..d range");
        m[i - 1] = 1;
    }
    return m;
}

IndexSet IndexSet::from_mask(const std::vector<char>& mask) {
    IndexSet s;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) s.members.push_back(static_cast<std::uint32_t>(i + 1));
    return s;
}

std::string IndexSet::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(members[i]);
    }
    return out;
}

double effective_count(std::int64_t n) {
    if (n <= 2) return n < 0 ? 0.0 : static_cast<double>(n);
    return static_cast<double>(n) / std::log(static_cast<double>(n));
}

EffectiveCounts effective_counts(std::int64_t m, std::int64_t n) {
    return {effective_count(m), effective_count(n)};
}

IndexSetPair optimal_index_sets(const ProblemInstance& inst, const Schedule& sched) {
    validate_schedule(sched);
    const EffectiveCounts ec = effective_counts(sched.m, sched.n);
    IndexSetPair out;
    if (sched.m > 0 && sched.gamma0 > 0.0) {
        const double thresh = 1.0 / (sched.gamma0 * ec.m_eff);
        for (std::size_t i = 0; i < inst.dim(); ++i)
            if (inst.g[i] >= thresh)
                out.j_set.members.push_back(static_cast<std::uint32_t>(i + 1));
    }
    if (sched.n > 0 && sched.gamma_m > 0.0) {
        const double thresh = 1.0 / (sched.gamma_m * ec.n_eff);
        for (std::size_t i = 0; i < inst.dim(); ++i)
            if (inst.h[i] >= thresh)
                out.k_set.members.push_back(static_cast<std::uint32_t>(i + 1));
    }
    return out;
}

double deff(const ProblemInstance& inst, const IndexSet& k_set, double n_eff,
            double gamma_m) {
    const std::vector<char> mask = k_set.mask(inst.dim());
    double tail = 0.0;
    for (std::size_t i = 0; i < inst.dim(); ++i)
        if (!mask[i]) tail += inst.h[i] * inst.h[i];
    return static_cast<double>(k_set.size()) + n_eff * n_eff * gamma_m * gamma_m * tail;
}

double deff_finetune(const ProblemInstance& inst, const IndexSet& j_set,
                     const Schedule& sched) {
    validate_schedule(sched);
    const std::vector<char> mask = j_set.mask(inst.dim());
    const double m_eff = effective_count(sched.m);
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < inst.dim(); ++i) {
        const double decay = phase_decay_product(sched.n, sched.gamma_m, inst.h[i]);
        const double p = decay * decay;
        if (mask[i]) {
            if (!(inst.g[i] > 0.0))
                throw std::invalid_argument(
                    "deff_finetune: J contains a zero source eigenvalue");
            head += p * inst.h[i] / inst.g[i];
        } else {
            tail += p * inst.h[i] * inst.g[i];
        }
    }
    return head + m_eff * m_eff * sched.gamma0 * sched.gamma0 * tail;
}

BoundEvaluator::BoundEvaluator(const ProblemInstance& inst, const Schedule& sched,
                               const MomentConstants& constants)
    : inst_(inst), sched_(sched), constants_(constants) {
    validate_schedule(sched);
    const EffectiveCounts ec = effective_counts(sched.m, sched.n);
    m_eff_ = ec.m_eff;
    n_eff_ = ec.n_eff;
    const std::size_t d = inst.dim();
    pretrain_prod_.resize(d);
    finetune_prod_.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        pretrain_prod_[i] = phase_decay_product(sched.m, sched.gamma0, inst.g[i]);
        finetune_prod_[i] = phase_decay_product(sched.n, sched.gamma_m, inst.h[i]);
        const double residual = finetune_prod_[i] * pretrain_prod_[i] * inst.w_star[i];
        leading_ += inst.h[i] * residual * residual;
    }
}

BoundEvaluator::Parts BoundEvaluator::parts(const std::vector<char>& j_mask,
                                            const std::vector<char>& k_mask) const {
    Parts out;
    const double head_weight_j = (sched_.m > 0) ? 1.0 / (m_eff_ * sched_.gamma0) : 0.0;
    const double head_weight_k =
        (sched_.n > 0 && sched_.gamma_m > 0.0) ? 1.0 / (n_eff_ * sched_.gamma_m) : kInf;
    for (std::size_t i = 0; i < inst_.dim(); ++i) {
        const double mu = inst_.g[i];
        const double lambda = inst_.h[i];
        const double w2 = inst_.w_star[i] * inst_.w_star[i];
        const double p = finetune_prod_[i] * finetune_prod_[i];
        const double q2 = pretrain_prod_[i] * pretrain_prod_[i] * w2;
        if (j_mask[i]) {
            if (!(mu > 0.0)) {
                out.valid = false;
                return out;
            }
            out.deff_ft += p * lambda / mu;
            out.norm_j += w2 * head_weight_j;
        } else {
            out.deff_ft += m_eff_ * m_eff_ * sched_.gamma0 * sched_.gamma0 * p * lambda * mu;
            out.norm_j += mu * w2;
            out.norm_g_jc += mu * w2;
        }
        if (k_mask[i]) {
            out.deff += 1.0;
            if (q2 > 0.0) out.norm_k += q2 * head_weight_k;
        } else {
            out.deff += n_eff_ * n_eff_ * sched_.gamma_m * sched_.gamma_m * lambda * lambda;
            out.norm_k += lambda * q2;
            out.norm_h_kc += lambda * q2;
        }
    }
    return out;
}

double BoundEvaluator::upper_total(const std::vector<char>& j_mask,
                                   const std::vector<char>& k_mask) const {
    const Parts pt = parts(j_mask, k_mask);
    if (!pt.valid) return kInf;
    const double term_m = (sched_.m > 0) ? pt.deff_ft / m_eff_ : 0.0;
    const double term_n = (sched_.n > 0) ? pt.deff / n_eff_ : 0.0;

    double gamma = 0.0;
    if (sched_.m > 0) gamma = std::max(gamma, sched_.gamma0);
    if (sched_.n > 0) gamma = std::max(gamma, sched_.gamma_m);
    const double var = (gamma < 1.0 / constants_.r2)
                           ? constants_.var_upper_coef * inst_.sigma2 /
                                 (1.0 - gamma * constants_.r2) * (term_m + term_n)
                           : kInf;

    double bias = leading_;
    if (sched_.m > 0)
        bias += constants_.bias_upper_coef_src * constants_.alpha * pt.norm_j * term_m;
    if (sched_.n > 0) {
        const double init = pt.norm_k + ((sched_.m > 0) ? pt.norm_j : 0.0);
        bias += constants_.bias_upper_coef_tgt * constants_.alpha * init * term_n;
    }
    return bias + var;
}

BoundReport BoundEvaluator::report() const {
    BoundReport rep;
    rep.m = sched_.m;
    rep.n = sched_.n;
    rep.gamma0 = sched_.gamma0;
    rep.gamma_m = sched_.gamma_m;
    rep.m_eff = m_eff_;
    rep.n_eff = n_eff_;
    rep.sigma2 = inst_.sigma2;
    rep.constants_used = constants_;
    rep.leading_bias = leading_;

    const IndexSetPair sets = optimal_index_sets(inst_, sched_);
    rep.j_set = sets.j_set;
    rep.k_set = sets.k_set;
    const std::vector<char> j_mask = sets.j_set.mask(inst_.dim());
    const std::vector<char> k_mask = sets.k_set.mask(inst_.dim());
    const Parts pt = parts(j_mask, k_mask);
    rep.deff = pt.deff;
    rep.deff_finetune = pt.deff_ft;

    const double term_m = (sched_.m > 0) ? pt.deff_ft / m_eff_ : 0.0;
    const double term_n = (sched_.n > 0) ? pt.deff / n_eff_ : 0.0;

    double gamma = 0.0;
    if (sched_.m > 0) gamma = std::max(gamma, sched_.gamma0);
    if (sched_.n > 0) gamma = std::max(gamma, sched_.gamma_m);
    rep.var_upper = (gamma < 1.0 / constants_.r2)
                        ? constants_.var_upper_coef * inst_.sigma2 /
                              (1.0 - gamma * constants_.r2) * (term_m + term_n)
                        : kInf;

    rep.bias_upper = leading_;
    if (sched_.m > 0)
        rep.bias_upper +=
            constants_.bias_upper_coef_src * constants_.alpha * pt.norm_j * term_m;
    if (sched_.n > 0) {
        const double init = pt.norm_k + ((sched_.m > 0) ? pt.norm_j : 0.0);
        rep.bias_upper += constants_.bias_upper_coef_tgt * constants_.alpha * init * term_n;
    }

    rep.lower_bound_valid =
        (sched_.m == 0 ||
         (sched_.gamma0 < 1.0 / inst_.g.max_eigenvalue() && m_eff_ >= 10.0)) &&
        (sched_.n == 0 ||
         (sched_.gamma_m < 1.0 / inst_.h.max_eigenvalue() && n_eff_ >= 10.0));
    if (rep.lower_bound_valid) {
        rep.var_lower = constants_.var_lower_coef * inst_.sigma2 * (term_m + term_n);
        rep.bias_lower = leading_;
        if (sched_.m > 0)
            rep.bias_lower +=
                constants_.bias_lower_coef * constants_.beta * pt.norm_g_jc * term_m;
        if (sched_.n > 0)
            rep.bias_lower +=
                constants_.bias_lower_coef * constants_.beta * pt.norm_h_kc * term_n;
    }

    // Mode-dependent signal-to-noise ratio for the unified assembly.
    double signal = 0.0;
    const NormPair norms = instance_norms(inst_, inst_.w_star);
    if (sched_.m > 0 && sched_.n > 0) {
        double carried = 0.0;
        for (std::size_t i = 0; i < inst_.dim(); ++i) {
            const double v = pretrain_prod_[i] * inst_.w_star[i];
            carried += inst_.h[i] * v * v;
        }
        signal = norms.norm_g + carried;
    } else if (sched_.m > 0) {
        signal = norms.norm_g;
    } else if (sched_.n > 0) {
        signal = norms.norm_h;
    }
    rep.snr = (inst_.sigma2 > 0.0) ? signal / inst_.sigma2 : (signal > 0.0 ? kInf : 0.0);
    return rep;
}

BoundReport risk_upper_bound(const ProblemInstance& inst, const Schedule& sched,
                             const MomentConstants& constants) {
    return make_bound_report(inst, sched, constants);
}

BoundReport risk_lower_bound(const ProblemInstance& inst, const Schedule& sched,
                             const MomentConstants& constants) {
    return make_bound_report(inst, sched, constants);
}

double unified_risk_bound(const BoundReport& report) {
    double dims = 0.0;
    if (report.m > 0) dims += report.deff_finetune / report.m_eff;
    if (report.n > 0) dims += report.deff / report.n_eff;
    return report.leading_bias + (1.0 + report.sigma2) * report.snr * dims;
}

std::string serialize_bound_report(const BoundReport& r) {
    std::string out;
    auto kv = [&out](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    kv("m", std::to_string(r.m));
    kv("n", std::to_string(r.n));
    kv("gamma0", format_double(r.gamma0));
    kv("gamma_m", format_double(r.gamma_m));
    kv("m_eff", format_double(r.m_eff));
    kv("n_eff", format_double(r.n_eff));
    kv("j_set", r.j_set.to_string());
    kv("k_set", r.k_set.to_string());
    kv("deff", format_double(r.deff));
    kv("deff_finetune", format_double(r.deff_finetune));
    kv("leading_bias", format_double(r.leading_bias));
    kv("bias_upper", format_double(r.bias_upper));
    kv("var_upper", format_double(r.var_upper));
    kv("bias_lower", format_double(r.bias_lower));
    kv("var_lower", format_double(r.var_lower));
    kv("lower_bound_valid", r.lower_bound_valid ? "1" : "0");
    kv("snr", format_double(r.snr));
    kv("sigma2", format_double(r.sigma2));
    kv("alpha", format_double(r.constants_used.alpha));
    kv("beta", format_double(r.constants_used.beta));
    kv("r2", format_double(r.constants_used.r2));
    kv("unified_bound", format_double(unified_risk_bound(r)));
    return out;
}

namespace {

// Smallest integer M with M/ln(M) >= target (counts 0, 1, 2 pass through).
double smallest_count_for_effective(double target) {
    if (!(target > 0.0)) return 0.0;
    if (std::isinf(target)) return kInf;
    for (std::int64_t m : {1, 2, 3})
        if (effective_count(m) >= target) return static_cast<double>(m);
    std::int64_t lo = 3, hi = 6;
    while (effective_count(hi) < target) {
        lo = hi;
        if (hi > (std::int64_t{1} << 50)) return kInf;
        hi *= 2;
    }
    while (lo + 1 < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (effective_count(mid) >= target)
            hi = mid;
        else
            lo = mid;
    }
    return static_cast<double>(hi);
}

// ||H_K||_G for commuting diagonal matrices: the largest lambda/mu ratio over
// K, with G's pseudo-inverse killing zero-mu coordinates. A zero-mu
// coordinate that carries target signal can never be learned from the source,
// so it forces an infinite threshold instead.
struct AlignmentNorm {
    double value = 0.0;
    bool unlearnable = false;
};

AlignmentNorm h_over_g_norm(const ProblemInstance& inst, const IndexSet& k) {
    AlignmentNorm out;
    for (std::uint32_t idx : k.members) {
        const std::size_t i = idx - 1;
        if (inst.g[i] > 0.0) {
            out.value = std::max(out.value, inst.h[i] / inst.g[i]);
        } else if (inst.h[i] * inst.w_star[i] * inst.w_star[i] > 0.0) {
            out.unlearnable = true;
        }
    }
    return out;
}

struct SupervisedQuantities {
    double n_eff_sup = 0.0;
    IndexSet k_star;
    double deff_sup = 0.0;
};

SupervisedQuantities supervised_quantities(const ProblemInstance& inst,
                                           std::int64_t n_sup, double gamma_sup) {
    if (n_sup <= 0)
        throw std::invalid_argument("sufficient_m: n_sup must be positive");
    if (!(gamma_sup > 0.0) || !(gamma_sup < 1.0 / inst.h.max_eigenvalue()))
        throw std::invalid_argument("sufficient_m: need 0 < gamma_sup < 1/||H||");
    SupervisedQuantities q;
    q.n_eff_sup = effective_count(n_sup);
    const double thresh = 1.0 / (q.n_eff_sup * gamma_sup);
    double tail = 0.0;
    for (std::size_t i = 0; i < inst.dim(); ++i) {
        if (inst.h[i] >= thresh)
            q.k_star.members.push_back(static_cast<std::uint32_t>(i + 1));
        else
            tail += inst.h[i] * inst.h[i];
    }
    const double scale = q.n_eff_sup * gamma_sup;
    q.deff_sup = static_cast<double>(q.k_star.size()) + scale * scale * tail;
    return q;
}

double threshold_from_norm(const SupervisedQuantities& q, const AlignmentNorm& norm,
                           double alpha) {
    if (norm.unlearnable) return kInf;
    if (norm.value == 0.0) return 0.0;
    const double target =
        q.n_eff_sup * q.n_eff_sup * 4.0 * norm.value / (alpha * q.deff_sup);
    return smallest_count_for_effective(target);
}

} // namespace

PretrainThreshold pretrain_sufficient_m(const ProblemInstance& inst, std::int64_t n_sup,
                                        double gamma_sup, const MomentConstants& constants) {
    const SupervisedQuantities q = supervised_quantities(inst, n_sup, gamma_sup);
    const AlignmentNorm norm = h_over_g_norm(inst, q.k_star);
    PretrainThreshold out;
    out.k_star = q.k_star;
    out.deff_sup = q.deff_sup;
    out.h_over_g_norm = norm.unlearnable ? kInf : norm.value;
    out.m_threshold = threshold_from_norm(q, norm, constants.alpha);
    return out;
}

FinetuneThreshold finetune_sufficient_m(const ProblemInstance& inst, std::int64_t n_sup,
                                        double gamma_sup, std::int64_t n_finetune,
                                        const MomentConstants& constants) {
    if (n_finetune <= 0)
        throw std::invalid_argument("finetune_sufficient_m: n_finetune must be positive");
    const SupervisedQuantities q = supervised_quantities(inst, n_sup, gamma_sup);
    FinetuneThreshold out;
    if (q.n_eff_sup > 0.0) {
        const double lower = 1.0 / (q.n_eff_sup * gamma_sup);
        const double upper = q.n_eff_sup * std::log(q.n_eff_sup) * inst.h.trace() /
                             (effective_count(n_finetune) * q.deff_sup);
        for (std::size_t i = 0; i < inst.dim(); ++i)
            if (inst.h[i] >= lower && inst.h[i] < upper)
                out.k_dagger.members.push_back(static_cast<std::uint32_t>(i + 1));
    }
    const AlignmentNorm norm = h_over_g_norm(inst, out.k_dagger);
    out.m_threshold = threshold_from_norm(q, norm, constants.alpha);
    return out;
}

} // namespace covshift
