#include "covshift/oracle.hpp"

#include <stdexcept>

namespace covshift {

namespace {

std::vector<std::size_t> active_indices(const Spectrum& spec) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < spec.dim(); ++i)
        if (spec[i] > 0.0) idx.push_back(i);
    return idx;
}

// Shared linear map of both recursions, restricted to active coordinates.
void step_in_place(std::vector<double>& v, const Spectrum& spec,
                   const std::vector<std::size_t>& active, double gamma, double inject) {
    double coupled = 0.0;
    for (std::size_t i : active) coupled += spec[i] * v[i];
    const double g2 = gamma * gamma;
    for (std::size_t i : active) {
        const double s = spec[i];
        v[i] = (1.0 - 2.0 * gamma * s + 2.0 * g2 * s * s) * v[i] + g2 * s * coupled +
               inject * s;
    }
}

} // namespace

std::vector<double> gaussian_quartic_diag(const Spectrum& spec, const std::vector<double>& a) {
    if (a.size() != spec.dim())
        throw std::invalid_argument("gaussian_quartic_diag: dimension mismatch");
    double tr = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) tr += spec[i] * a[i];
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = 2.0 * spec[i] * spec[i] * a[i] + spec[i] * tr;
    return out;
}

std::vector<double> step_bias(const std::vector<double>& b, const Spectrum& spec, double gamma) {
    if (b.size() != spec.dim())
        throw std::invalid_argument("step_bias: dimension mismatch");
    std::vector<double> out = b;
    step_in_place(out, spec, active_indices(spec), gamma, 0.0);
    return out;
}

std::vector<double> step_variance(const std::vector<double>& c, const Spectrum& spec,
                                  double gamma, double sigma2) {
    if (c.size() != spec.dim())
        throw std::invalid_argument("step_variance: dimension mismatch");
    std::vector<double> out = c;
    step_in_place(out, spec, active_indices(spec), gamma, gamma * gamma * sigma2);
    return out;
}

DiagState initial_state(const ProblemInstance& inst) {
    DiagState st;
    st.b.resize(inst.dim());
    st.c.assign(inst.dim(), 0.0);
    for (std::size_t i = 0; i < inst.dim(); ++i)
        st.b[i] = inst.w_star[i] * inst.w_star[i];
    return st;
}

void evolve_phase(DiagState& state, const Spectrum& spec, std::int64_t length,
                  double gamma, double sigma2) {
    if (length <= 0) return;
    const std::vector<std::size_t> active = active_indices(spec);
    for (const Epoch& e : phase_epochs(length, gamma)) {
        const double inject = e.gamma * e.gamma * sigma2;
        for (std::int64_t s = 0; s < e.length; ++s) {
            step_in_place(state.b, spec, active, e.gamma, 0.0);
            step_in_place(state.c, spec, active, e.gamma, inject);
        }
    }
}

RiskSplit state_risk(const ProblemInstance& inst, const DiagState& state) {
    RiskSplit r;
    for (std::size_t i = 0; i < inst.dim(); ++i) {
        r.bias += inst.h[i] * state.b[i];
        r.variance += inst.h[i] * state.c[i];
    }
    r.bias *= 0.5;
    r.variance *= 0.5;
    return r;
}

RiskSplit expected_excess_risk(const ProblemInstance& inst, const Schedule& sched) {
    validate_schedule(sched);
    DiagState st = initial_state(inst);
    evolve_phase(st, inst.g, sched.m, sched.gamma0, inst.sigma2);
    evolve_phase(st, inst.h, sched.n, sched.gamma_m, inst.sigma2);
    return state_risk(inst, st);
}

void evolve(const ProblemInstance& inst, const Schedule& sched, DiagState& state,
            const OracleStepVisitor& visit) {
    validate_schedule(sched);
    const std::vector<std::size_t> active_g = active_indices(inst.g);
    const std::vector<std::size_t> active_h = active_indices(inst.h);
    for (std::int64_t t = 0; t < sched.m + sched.n; ++t) {
        const bool pretrain = t < sched.m;
        const double gamma = stepsize_at(sched, t);
        const Spectrum& spec = pretrain ? inst.g : inst.h;
        const std::vector<std::size_t>& active = pretrain ? active_g : active_h;
        step_in_place(state.b, spec, active, gamma, 0.0);
        step_in_place(state.c, spec, active, gamma, gamma * gamma * inst.sigma2);
        if (visit) visit(t + 1, pretrain ? 0 : 1, gamma, state);
    }
}

} // namespace covshift
