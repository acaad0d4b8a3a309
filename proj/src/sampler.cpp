#include "covshift/sampler.hpp"

#include <cmath>

namespace covshift {

void sample_covariate(const Spectrum& spec, RngState& rng, std::vector<double>& x) {
    x.resize(spec.dim());
    for (std::size_t i = 0; i < spec.dim(); ++i)
        x[i] = std::sqrt(spec[i]) * rng.next_normal();
}

LabeledSample sample_labeled(const ProblemInstance& inst, Domain dom, RngState& rng) {
    LabeledSample s;
    s.y = sample_labeled(inst, dom, rng, s.x);
    return s;
}

double sample_labeled(const ProblemInstance& inst, Domain dom, RngState& rng,
                      std::vector<double>& x) {
    sample_covariate(domain_spectrum(inst, dom), rng, x);
    double y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) y += x[i] * inst.w_star[i];
    y += std::sqrt(inst.sigma2) * rng.next_normal();
    return y;
}

} // namespace covshift
