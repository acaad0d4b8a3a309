#pragma once

#include <vector>

#include "covshift/instance.hpp"
#include "covshift/rng.hpp"
#include "covshift/spectrum.hpp"

namespace covshift {

// Which marginal the covariates are drawn from. Labels follow the shared
// conditional y = <x, w*> + noise in both cases.
enum class Domain { Source, Target };

inline const Spectrum& domain_spectrum(const ProblemInstance& inst, Domain dom) {
    return dom == Domain::Source ? inst.g : inst.h;
}

// x_i = sqrt(spec_i) * z_i with independent standard normal z_i.
// Draws exactly spec.dim() normals from rng.
void sample_covariate(const Spectrum& spec, RngState& rng, std::vector<double>& x);

struct LabeledSample {
    std::vector<double> x;
    double y = 0.0;
};

// Draws x from the domain's covariance, then y = <x, w*> + eps with
// eps ~ N(0, sigma2) independent of x. One extra normal per call.
LabeledSample sample_labeled(const ProblemInstance& inst, Domain dom, RngState& rng);

// In-place variant for hot loops.
double sample_labeled(const ProblemInstance& inst, Domain dom, RngState& rng,
                      std::vector<double>& x);

} // namespace covshift
