#pragma once

#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "covshift/spectrum.hpp"

namespace covshift {

// One covariate-shift regression problem: a shared optimum w*, source
// covariance G = diag(g), target covariance H = diag(h), and label noise
// variance sigma2. Both covariances live in the same fixed eigenbasis.
struct ProblemInstance {
    std::vector<double> w_star;
    Spectrum g;
    Spectrum h;
    double sigma2 = 1.0;

    std::size_t dim() const { return w_star.size(); }
};

// Fourth-moment constants for the bound formulas. Gaussian design gives
// alpha = 3, beta = 1, and r2 = 3 * max(tr G, tr H). The bound coefficients
// are exposed so tests can inject broken values as negative controls.
struct MomentConstants {
    double alpha = 3.0;
    double beta = 1.0;
    double r2 = 0.0;

    double var_upper_coef = 8.0;          // 8 / (1 - gamma*r2), times sigma2
    double var_lower_coef = 1.0 / 400.0;  // sigma2 / 400
    double bias_upper_coef_src = 24.0 * std::numbers::e;                   // 24 e
    double bias_upper_coef_tgt = 576.0 * std::numbers::e * std::numbers::e; // 576 e^2
    double bias_lower_coef = 1.0 / 1200.0;            // beta / 1200

    static MomentConstants gaussian(const ProblemInstance& inst);
};

// Validates and assembles an instance from raw parts.
ProblemInstance make_custom_instance(Spectrum g, Spectrum h,
                                     std::vector<double> w_star, double sigma2);

// The P(k) family: target eigenvalues i^{-1.5}, source eigenvalues i^{-2}
// with the top-k prefix reversed, w* = (1 x k, 1/(k+1), 1/(k+2), ...),
// sigma2 = 1. Larger k means worse source/target alignment.
ProblemInstance make_pk_instance(int k, int d);

// The two-spike example: w* = (1, 1, 0, ...), H = diag(1, sqrt(eps) x
// 2/sqrt(eps) copies), G = diag(eps^2, 1, 0, ...), sigma2 = 1. Requires
// 2 * eps^{-0.5} to be an integer; dimension is 1 + 2 * eps^{-0.5}.
ProblemInstance make_example1_instance(double eps);

struct NormPair {
    double norm_g = 0.0; // ||w||_G^2
    double norm_h = 0.0; // ||w||_H^2
};

NormPair instance_norms(const ProblemInstance& inst, const std::vector<double>& w);

// Instance file format: one `key = value` line per field, lists as
// comma-separated decimals. Values survive a write/read round trip exactly.
std::string format_instance(const ProblemInstance& inst);
ProblemInstance parse_instance(const std::string& text);
void save_instance(const ProblemInstance& inst, const std::string& path);
ProblemInstance load_instance(const std::string& path);

// Named-instance spec: "pk:K:D", "example1:EPS", or a file path.
ProblemInstance resolve_instance_spec(const std::string& spec);

// io failures map to exit code 2 in the CLI, validation failures to 1.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace covshift
