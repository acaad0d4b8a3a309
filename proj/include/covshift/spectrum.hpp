#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace covshift {

// Eigenvalues of a covariance matrix that is diagonal in the shared fixed
// basis. Entries are indexed from 1 in the math and from 0 in code.
class Spectrum {
public:
    Spectrum() = default;

    explicit Spectrum(std::vector<double> eigenvalues)
        : eig_(std::move(eigenvalues)) {
        for (double v : eig_) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("Spectrum: eigenvalues must be finite and >= 0");
        }
    }

    std::size_t dim() const { return eig_.size(); }
    double operator[](std::size_t i) const { return eig_[i]; }
    const std::vector<double>& values() const { return eig_; }

    double trace() const {
        double s = 0.0;
        for (double v : eig_) s += v;
        return s;
    }

    double max_eigenvalue() const {
        double m = 0.0;
        for (double v : eig_) m = std::max(m, v);
        return m;
    }

private:
    std::vector<double> eig_;
};

} // namespace covshift
