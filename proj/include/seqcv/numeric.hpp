#pragma once

#include <cmath>
#include <functional>

namespace seqcv {

/// floor(T * u), robust to representation error in u (0.29 * 100 must give 29, not 28).
inline int index_floor(int T, double u) {
    return static_cast<int>(std::floor(static_cast<double>(T) * u + 1e-9));
}

/// ceil(n * u) with the same tolerance.
inline int index_ceil(int n, double u) {
    return static_cast<int>(std::ceil(static_cast<double>(n) * u - 1e-9));
}

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Adaptive Gauss-Kronrod quadrature of f over [a, b]. Returns 0 when a >= b.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

}  // namespace seqcv
