#pragma once

#include <cmath>
#include <string_view>

namespace seqcv {

/// Strictly positive kernels on [0, inf). Compactly supported kernels are not offered:
/// predictor denominators must stay bounded away from zero.
enum class KernelFamily { Exponential, HalfGaussian };

struct KernelSpec {
    KernelFamily family = KernelFamily::Exponential;
    double lipschitz_const = 1.0;
    double total_variation = 1.0;  ///< V(K) on [0, inf)
    double sup_norm = 1.0;         ///< ||K||_inf

    /// Unchecked evaluation for inner loops; x must be >= 0.
    double operator()(double x) const noexcept {
        return family == KernelFamily::Exponential ? std::exp(-x) : std::exp(-0.5 * x * x);
    }
};

KernelSpec make_kernel(KernelFamily family);

/// "exponential" | "half_gaussian". Unknown names and non-positive kernels
/// (e.g. "epanechnikov") raise a configuration error.
KernelSpec kernel_from_name(std::string_view name);
std::string_view kernel_name(KernelFamily family);

/// K(x); negative x raises a domain error.
double eval_kernel(const KernelSpec& spec, double x);

/// Integral of K(xi * t) over t in [0, length].
double kernel_integral(const KernelSpec& spec, double xi, double length);
/// Integral of K(xi * t)^2 over t in [0, length].
double kernel_sq_integral(const KernelSpec& spec, double xi, double length);

struct NormalizerConfig {
    double xi = 1.0;     ///< limit of T/h
    double gamma = 0.1;  ///< window start fraction
    int T = 1;           ///< horizon (discrete normalizer only)

    double bandwidth() const { return static_cast<double>(T) / xi; }
    void validate() const;
};

/// N_T(w) = (1/T) sum_{j=floor(T gamma)}^{floor(T w)-1} K((floor(T w) - j) / h), h = T / xi.
double normalizer_discrete(const KernelSpec& spec, const NormalizerConfig& cfg, double w);

/// N(w) = int_gamma^w K(xi (w - z)) dz, in closed form.
double normalizer_limit(const KernelSpec& spec, const NormalizerConfig& cfg, double w);

}  // namespace seqcv
