#include "seqcv/kernel.hpp"

#include <numbers>
#include <string>

#include "seqcv/error.hpp"
#include "seqcv/numeric.hpp"

namespace seqcv {

KernelSpec make_kernel(KernelFamily family) {
    switch (family) {
        case KernelFamily::Exponential:
            return {family, 1.0, 1.0, 1.0};
        case KernelFamily::HalfGaussian:
            // sup |x exp(-x^2/2)| is attained at x = 1.
            return {family, std::exp(-0.5), 1.0, 1.0};
    }
    throw Error(ErrorCode::Configuration, "unknown kernel family");
}

KernelSpec kernel_from_name(std::string_view name) {
    if (name == "exponential") return make_kernel(KernelFamily::Exponential);
    if (name == "half_gaussian") return make_kernel(KernelFamily::HalfGaussian);
    if (name == "epanechnikov" || name == "uniform" || name == "triangular") {
        throw Error(ErrorCode::Configuration,
                    "kernel '" + std::string(name) + "' is not strictly positive on [0, inf)");
    }
    throw Error(ErrorCode::Configuration, "unknown kernel '" + std::string(name) + "'");
}

std::string_view kernel_name(KernelFamily family) {
    return family == KernelFamily::Exponential ? "exponential" : "half_gaussian";
}

double eval_kernel(const KernelSpec& spec, double x) {
    if (!(x >= 0.0)) throw Error(ErrorCode::Domain, "kernel argument must be >= 0");
    return spec(x);
}

double kernel_integral(const KernelSpec& spec, double xi, double length) {
    if (length <= 0.0) return 0.0;
    switch (spec.family) {
        case KernelFamily::Exponential:
            return -std::expm1(-xi * length) / xi;
        case KernelFamily::HalfGaussian:
            return std::sqrt(std::numbers::pi / 2.0) / xi *
                   std::erf(xi * length / std::numbers::sqrt2);
    }
    return 0.0;
}

double kernel_sq_integral(const KernelSpec& spec, double xi, double length) {
    if (length <= 0.0) return 0.0;
    switch (spec.family) {
        case KernelFamily::Exponential:
            return -std::expm1(-2.0 * xi * length) / (2.0 * xi);
        case KernelFamily::HalfGaussian:
            return std::sqrt(std::numbers::pi) / (2.0 * xi) * std::erf(xi * length);
    }
    return 0.0;
}

void NormalizerConfig::validate() const {
    if (!(xi > 0.0)) throw Error(ErrorCode::Configuration, "xi must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::Configuration, "gamma must lie in (0,1)");
    if (T < 1) throw Error(ErrorCode::Configuration, "T must be >= 1");
}

double normalizer_discrete(const KernelSpec& spec, const NormalizerConfig& cfg, double w) {
    cfg.validate();
    if (w < cfg.gamma) throw Error(ErrorCode::Domain, "normalizer requires w >= gamma");
    const int upper = index_floor(cfg.T, w);
    const int lower = index_floor(cfg.T, cfg.gamma);
    const double h = cfg.bandwidth();
    CompensatedSum sum;
    for (int j = lower; j <= upper - 1; ++j) {
        sum.add(spec(static_cast<double>(upper - j) / h));
    }
    return sum.value() / cfg.T;
}

double normalizer_limit(const KernelSpec& spec, const NormalizerConfig& cfg, double w) {
    if (!(cfg.xi > 0.0)) throw Error(ErrorCode::Configuration, "xi must be positive");
    if (w < cfg.gamma) throw Error(ErrorCode::Domain, "normalizer requires w >= gamma");
    return kernel_integral(spec, cfg.xi, w - cfg.gamma);
}

}  // namespace seqcv
