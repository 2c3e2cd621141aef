#include "seqcv/predictor.hpp"

#include <algorithm>
#include <string>

#include "seqcv/error.hpp"
#include "seqcv/numeric.hpp"

namespace seqcv {

Predictor::Predictor(const KernelSpec& kernel, double gamma, int T, double h)
    : T_(T), h_(h), window_start_(std::max(1, index_floor(T, gamma))) {
    if (T < 1) throw Error(ErrorCode::Configuration, "T must be >= 1");
    if (!(h > 0.0)) throw Error(ErrorCode::Configuration, "bandwidth must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::Configuration, "gamma must lie in (0,1)");
    weights_.resize(static_cast<std::size_t>(T) + 1);
    for (int k = 0; k <= T; ++k) weights_[static_cast<std::size_t>(k)] = kernel(k / h);
}

Predictor::Terms Predictor::terms(std::span<const double> Y, int i) const {
    if (i - 1 < window_start_) {
        throw Error(ErrorCode::Window, "empty prediction window at i = " + std::to_string(i));
    }
    if (i > T_ + 1 || static_cast<std::size_t>(i - 1) > Y.size()) {
        throw Error(ErrorCode::Index, "prediction index " + std::to_string(i) + " beyond the data");
    }
    // Centering at Y_{i-1} keeps constant inputs exact and limits cancellation.
    const double anchor = Y[static_cast<std::size_t>(i - 2)];
    CompensatedSum num;
    CompensatedSum den;
    CompensatedSum diag;
    for (int j = window_start_; j <= i - 1; ++j) {
        const double w = weights_[static_cast<std::size_t>(i - j)];
        const double y = Y[static_cast<std::size_t>(j - 1)];
        num.add(w * (y - anchor));
        den.add(w);
        diag.add(w * w * y * y);
    }
    const double d = den.value();
    return {anchor + num.value() / d, diag.value() / (d * d)};
}

double predict(std::span<const double> Y, const KernelSpec& kernel, const PredictorConfig& cfg,
               int i) {
    return Predictor(kernel, cfg.gamma, cfg.T, cfg.h)(Y, i);
}

}  // namespace seqcv
