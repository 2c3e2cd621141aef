#pragma once

#include <span>
#include <vector>

#include "seqcv/kernel.hpp"

namespace seqcv {

/// One-sided kernel prediction smoother
///   m_{h,-i} = sum_{j=j0}^{i-1} K((i-j)/h) Y_j / sum_{j=j0}^{i-1} K((i-j)/h),
/// j0 = max(1, floor(T gamma)). Only Y_1..Y_{i-1} are read. Indices are 1-based;
/// Y[0] holds Y_1. Kernel weights K(k/h), k = 0..T, are tabulated once.
class Predictor {
public:
    Predictor(const KernelSpec& kernel, double gamma, int T, double h);

    struct Terms {
        double prediction = 0.0;
        /// sum_j K^2 Y_j^2 / (sum_j K)^2, the j == k part of the squared prediction.
        double diagonal = 0.0;
    };

    double operator()(std::span<const double> Y, int i) const { return terms(Y, i).prediction; }
    Terms terms(std::span<const double> Y, int i) const;

    int window_start() const noexcept { return window_start_; }
    int horizon() const noexcept { return T_; }
    double bandwidth() const noexcept { return h_; }

private:
    int T_;
    double h_;
    int window_start_;
    std::vector<double> weights_;
};

struct PredictorConfig {
    double gamma = 0.1;
    int T = 1;
    double h = 1.0;
};

/// m_{h,-i}; i <= floor(T gamma) (empty window) raises a window error.
double predict(std::span<const double> Y, const KernelSpec& kernel, const PredictorConfig& cfg,
               int i);

}  // namespace seqcv
