#pragma once

#include <cstdint>
#include <vector>

#include "seqcv/change_model.hpp"

namespace seqcv {

enum class NoiseKind { IID, GARCH, MA };
enum class Innovation { Gaussian, StudentT };

/// sigma_t^2 = alpha0 + sum_j alpha_j eps_{t-j}^2 + sum_j beta_j sigma_{t-j}^2.
struct GarchParams {
    double alpha0 = 1.0;
    std::vector<double> alpha;
    std::vector<double> beta;

    double persistence() const;
    double unconditional_variance() const;
};

struct ErrorConfig {
    NoiseKind kind = NoiseKind::IID;
    Innovation innovation = Innovation::Gaussian;
    double df = 10.0;     ///< Student-t degrees of freedom, must exceed 8
    double sigma = 1.0;   ///< scale for IID and MA; 0 gives a degenerate zero process
    GarchParams garch;
    std::vector<double> ma;  ///< eps_t = sigma (z_t + sum_k ma_k z_{t-k})
    int burn_in = 1000;

    void validate() const;
    /// MA errors are serially correlated and fall outside the martingale-difference setting.
    bool martingale_difference() const { return kind != NoiseKind::MA; }
};

/// eps_1..eps_T after discarding burn_in values; a pure function of (cfg, T, seed, replicate).
std::vector<double> gen_errors(const ErrorConfig& cfg, int T, std::uint64_t seed,
                               std::uint64_t replicate);

struct SamplePath {
    std::vector<double> Y;
    std::vector<double> eps;
    std::vector<double> mean;  ///< mean_at(model, n), so Y[n-1] = mean[n-1] + eps[n-1]
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    bool martingale_difference = true;

    int T() const { return static_cast<int>(Y.size()); }
};

SamplePath gen_path(const ChangeModel& model, const ErrorConfig& cfg, std::uint64_t seed,
                    std::uint64_t replicate);

}  // namespace seqcv
