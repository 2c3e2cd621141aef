#pragma once

#include <optional>
#include <span>
#include <vector>

#include "seqcv/kernel.hpp"

namespace seqcv {

/// gamma: window start, s0: first monitored/evaluated fraction, T: horizon (h = T / xi).
/// T is independent of the data length so a horizon-T process can be read on a prefix.
struct CvConfig {
    double gamma = 0.1;
    double s0 = 0.2;
    int T = 100;

    void validate() const;
    int first_index() const;  ///< floor(T s0)
};

/// Row-major (s, xi) table.
struct Grid2 {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Grid2() = default;
    Grid2(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct CvEvaluation {
    std::vector<double> s_grid;
    std::vector<double> xi_grid;
    int T = 0;
    std::vector<double> sum_y2;  ///< (1/T) sum_{i=floor(T s0)}^{floor(T s)} Y_i^2, per s
    Grid2 CV;     ///< (1/T) sum (Y_i - m_{-i})^2, accumulated directly
    Grid2 L;      ///< -(2/T) sum Y_i m_{-i}
    Grid2 Q;      ///< (1/T) sum m_{-i}^2
    Grid2 Q_off;  ///< Q without the j == k terms of each squared prediction
    Grid2 C;      ///< L + Q

    double scaled_C(std::size_t r, std::size_t c) const { return T * C(r, c); }
};

/// CV_s(T/xi) by direct summation.
double cv_criterion(std::span<const double> Y, const KernelSpec& kernel, const CvConfig& cfg,
                    double s, double xi);

/// All CV/L/Q/C values on s_grid x xi_grid. s_grid must be nondecreasing inside [s0, 1];
/// each xi column is filled by one forward scan over i.
CvEvaluation decompose(std::span<const double> Y, const KernelSpec& kernel, const CvConfig& cfg,
                       std::span<const double> s_grid, std::span<const double> xi_grid);

/// Smallest xi attaining the minimum. Values within rel_tie_tol * max|value| of the
/// minimum count as ties; the default 0 demands exact equality.
double argmin_grid(std::span<const double> values, std::span<const double> xi_grid,
                   double rel_tie_tol = 0.0);

/// Step-function bandwidth h*(s) = T / xi*(s_k) on [s_k, s_{k+1}).
struct BandwidthPath {
    std::vector<double> checkpoints;
    std::vector<double> xi_star;
    int T = 0;

    /// xi in force at time index i: the last checkpoint with floor(T s_k) <= i.
    std::optional<double> xi_for_index(int i) const;
    std::optional<double> xi_at(double s) const;
    std::optional<double> h_at(double s) const;
};

/// xi*(s_k) = argmin over xi_grid of C_{T,s_k}(T/xi), each using Y_1..Y_{floor(T s_k)} only.
BandwidthPath bandwidth_path(std::span<const double> Y, const KernelSpec& kernel,
                             const CvConfig& cfg, std::span<const double> checkpoints,
                             std::span<const double> xi_grid);

}  // namespace seqcv
