#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "seqcv/config.hpp"

namespace seqcv {

enum class Task {
    Generate,       ///< replicate, n, x, mean, eps, Y
    FiniteTCv,      ///< replicate, s, xi, CV, L, Q, C, T_C, Q_off
    BandwidthPath,  ///< replicate, s, xi_star
    LimitB,         ///< replicate, s, value
    LimitL,         ///< replicate, s, value
    LimitQ,         ///< replicate, s, value
    LimitArgmin,    ///< replicate, s, xi
    StoppedCv,      ///< replicate, a, tau, s, phi, T_C (T_C empty below s0)
    Detector,       ///< replicate, signal_index, signaled
    StopTimes,      ///< family, a, replicate, tau, ratio
};

/// Empty cells are written as empty CSV fields and JSON nulls.
using Cell = std::variant<std::monostate, long long, double, std::string>;

struct SampleTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    int reps = 0;
    int failed_replicates = 0;
    std::vector<std::string> failures;  ///< "replicate r: message"

    std::size_t column(const std::string& name) const;
    /// Numeric values of one column, skipping empty cells.
    std::vector<double> values(const std::string& name) const;
};

/// Runs fn(r) for r = 0..reps-1 on up to `threads` workers. Each call must only
/// touch state owned by replicate r.
void for_each_replicate(int reps, int threads, const std::function<void(int)>& fn);

/// One row group per replicate, concatenated in replicate order; the result does not
/// depend on `threads`. A replicate raising an error contributes no rows and is counted.
SampleTable run_mc(const ExperimentConfig& config, Task task, int threads = 1);

void write_csv(const SampleTable& table, std::ostream& out);
void write_json(const SampleTable& table, std::ostream& out);

/// sup_x |F_x(t) - F_y(t)| by a merge scan over both sorted samples.
double ks_two_sample(std::span<const double> x, std::span<const double> y);

struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< unbiased
    double se_mean = 0.0;
};

Moments moments(std::span<const double> x);

/// Linear-interpolation quantile (order statistics at (n-1)p).
double quantile(std::span<const double> x, double p);
double iqr(std::span<const double> x);

struct ScalingFit {
    double kappa = 0.0;      ///< minus the slope of log IQR on log T
    double std_error = 0.0;    ///< OLS standard error of the slope
    double intercept = 0.0;
};

/// Needs at least three horizons with at least 200 values each.
ScalingFit scaling_fit(const std::map<int, std::vector<double>>& samples);

}  // namespace seqcv
