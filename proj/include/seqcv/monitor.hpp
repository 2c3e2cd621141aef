#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "seqcv/crossval.hpp"
#include "seqcv/kernel.hpp"

namespace seqcv {

enum class Direction { Upper, Lower };

struct MonitorConfig {
    double gamma = 0.1;
    double s0 = 0.2;       ///< monitoring starts at floor(s0 T)
    double threshold = 0.0;
    Direction direction = Direction::Upper;

    void validate() const;
};

struct FixedXi {
    double xi = 10.0;
};

using Bandwidth = std::variant<FixedXi, BandwidthPath>;

struct StopResult {
    std::optional<int> signal_index;  ///< empty for a censored run
    int first_index = 0;              ///< floor(s0 T)
    std::vector<double> trajectory;   ///< predictions for i = first_index..T

    bool signaled() const noexcept { return signal_index.has_value(); }
};

/// First-exit detector: first i in [floor(s0 T), T] with m_{-i} > c (Upper) or < c (Lower).
/// Equality does not signal. With a BandwidthPath the bandwidth in force at i is used.
StopResult run_detector(std::span<const double> Y, const KernelSpec& kernel,
                        const MonitorConfig& cfg, const Bandwidth& bandwidth);

}  // namespace seqcv
