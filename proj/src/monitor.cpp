#include "seqcv/monitor.hpp"

#include <map>

#include "seqcv/error.hpp"
#include "seqcv/numeric.hpp"
#include "seqcv/predictor.hpp"

namespace seqcv {

void MonitorConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::Configuration, "gamma must lie in (0,1)");
    if (!(s0 > gamma && s0 <= 1.0)) throw Error(ErrorCode::Configuration, "s0 must lie in (gamma, 1]");
}

StopResult run_detector(std::span<const double> Y, const KernelSpec& kernel,
                        const MonitorConfig& cfg, const Bandwidth& bandwidth) {
    cfg.validate();
    const int T = static_cast<int>(Y.size());
    if (T < 1) throw Error(ErrorCode::Configuration, "empty path");
    const int first = index_floor(T, cfg.s0);

    std::map<double, Predictor> predictors;
    auto predictor_for = [&](double xi) -> const Predictor& {
        auto it = predictors.find(xi);
        if (it == predictors.end()) {
            it = predictors.emplace(xi, Predictor(kernel, cfg.gamma, T, T / xi)).first;
        }
        return it->second;
    };

    const auto* path = std::get_if<BandwidthPath>(&bandwidth);
    if (path) {
        if (path->T != T || path->checkpoints.empty() ||
            index_floor(T, path->checkpoints.front()) > first) {
            throw Error(ErrorCode::Configuration, "bandwidth path does not cover [s0, 1]");
        }
    } else if (!(std::get<FixedXi>(bandwidth).xi > 0.0)) {
        throw Error(ErrorCode::Configuration, "xi must be positive");
    }

    StopResult result;
    result.first_index = first;
    result.trajectory.reserve(static_cast<std::size_t>(T - first + 1));
    for (int i = first; i <= T; ++i) {
        const double xi = path ? *path->xi_for_index(i) : std::get<FixedXi>(bandwidth).xi;
        const double m = predictor_for(xi)(Y, i);
        result.trajectory.push_back(m);
        const bool exceeded = cfg.direction == Direction::Upper ? m > cfg.threshold : m < cfg.threshold;
        if (exceeded && !result.signal_index) result.signal_index = i;
    }
    return result;
}

}  // namespace seqcv
