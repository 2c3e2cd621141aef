#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqcv/anscombe.hpp"
#include "seqcv/change_model.hpp"
#include "seqcv/error_process.hpp"
#include "seqcv/kernel.hpp"
#include "seqcv/limits.hpp"
#include "seqcv/monitor.hpp"

namespace seqcv {

struct MonitorSection {
    MonitorConfig cfg;
    double xi = 10.0;
    bool cv_bandwidth = false;  ///< use the cross-validated bandwidth path instead of xi
};

struct CvSection {
    std::vector<double> xi_grid{5.0, 10.0, 20.0};
    std::vector<double> s_grid{0.5, 0.75, 1.0};
    std::vector<double> checkpoints;
};

enum class LimitQuantity { B, L, Q, Argmin };

struct LimitSection {
    LimitGridConfig grid;  ///< delta, gamma and s0 are copied from [model] and [monitor]
    std::vector<double> s_points{0.5, 0.75, 1.0};
    std::vector<double> xi_grid{5.0, 10.0, 20.0};
    LimitQuantity what = LimitQuantity::L;
};

struct AnscombeSection {
    StopFamily family;
    std::vector<double> a_values{100.0, 1000.0};
};

struct RunSection {
    int reps = 100;
    std::uint64_t seed = 1;
    std::string out;
    int threads = 1;
};

struct ExperimentConfig {
    ChangeModel model;
    ErrorConfig errors;
    KernelSpec kernel = make_kernel(KernelFamily::Exponential);
    MonitorSection monitor;
    CvSection cv;
    LimitSection limit;
    AnscombeSection anscombe;
    RunSection run;

    double gamma() const { return monitor.cfg.gamma; }
    double s0() const { return monitor.cfg.s0; }
    /// Cross-section consistency: gamma < s0, grids inside [s0, 1], positive xi values.
    void validate() const;
};

/// Parses INI text; unknown sections or keys raise a configuration error.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// "a, b, c" -> {a, b, c}.
std::vector<double> parse_list(const std::string& text);

/// Segments separated by ';', each "start kind params":
///   constant c | linear slope intercept | tabulated x:y x:y ...
PiecewiseFn parse_piecewise(const std::string& text);

LimitQuantity limit_quantity_from_name(const std::string& name);

}  // namespace seqcv
