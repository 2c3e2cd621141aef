#include "seqcv/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seqcv/error.hpp"
#include "seqcv/numeric.hpp"
#include "seqcv/predictor.hpp"

namespace seqcv {
namespace {

void check_xi_grid(std::span<const double> xi_grid) {
    if (xi_grid.empty()) throw Error(ErrorCode::Configuration, "xi grid is empty");
    for (double xi : xi_grid) {
        if (!(xi > 0.0)) throw Error(ErrorCode::Configuration, "xi values must be positive");
    }
}

void check_data_length(std::span<const double> Y, int last_index) {
    if (static_cast<std::size_t>(last_index) > Y.size()) {
        throw Error(ErrorCode::Index, "data shorter than index " + std::to_string(last_index));
    }
}

}  // namespace

void CvConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::Configuration, "gamma must lie in (0,1)");
    if (!(s0 > gamma && s0 <= 1.0)) throw Error(ErrorCode::Configuration, "s0 must lie in (gamma, 1]");
    if (T < 1) throw Error(ErrorCode::Configuration, "T must be >= 1");
    if (first_index() - 1 < std::max(1, index_floor(T, gamma))) {
        throw Error(ErrorCode::Window, "floor(T s0) leaves an empty prediction window");
    }
}

int CvConfig::first_index() const { return index_floor(T, s0); }

double cv_criterion(std::span<const double> Y, const KernelSpec& kernel, const CvConfig& cfg,
                    double s, double xi) {
    cfg.validate();
    if (s < cfg.s0 || s > 1.0) throw Error(ErrorCode::Domain, "s must lie in [s0, 1]");
    if (!(xi > 0.0)) throw Error(ErrorCode::Configuration, "xi must be positive");
    const int last = index_floor(cfg.T, s);
    check_data_length(Y, last);
    const Predictor predictor(kernel, cfg.gamma, cfg.T, cfg.T / xi);
    CompensatedSum sum;
    for (int i = cfg.first_index(); i <= last; ++i) {
        const double r = Y[static_cast<std::size_t>(i - 1)] - predictor(Y, i);
        sum.add(r * r);
    }
    return sum.value() / cfg.T;
}

CvEvaluation decompose(std::span<const double> Y, const KernelSpec& kernel, const CvConfig& cfg,
                       std::span<const double> s_grid, std::span<const double> xi_grid) {
    cfg.validate();
    check_xi_grid(xi_grid);
    if (s_grid.empty()) throw Error(ErrorCode::Configuration, "s grid is empty");
    std::vector<int> stop(s_grid.size());
    for (std::size_t r = 0; r < s_grid.size(); ++r) {
        if (s_grid[r] < cfg.s0 || s_grid[r] > 1.0) throw Error(ErrorCode::Domain, "s must lie in [s0, 1]");
        if (r > 0 && s_grid[r] < s_grid[r - 1]) {
            throw Error(ErrorCode::Configuration, "s grid must be nondecreasing");
        }
        stop[r] = index_floor(cfg.T, s_grid[r]);
    }
    const int first = cfg.first_index();
    const int last = stop.back();
    check_data_length(Y, last);

    CvEvaluation out;
    out.s_grid.assign(s_grid.begin(), s_grid.end());
    out.xi_grid.assign(xi_grid.begin(), xi_grid.end());
    out.T = cfg.T;
    const std::size_t S = s_grid.size();
    const std::size_t M = xi_grid.size();
    out.CV = Grid2(S, M);
    out.L = Grid2(S, M);
    out.Q = Grid2(S, M);
    out.Q_off = Grid2(S, M);
    out.C = Grid2(S, M);
    out.sum_y2.assign(S, 0.0);

    const double inv_T = 1.0 / cfg.T;
    {
        CompensatedSum y2;
        std::size_t r = 0;
        for (int i = first; i <= last; ++i) {
            const double y = Y[static_cast<std::size_t>(i - 1)];
            y2.add(y * y);
            for (; r < S && stop[r] == i; ++r) out.sum_y2[r] = y2.value() * inv_T;
        }
    }

    for (std::size_t c = 0; c < M; ++c) {
        const Predictor predictor(kernel, cfg.gamma, cfg.T, cfg.T / xi_grid[c]);
        CompensatedSum cv, cross, square, square_off;
        std::size_t r = 0;
        for (int i = first; i <= last; ++i) {
            const double y = Y[static_cast<std::size_t>(i - 1)];
            const auto t = predictor.terms(Y, i);
            const double m = t.prediction;
            cv.add((y - m) * (y - m));
            cross.add(y * m);
            square.add(m * m);
            square_off.add(m * m - t.diagonal);
            for (; r < S && stop[r] == i; ++r) {
                out.CV(r, c) = cv.value() * inv_T;
                out.L(r, c) = -2.0 * cross.value() * inv_T;
                out.Q(r, c) = square.value() * inv_T;
                out.Q_off(r, c) = square_off.value() * inv_T;
                out.C(r, c) = out.L(r, c) + out.Q(r, c);
            }
        }
    }
    return out;
}

double argmin_grid(std::span<const double> values, std::span<const double> xi_grid,
                   double rel_tie_tol) {
    if (values.empty() || values.size() != xi_grid.size()) {
        throw Error(ErrorCode::Configuration, "argmin needs one value per grid point");
    }
    double lo = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(ErrorCode::Evaluation, "non-finite objective value");
        lo = std::min(lo, v);
        scale = std::max(scale, std::abs(v));
    }
    const double cutoff = lo + rel_tie_tol * scale;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] <= cutoff) best = std::min(best, xi_grid[k]);
    }
    return best;
}

std::optional<double> BandwidthPath::xi_for_index(int i) const {
    std::optional<double> xi;
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        if (index_floor(T, checkpoints[k]) <= i) xi = xi_star[k];
    }
    return xi;
}

std::optional<double> BandwidthPath::xi_at(double s) const {
    std::optional<double> xi;
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        if (checkpoints[k] <= s) xi = xi_star[k];
    }
    return xi;
}

std::optional<double> BandwidthPath::h_at(double s) const {
    const auto xi = xi_at(s);
    if (!xi) return std::nullopt;
    return T / *xi;
}

BandwidthPath bandwidth_path(std::span<const double> Y, const KernelSpec& kernel,
                             const CvConfig& cfg, std::span<const double> checkpoints,
                             std::span<const double> xi_grid) {
    if (checkpoints.empty()) throw Error(ErrorCode::Configuration, "no checkpoints");
    for (std::size_t k = 1; k < checkpoints.size(); ++k) {
        if (!(checkpoints[k] > checkpoints[k - 1])) {
            throw Error(ErrorCode::Configuration, "checkpoints must be strictly increasing");
        }
    }
    const auto eval = decompose(Y, kernel, cfg, checkpoints, xi_grid);
    BandwidthPath path;
    path.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    path.T = cfg.T;
    std::vector<double> row(xi_grid.size());
    for (std::size_t r = 0; r < checkpoints.size(); ++r) {
        for (std::size_t c = 0; c < xi_grid.size(); ++c) row[c] = eval.C(r, c);
        path.xi_star.push_back(argmin_grid(row, xi_grid));
    }
    return path;
}

}  // namespace seqcv
