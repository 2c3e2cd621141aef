#include "seqcv/limits.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "seqcv/crossval.hpp"
#include "seqcv/error.hpp"
#include "seqcv/numeric.hpp"
#include "seqcv/rng.hpp"

namespace seqcv {

void LimitGridConfig::validate() const {
    if (grid_points < 100) throw Error(ErrorCode::Configuration, "grid_points must be >= 100");
    if (!(sigma >= 0.0)) throw Error(ErrorCode::Configuration, "sigma must be >= 0");
    if (!(xi > 0.0)) throw Error(ErrorCode::Configuration, "xi must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::Configuration, "gamma must lie in (0,1)");
    if (!(s0 > gamma && s0 <= 1.0)) throw Error(ErrorCode::Configuration, "s0 must lie in (gamma, 1]");
    for (double b : delta.breakpoints()) {
        const double scaled = b * grid_points;
        if (std::abs(scaled - std::round(scaled)) > 1e-7) {
            throw Error(ErrorCode::Configuration,
                        "delta breakpoint " + std::to_string(b) + " is not a grid node");
        }
    }
}

int LimitGridConfig::gamma_node() const {
    return lower_limits == LowerLimits::Zero ? 0 : index_ceil(grid_points, gamma);
}

int LimitGridConfig::start_node() const { return index_ceil(grid_points, s0); }

std::vector<double> simulate_B(const LimitGridConfig& cfg, std::uint64_t seed,
                               std::uint64_t replicate) {
    cfg.validate();
    const int n = cfg.grid_points;
    const double sd = std::sqrt(cfg.step());
    Rng rng = make_rng(seed, replicate, StreamTag::Limit);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> B(static_cast<std::size_t>(n) + 1);
    double W = 0.0;
    B[0] = 0.0;
    for (int k = 1; k <= n; ++k) {
        W += sd * normal(rng);
        const double u = static_cast<double>(k) / n;
        B[static_cast<std::size_t>(k)] = delta_integral(cfg.delta, u) + cfg.sigma * W;
    }
    return B;
}

std::vector<double> limit_increments(const LimitGridConfig& cfg, std::uint64_t seed,
                                     std::uint64_t replicate) {
    const auto B = simulate_B(cfg, seed, replicate);
    std::vector<double> dB(B.size() - 1);
    for (std::size_t k = 0; k < dB.size(); ++k) dB[k] = B[k + 1] - B[k];
    return dB;
}

std::vector<double> limit_L_from_increments(const KernelSpec& kernel, const LimitGridConfig& cfg,
                                            double xi, std::span<const double> dB) {
    cfg.validate();
    const int n = cfg.grid_points;
    if (dB.size() != static_cast<std::size_t>(n)) {
        throw Error(ErrorCode::Configuration, "increment count must equal grid_points");
    }
    const int g0 = cfg.gamma_node();
    const int start = cfg.start_node();
    if (start <= g0) throw Error(ErrorCode::Domain, "normalizer evaluated at or below gamma");
    // The outer sum begins at the first node whose inner window is nonempty.
    const int outer = cfg.lower_limits == LowerLimits::Zero ? g0 + 1 : start;

    std::vector<double> w(static_cast<std::size_t>(n) + 1);
    for (int lag = 0; lag <= n; ++lag) w[static_cast<std::size_t>(lag)] = kernel(xi * lag / n);
    std::vector<double> den(static_cast<std::size_t>(n) + 1, 0.0);
    for (int lag = 1; lag <= n; ++lag) {
        den[static_cast<std::size_t>(lag)] = den[static_cast<std::size_t>(lag - 1)] + w[static_cast<std::size_t>(lag)];
    }

    std::vector<double> L(static_cast<std::size_t>(n - start + 1), 0.0);
    double acc = 0.0;
    for (int k = outer; k < n; ++k) {
        // Inner sum over l in [g0, k-1]; four partial sums break the dependency chain.
        double p0 = 0.0, p1 = 0.0, p2 = 0.0, p3 = 0.0;
        int l = g0;
        for (; l + 3 <= k - 1; l += 4) {
            p0 += w[static_cast<std::size_t>(k - l)] * dB[static_cast<std::size_t>(l)];
            p1 += w[static_cast<std::size_t>(k - l - 1)] * dB[static_cast<std::size_t>(l + 1)];
            p2 += w[static_cast<std::size_t>(k - l - 2)] * dB[static_cast<std::size_t>(l + 2)];
            p3 += w[static_cast<std::size_t>(k - l - 3)] * dB[static_cast<std::size_t>(l + 3)];
        }
        for (; l <= k - 1; ++l) p0 += w[static_cast<std::size_t>(k - l)] * dB[static_cast<std::size_t>(l)];
        const double numer = (p0 + p1) + (p2 + p3);
        const double inner = numer / (den[static_cast<std::size_t>(k - g0)] * cfg.step());
        acc -= 2.0 * inner * dB[static_cast<std::size_t>(k)];
        if (k + 1 >= start) L[static_cast<std::size_t>(k + 1 - start)] = acc;
    }
    return L;
}

double LimitPath::L_at(double s) const {
    const int n = static_cast<int>(nodes.size()) - 1;
    const int m = index_floor(n, s);
    if (m < first_node || m > n) throw Error(ErrorCode::Domain, "L is reported on [s0, 1] only");
    return L[static_cast<std::size_t>(m - first_node)];
}

LimitPath simulate_L(const KernelSpec& kernel, const LimitGridConfig& cfg, std::uint64_t seed,
                     std::uint64_t replicate) {
    LimitPath path;
    path.B = simulate_B(cfg, seed, replicate);
    std::vector<double> dB(path.B.size() - 1);
    for (std::size_t k = 0; k < dB.size(); ++k) dB[k] = path.B[k + 1] - path.B[k];
    path.L = limit_L_from_increments(kernel, cfg, cfg.xi, dB);
    path.first_node = cfg.start_node();
    path.nodes.resize(path.B.size());
    for (std::size_t k = 0; k < path.nodes.size(); ++k) {
        path.nodes[k] = static_cast<double>(k) / cfg.grid_points;
    }
    path.seed = seed;
    path.replicate = replicate;
    return path;
}

double variance_oracle(const KernelSpec& kernel, const LimitGridConfig& cfg) {
    cfg.validate();
    if (!cfg.delta.is_zero()) throw Error(ErrorCode::Unsupported, "variance oracle requires delta == 0");
    if (cfg.lower_limits == LowerLimits::Zero) {
        throw Error(ErrorCode::Unsupported, "variance diverges with lower limits at 0");
    }
    if (cfg.sigma == 0.0) return 0.0;
    const double xi = cfg.xi;
    const double gamma = cfg.gamma;
    const NormalizerConfig ncfg{xi, gamma, 1};
    auto outer = [&](double u) {
        auto k2 = [&](double v) {
            const double k = kernel(xi * (u - v));
            return k * k;
        };
        const double numer = integrate(k2, gamma, u, 1e-11);
        const double N = normalizer_limit(kernel, ncfg, u);
        return numer / (N * N);
    };
    const double s4 = cfg.sigma * cfg.sigma * cfg.sigma * cfg.sigma;
    return 4.0 * s4 * integrate(outer, cfg.s0, 1.0, 1e-10);
}

QLimitSimulator::QLimitSimulator(const KernelSpec& kernel, const LimitGridConfig& cfg,
                                 std::span<const double> s_points)
    : cfg_(cfg), s_points_(s_points.begin(), s_points.end()) {
    cfg_.validate();
    if (s_points_.empty()) throw Error(ErrorCode::Configuration, "no evaluation points");
    for (std::size_t i = 0; i < s_points_.size(); ++i) {
        if (s_points_[i] < cfg_.s0 || s_points_[i] > 1.0) {
            throw Error(ErrorCode::Domain, "evaluation points must lie in [s0, 1]");
        }
        if (i > 0 && !(s_points_[i] > s_points_[i - 1])) {
            throw Error(ErrorCode::Configuration, "evaluation points must be strictly increasing");
        }
    }
    const int n = cfg_.grid_points;
    base_ = cfg_.gamma_node();
    const int start = cfg_.start_node();
    for (double s : s_points_) end_nodes_.push_back(index_floor(n, s));
    if (end_nodes_.front() - base_ < 10) {
        throw Error(ErrorCode::Configuration, "fewer than 10 grid nodes in [gamma, s_1]");
    }

    // Fine w-grid at 4x resolution: w_j = j / (4n).
    constexpr int kOver = 4;
    const int fine_n = kOver * n;
    const int m_max = end_nodes_.back();
    const int j_lo = kOver * start;
    const int j_hi = kOver * m_max;
    const double xi = cfg_.xi;
    const NormalizerConfig ncfg{xi, cfg_.gamma, 1};

    std::vector<double> inv_n2(static_cast<std::size_t>(j_hi - j_lo + 1));
    for (int j = j_lo; j <= j_hi; ++j) {
        const double N = normalizer_limit(kernel, ncfg, static_cast<double>(j) / fine_n);
        inv_n2[static_cast<std::size_t>(j - j_lo)] = 1.0 / (N * N);
    }
    // kern[k][j - j_lo] = K(xi (w_j - u_k)) for w_j >= u_k, else 0.
    const int P = m_max - base_;
    std::vector<std::vector<double>> kern(static_cast<std::size_t>(P));
    for (int a = 0; a < P; ++a) {
        const int k = base_ + a;
        auto& row = kern[static_cast<std::size_t>(a)];
        row.assign(static_cast<std::size_t>(j_hi - j_lo + 1), 0.0);
        for (int j = std::max(j_lo, kOver * k); j <= j_hi; ++j) {
            const double gap = static_cast<double>(j) / fine_n - static_cast<double>(k) / n;
            row[static_cast<std::size_t>(j - j_lo)] = kernel(xi * std::max(gap, 0.0));
        }
    }

    const double dw = 1.0 / fine_n;
    for (int m : end_nodes_) {
        const int Pm = m - base_;
        std::vector<double> table(static_cast<std::size_t>(Pm) * (Pm + 1) / 2, 0.0);
        std::size_t idx = 0;
        for (int a = 0; a < Pm; ++a) {
            const auto& ra = kern[static_cast<std::size_t>(a)];
            for (int b = a; b < Pm; ++b, ++idx) {
                const auto& rb = kern[static_cast<std::size_t>(b)];
                const int lo = kOver * std::max(base_ + b, start);
                const int hi = kOver * m;
                if (lo >= hi) continue;
                double sum = 0.0;
                for (int j = lo; j <= hi; ++j) {
                    const auto o = static_cast<std::size_t>(j - j_lo);
                    const double f = ra[o] * rb[o] * inv_n2[o];
                    sum += (j == lo || j == hi) ? 0.5 * f : f;
                }
                table[idx] = sum * dw;
            }
        }
        tables_.push_back(std::move(table));
    }
}

double QLimitSimulator::g(std::size_t i, int k, int l) const {
    const int Pm = end_nodes_.at(i) - base_;
    int a = k - base_;
    int b = l - base_;
    if (a > b) std::swap(a, b);
    if (a < 0 || b >= Pm) return 0.0;
    const std::size_t idx = static_cast<std::size_t>(a) * Pm - static_cast<std::size_t>(a) * (a - 1) / 2 +
                            static_cast<std::size_t>(b - a);
    return tables_[i][idx];
}

std::vector<double> QLimitSimulator::operator()(std::span<const double> dB) const {
    if (dB.size() != static_cast<std::size_t>(cfg_.grid_points)) {
        throw Error(ErrorCode::Configuration, "increment count must equal grid_points");
    }
    std::vector<double> out;
    out.reserve(tables_.size());
    for (std::size_t i = 0; i < tables_.size(); ++i) {
        const int Pm = end_nodes_[i] - base_;
        const auto& table = tables_[i];
        std::size_t idx = 0;
        double total = 0.0;
        for (int a = 0; a < Pm; ++a) {
            const double da = dB[static_cast<std::size_t>(base_ + a)];
            ++idx;  // skip the diagonal (a, a)
            double row = 0.0;
            for (int b = a + 1; b < Pm; ++b, ++idx) {
                row += table[idx] * dB[static_cast<std::size_t>(base_ + b)];
            }
            total += da * row;
        }
        out.push_back(2.0 * total);
    }
    return out;
}

std::vector<double> QLimitSimulator::sample(std::uint64_t seed, std::uint64_t replicate) const {
    return (*this)(limit_increments(cfg_, seed, replicate));
}

std::vector<double> simulate_Q_limit(const KernelSpec& kernel, const LimitGridConfig& cfg,
                                     std::span<const double> s_points, std::uint64_t seed,
                                     std::uint64_t replicate) {
    return QLimitSimulator(kernel, cfg, s_points).sample(seed, replicate);
}

double argmin_limit(const KernelSpec& kernel, const LimitGridConfig& cfg,
                    std::span<const double> xi_grid, std::uint64_t seed, std::uint64_t replicate,
                    double s) {
    if (xi_grid.empty()) throw Error(ErrorCode::Configuration, "xi grid is empty");
    const auto dB = limit_increments(cfg, seed, replicate);
    const int m = index_floor(cfg.grid_points, s);
    const int start = cfg.start_node();
    if (m < start || m > cfg.grid_points) throw Error(ErrorCode::Domain, "s must lie in [s0, 1]");
    std::vector<double> values;
    values.reserve(xi_grid.size());
    for (double xi : xi_grid) {
        if (!(xi > 0.0)) throw Error(ErrorCode::Configuration, "xi values must be positive");
        const auto L = limit_L_from_increments(kernel, cfg, xi, dB);
        values.push_back(L[static_cast<std::size_t>(m - start)]);
    }
    return argmin_grid(values, xi_grid, 1e-9);
}

}  // namespace seqcv
