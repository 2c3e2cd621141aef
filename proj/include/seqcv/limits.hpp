#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seqcv/change_model.hpp"
#include "seqcv/kernel.hpp"

namespace seqcv {

/// Lower integration limits of the limit process.
/// WindowStart: inner integrals from gamma, outer from s0 (the finite-T construction).
/// Zero: both from 0.
enum class LowerLimits { WindowStart, Zero };

/// Uniform partition u_k = k / grid_points of [0, 1].
struct LimitGridConfig {
    int grid_points = 1000;
    double sigma = 1.0;
    PiecewiseFn delta;
    double xi = 10.0;
    double gamma = 0.1;
    double s0 = 0.2;
    LowerLimits lower_limits = LowerLimits::WindowStart;

    void validate() const;
    double step() const { return 1.0 / grid_points; }
    int gamma_node() const;  ///< first node of the inner integrals
    int start_node() const;  ///< first node >= s0
};

/// Increments dB_k = B(u_{k+1}) - B(u_k), k = 0..n-1, of B = int delta + sigma W.
std::vector<double> limit_increments(const LimitGridConfig& cfg, std::uint64_t seed,
                                     std::uint64_t replicate);

/// B(u_k) = int_0^{u_k} delta + sigma W(u_k), k = 0..n.
std::vector<double> simulate_B(const LimitGridConfig& cfg, std::uint64_t seed,
                               std::uint64_t replicate);

struct LimitPath {
    std::vector<double> nodes;  ///< u_0..u_n
    std::vector<double> B;      ///< B at every node
    int first_node = 0;         ///< node index of L.front()
    std::vector<double> L;      ///< L_xi(u_k) for k = first_node..n
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;

    /// L at node floor(s n); s below the first node raises a domain error.
    double L_at(double s) const;
};

/// Left-point discretization of
///   L_xi(s) = -2 int_{s0}^{s} I(u) dB(u),
///   I(u) = sum_{gamma <= v_l < u} K(xi (u - v_l)) dB_l / sum_{gamma <= v_l < u} K(xi (u - v_l)) du.
/// Returns L at nodes start_node()..n.
std::vector<double> limit_L_from_increments(const KernelSpec& kernel, const LimitGridConfig& cfg,
                                            double xi, std::span<const double> dB);

LimitPath simulate_L(const KernelSpec& kernel, const LimitGridConfig& cfg, std::uint64_t seed,
                     std::uint64_t replicate);

/// Var L_xi(1) for delta == 0:
///   4 sigma^4 int_{s0}^1 int_gamma^u K(xi (u - v))^2 dv / N(u)^2 du,
/// by nested adaptive quadrature.
double variance_oracle(const KernelSpec& kernel, const LimitGridConfig& cfg);

/// Off-diagonal double stochastic sums
///   sum_{k != l} g^{v_l, s_i}(u_k) dB_k dB_l over nodes in [gamma, s_i),
///   g^{v,s}(u) = int_{max(u, v, s0)}^{s} K(xi (w - u)) K(xi (w - v)) / N(w)^2 dw,
/// with g tabulated once (trapezoid in w at 4x the grid resolution).
class QLimitSimulator {
public:
    QLimitSimulator(const KernelSpec& kernel, const LimitGridConfig& cfg,
                    std::span<const double> s_points);

    std::vector<double> operator()(std::span<const double> dB) const;
    std::vector<double> sample(std::uint64_t seed, std::uint64_t replicate) const;

    /// Tabulated g for evaluation point i at node pair (k, l).
    double g(std::size_t i, int k, int l) const;

private:
    LimitGridConfig cfg_;
    std::vector<double> s_points_;
    std::vector<int> end_nodes_;
    int base_ = 0;
    std::vector<std::vector<double>> tables_;  ///< packed upper triangle, one per s_i
};

std::vector<double> simulate_Q_limit(const KernelSpec& kernel, const LimitGridConfig& cfg,
                                     std::span<const double> s_points, std::uint64_t seed,
                                     std::uint64_t replicate);

/// Smallest xi minimizing L_xi(s) over xi_grid, all xi driven by one common B path.
/// Values within 1e-9 relative of the minimum count as ties.
double argmin_limit(const KernelSpec& kernel, const LimitGridConfig& cfg,
                    std::span<const double> xi_grid, std::uint64_t seed, std::uint64_t replicate,
                    double s);

}  // namespace seqcv
