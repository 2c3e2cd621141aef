#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "seqcv/error.hpp"
#include "seqcv/limits.hpp"

using namespace seqcv;

namespace {

const KernelSpec kExp = make_kernel(KernelFamily::Exponential);
const KernelSpec kGauss = make_kernel(KernelFamily::HalfGaussian);

LimitGridConfig grid(int n, double sigma, PiecewiseFn delta = PiecewiseFn()) {
    LimitGridConfig cfg;
    cfg.grid_points = n;
    cfg.sigma = sigma;
    cfg.delta = std::move(delta);
    cfg.xi = 10.0;
    cfg.gamma = 0.1;
    cfg.s0 = 0.2;
    return cfg;
}

template <class F>
void expect_error(F&& f, ErrorCode code) {
    try {
        f();
        ADD_FAILURE() << "no error raised";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

struct Stats {
    double mean = 0.0, var = 0.0;
};

Stats stats(const std::vector<double>& x) {
    Stats s;
    for (double v : x) s.mean += v;
    s.mean /= static_cast<double>(x.size());
    for (double v : x) s.var += (v - s.mean) * (v - s.mean);
    s.var /= static_cast<double>(x.size() - 1);
    return s;
}

template <class F>
double simpson(F f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

// 4 sigma^4 int_{s0}^1 [(1 - e^{-2 xi (u - gamma)}) / (2 xi)] / N(u)^2 du for the exponential kernel.
double exponential_variance(double sigma, double xi, double gamma, double s0) {
    auto f = [&](double u) {
        const double inner = (1.0 - std::exp(-2.0 * xi * (u - gamma))) / (2.0 * xi);
        const double N = (1.0 - std::exp(-xi * (u - gamma))) / xi;
        return inner / (N * N);
    };
    return 4.0 * std::pow(sigma, 4) * simpson(f, s0, 1.0, 20000);
}

}  // namespace

TEST(SimulateB, Deterministic) {
    for (double v : simulate_B(grid(200, 0.0), 1, 0)) EXPECT_EQ(v, 0.0);
    const auto B = simulate_B(grid(200, 0.0, PiecewiseFn::constant(1.0)), 1, 0);
    for (std::size_t k = 0; k < B.size(); ++k) EXPECT_NEAR(B[k], k / 200.0, 1e-15);
}

TEST(SimulateB, BrownianVarianceAndIncrements) {
    std::vector<double> half, first;
    const auto cfg = grid(100, 1.0);
    for (int r = 0; r < 10000; ++r) {
        const auto B = simulate_B(cfg, 21, static_cast<std::uint64_t>(r));
        EXPECT_EQ(B[0], 0.0);
        half.push_back(B[50]);
        first.push_back(B[1] - B[0]);
    }
    EXPECT_NEAR(stats(half).var, 0.5, 0.025);
    EXPECT_NEAR(stats(first).var, 0.01, 0.001);
}

TEST(SimulateB, BreakpointsMustBeNodes) {
    expect_error([] { simulate_B(grid(100, 1.0, PiecewiseFn::step(0.505, 0.0, 1.0)), 1, 0); }, ErrorCode::Configuration);
    EXPECT_NO_THROW(simulate_B(grid(200, 1.0, PiecewiseFn::step(0.505, 0.0, 1.0)), 1, 0));
    expect_error([] { simulate_B(grid(99, 1.0), 1, 0); }, ErrorCode::Configuration);
}

TEST(SimulateL, DeterministicDrift) {
    for (const auto& K : {kExp, kGauss}) {
        const auto cfg = grid(1000, 0.0, PiecewiseFn::constant(1.0));
        const auto path = simulate_L(K, cfg, 1, 0);
        EXPECT_NEAR(path.L_at(0.7), -1.0, 2.0 * cfg.step());
        EXPECT_EQ(path.L_at(0.2), 0.0);
        EXPECT_EQ(path.first_node, 200);
        expect_error([&] { path.L_at(0.1); }, ErrorCode::Domain);
    }
}

TEST(SimulateL, ZeroLowerLimitVariant) {
    auto cfg = grid(1000, 0.0, PiecewiseFn::constant(1.0));
    cfg.lower_limits = LowerLimits::Zero;
    const auto path = simulate_L(kExp, cfg, 1, 0);
    // Node 0 has an empty inner window, so the outer sum starts one step late.
    for (double s : {0.3, 0.7, 1.0}) EXPECT_NEAR(path.L_at(s), -2.0 * (s - cfg.step()), 1e-12);
}

TEST(SimulateL, DenominatorBelowGammaIsDomainError) {
    auto cfg = grid(100, 1.0);
    cfg.gamma = 0.101;
    cfg.s0 = 0.105;  // both round up to node 11
    expect_error([&] { simulate_L(kExp, cfg, 1, 0); }, ErrorCode::Domain);
}

TEST(SimulateL, GridRefinementStability) {
    const auto delta = PiecewiseFn({{0.0, ConstantSegment{0.0}}, {0.3, LinearSegment{2.0, 0.0}}, {0.6, ConstantSegment{-1.0}}});
    for (double s : {0.45, 0.8, 1.0}) {
        const auto coarse = simulate_L(kExp, grid(500, 0.0, delta), 1, 0).L_at(s);
        const auto fine = simulate_L(kExp, grid(1000, 0.0, delta), 1, 0).L_at(s);
        const auto finer = simulate_L(kExp, grid(2000, 0.0, delta), 1, 0).L_at(s);
        EXPECT_LE(std::abs(coarse - fine), 20.0 / 500);
        EXPECT_LE(std::abs(fine - finer), 0.6 * std::abs(coarse - fine) + 1e-12);
    }
}

TEST(SimulateL, LeftPointPredictability) {
    const auto cfg = grid(300, 1.0);
    auto dB = limit_increments(cfg, 5, 0);
    const auto base = limit_L_from_increments(kExp, cfg, cfg.xi, dB);
    const int start = cfg.start_node();
    for (int k : {70, 150, 299}) {
        auto mutated = dB;
        for (int j = k; j < 300; ++j) mutated[static_cast<std::size_t>(j)] += 5.0;
        const auto other = limit_L_from_increments(kExp, cfg, cfg.xi, mutated);
        // L at node m uses increments dB_0..dB_{m-1}.
        for (int m = start; m <= k; ++m) {
            EXPECT_EQ(other[static_cast<std::size_t>(m - start)], base[static_cast<std::size_t>(m - start)]);
        }
        EXPECT_NE(other[static_cast<std::size_t>(k + 1 - start)], base[static_cast<std::size_t>(k + 1 - start)]);
    }
}

TEST(SimulateL, MeanZeroAndIsometry) {
    const auto cfg = grid(500, 1.0);
    std::vector<double> v;
    for (int r = 0; r < 10000; ++r) v.push_back(simulate_L(kExp, cfg, 31, static_cast<std::uint64_t>(r)).L_at(1.0));
    const auto s = stats(v);
    EXPECT_LE(std::abs(s.mean), 3.0 * std::sqrt(s.var / v.size()));
    const double oracle = variance_oracle(kExp, cfg);
    EXPECT_NEAR(s.var, oracle, 0.10 * oracle);
}

TEST(VarianceOracle, Examples) {
    const auto cfg = grid(100, 1.0);
    const double v = variance_oracle(kExp, cfg);
    EXPECT_NEAR(v, exponential_variance(1.0, 10.0, 0.1, 0.2), 1e-8);
    EXPECT_EQ(variance_oracle(kExp, grid(100, 0.0)), 0.0);
    EXPECT_NEAR(variance_oracle(kExp, grid(100, 2.0)), 16.0 * v, 1e-9 * v);
    expect_error([] { variance_oracle(kExp, grid(100, 1.0, PiecewiseFn::constant(1.0))); }, ErrorCode::Unsupported);
    auto zero = cfg;
    zero.lower_limits = LowerLimits::Zero;
    expect_error([&] { variance_oracle(kExp, zero); }, ErrorCode::Unsupported);
}

TEST(VarianceOracle, HalfGaussianAgainstNestedSimpson) {
    const auto cfg = grid(100, 1.0);
    auto outer = [](double u) {
        auto k2 = [&](double v) { return std::exp(-100.0 * (u - v) * (u - v)); };
        auto k = [&](double v) { return std::exp(-50.0 * (u - v) * (u - v)); };
        const double N = simpson(k, 0.1, u, 2000);
        return simpson(k2, 0.1, u, 2000) / (N * N);
    };
    EXPECT_NEAR(variance_oracle(kGauss, cfg), 4.0 * simpson(outer, 0.2, 1.0, 2000), 1e-7);
}

TEST(QLimit, ZeroInputs) {
    const std::vector<double> s{0.5, 1.0};
    for (double v : simulate_Q_limit(kExp, grid(200, 0.0), s, 1, 0)) EXPECT_EQ(v, 0.0);
}

TEST(QLimit, DeterministicDriftMatchesTripleQuadrature) {
    // d^2 int_{s0}^{s} N(w)^-2 [int_gamma^w K(xi (w - u)) du]^2 dw by nested Simpson.
    const double d = 1.5;
    auto oracle = [&](double s) {
        auto f = [&](double w) {
            const double a = simpson([&](double u) { return std::exp(-10.0 * (w - u)); }, 0.1, w, 2000);
            const double N = simpson([&](double z) { return std::exp(-10.0 * (w - z)); }, 0.1, w, 2000);
            return a * a / (N * N);
        };
        return d * d * simpson(f, 0.2, s, 200);
    };
    const std::vector<double> s{0.5, 0.75, 1.0};
    double prev_err = 1.0;
    for (int n : {200, 400}) {
        const auto q = simulate_Q_limit(kExp, grid(n, 0.0, PiecewiseFn::constant(d)), s, 1, 0);
        double err = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double o = oracle(s[i]);
            EXPECT_NEAR(o, d * d * (s[i] - 0.2), 1e-9);
            err = std::max(err, std::abs(q[i] - o));
        }
        EXPECT_LE(err, 20.0 / n) << "n=" << n;
        EXPECT_LE(err, 0.6 * prev_err);
        prev_err = err;
    }
}

TEST(QLimit, VanishingDomainAndCoarseGrid) {
    const auto cfg = grid(200, 1.0, PiecewiseFn::constant(2.0));
    const std::vector<double> at_start{0.2};
    EXPECT_EQ(simulate_Q_limit(kExp, cfg, at_start, 3, 0)[0], 0.0);
    auto coarse = grid(100, 1.0);
    coarse.gamma = 0.15;
    coarse.s0 = 0.2;
    const std::vector<double> s{0.2};
    expect_error([&] { QLimitSimulator(kExp, coarse, s); }, ErrorCode::Configuration);
    const std::vector<double> unsorted{0.8, 0.5};
    expect_error([&] { QLimitSimulator(kExp, grid(200, 1.0), unsorted); }, ErrorCode::Configuration);
}

TEST(QLimit, OffDiagonalMeanZeroAndSymmetricTable) {
    const auto cfg = grid(200, 1.0);
    const std::vector<double> s{0.6, 1.0};
    const QLimitSimulator sim(kExp, cfg, s);
    EXPECT_EQ(sim.g(1, 30, 80), sim.g(1, 80, 30));
    EXPECT_GT(sim.g(1, 30, 80), 0.0);
    EXPECT_EQ(sim.g(0, 30, 150), 0.0);  // beyond s_1
    std::vector<double> v;
    for (int r = 0; r < 2000; ++r) v.push_back(sim.sample(41, static_cast<std::uint64_t>(r))[1]);
    const auto st = stats(v);
    EXPECT_LE(std::abs(st.mean), 3.0 * std::sqrt(st.var / v.size()));
}

TEST(ArgminLimit, Contracts) {
    const std::vector<double> xi{5.0, 2.0, 10.0, 20.0};
    const auto det = grid(400, 0.0, PiecewiseFn::constant(1.0));
    EXPECT_EQ(argmin_limit(kExp, det, xi, 1, 0, 0.8), 2.0);
    const std::vector<double> single{7.5};
    EXPECT_EQ(argmin_limit(kExp, grid(400, 1.0), single, 1, 0, 1.0), 7.5);
    auto reversed = xi;
    std::reverse(reversed.begin(), reversed.end());
    const auto cfg = grid(400, 1.0);
    for (int r = 0; r < 30; ++r) {
        const double a = argmin_limit(kExp, cfg, xi, 9, static_cast<std::uint64_t>(r), 1.0);
        EXPECT_NE(std::find(xi.begin(), xi.end(), a), xi.end());
        EXPECT_EQ(a, argmin_limit(kExp, cfg, reversed, 9, static_cast<std::uint64_t>(r), 1.0));
    }
    expect_error([&] { argmin_limit(kExp, cfg, xi, 1, 0, 0.1); }, ErrorCode::Domain);
}
