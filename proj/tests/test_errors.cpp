#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "seqcv/error.hpp"
#include "seqcv/error_process.hpp"
#include "seqcv/rng.hpp"

using namespace seqcv;

namespace {

double mean_of(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(const std::vector<double>& x) {
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double lag1_autocorr(const std::vector<double>& x) {
    const double m = mean_of(x);
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        den += (x[t] - m) * (x[t] - m);
        if (t > 0) num += (x[t] - m) * (x[t - 1] - m);
    }
    return num / den;
}

ErrorConfig garch(double a0, std::vector<double> a, std::vector<double> b) {
    ErrorConfig cfg;
    cfg.kind = NoiseKind::GARCH;
    cfg.garch.alpha0 = a0;
    cfg.garch.alpha = std::move(a);
    cfg.garch.beta = std::move(b);
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

}  // namespace

TEST(Rng, StreamSeedMatchesDocumentedFormula) {
    auto mix = [](std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    };
    const std::uint64_t seed = 42, rep = 7;
    std::uint64_t h = mix(seed);
    h = mix(h ^ (rep * 0x9E3779B97F4A7C15ULL + 1ULL));
    h = mix(h ^ (1ULL * 0xD1B54A32D192ED03ULL));
    EXPECT_EQ(stream_seed(seed, rep, StreamTag::Errors), h);
    EXPECT_NE(stream_seed(seed, rep, StreamTag::Errors), stream_seed(seed, rep, StreamTag::Limit));
    EXPECT_NE(stream_seed(seed, 0, StreamTag::Errors), stream_seed(seed, 1, StreamTag::Errors));
}

TEST(GenErrors, DegenerateGarchIsIidStandardNormal) {
    const auto eps = gen_errors(garch(1.0, {}, {}), 1000000, 11, 0);
    EXPECT_NEAR(variance_of(eps), 1.0, 0.01);
}

TEST(GenErrors, StationarityViolationRejected) {
    expect_error([] { gen_errors(garch(1.0, {0.9}, {0.2}), 10, 1, 0); }, ErrorCode::Validation);
    expect_error([] { gen_errors(garch(0.0, {0.1}, {0.2}), 10, 1, 0); }, ErrorCode::Validation);
    expect_error([] { gen_errors(garch(1.0, {0.1, 0.0}, {}), 10, 1, 0); }, ErrorCode::Validation);
}

TEST(GenErrors, GarchLongRunVarianceAndClustering) {
    const auto cfg = garch(0.5, {0.1}, {0.3});
    const auto eps = gen_errors(cfg, 1000000, 12, 0);
    EXPECT_NEAR(variance_of(eps), 0.5 / 0.6, 0.05 * 0.5 / 0.6);
    EXPECT_LE(std::abs(lag1_autocorr(eps)), 3.0 / std::sqrt(1e6));
    std::vector<double> sq(eps.size());
    for (std::size_t t = 0; t < eps.size(); ++t) sq[t] = eps[t] * eps[t];
    EXPECT_GT(lag1_autocorr(sq), 3.0 / std::sqrt(1e6));
}

TEST(GenErrors, StudentTUnitVarianceAndDfCheck) {
    ErrorConfig cfg;
    cfg.innovation = Innovation::StudentT;
    cfg.df = 10.0;
    const auto eps = gen_errors(cfg, 400000, 13, 0);
    EXPECT_NEAR(variance_of(eps), 1.0, 0.03);
    cfg.df = 8.0;
    expect_error([&] { gen_errors(cfg, 10, 1, 0); }, ErrorCode::Validation);
}

TEST(GenErrors, MovingAverageFlaggedAndCorrelated) {
    ErrorConfig cfg;
    cfg.kind = NoiseKind::MA;
    cfg.ma = {0.6};
    EXPECT_FALSE(cfg.martingale_difference());
    const auto eps = gen_errors(cfg, 200000, 14, 0);
    EXPECT_NEAR(lag1_autocorr(eps), 0.6 / 1.36, 0.01);
    EXPECT_NEAR(variance_of(eps), 1.36, 0.02);
}

TEST(GenErrors, Reproducible) {
    const auto cfg = garch(0.5, {0.1}, {0.3});
    EXPECT_EQ(gen_errors(cfg, 500, 5, 3), gen_errors(cfg, 500, 5, 3));
    EXPECT_NE(gen_errors(cfg, 500, 5, 3), gen_errors(cfg, 500, 5, 4));
    // Shorter horizons are prefixes of longer ones.
    const auto a = gen_errors(cfg, 100, 5, 3);
    const auto b = gen_errors(cfg, 200, 5, 3);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
}

TEST(GenPath, Examples) {
    ChangeModel m;
    m.T = 100;
    ErrorConfig zero;
    zero.sigma = 0.0;
    for (double y : gen_path(m, zero, 1, 0).Y) EXPECT_EQ(y, 0.0);
    m.delta = PiecewiseFn::constant(1.0);
    for (double y : gen_path(m, zero, 1, 0).Y) EXPECT_DOUBLE_EQ(y, 0.1);

    ChangeModel null;
    null.T = 100000;
    const auto p = gen_path(null, ErrorConfig{}, 15, 0);
    EXPECT_LE(std::abs(mean_of(p.Y)), 3.0 / std::sqrt(1e5));
}

TEST(GenPath, MeanPlusErrorIdentity) {
    ChangeModel m;
    m.T = 300;
    m.m0 = PiecewiseFn::linear(1.0, 0.5);
    m.delta = PiecewiseFn::step(0.4, 0.0, 3.0);
    const auto p = gen_path(m, garch(0.5, {0.1}, {0.3}), 2, 9);
    ASSERT_EQ(p.T(), 300);
    for (int n = 1; n <= 300; ++n) {
        const auto k = static_cast<std::size_t>(n - 1);
        EXPECT_EQ(p.mean[k], mean_at(m, n));
        EXPECT_EQ(p.Y[k], p.mean[k] + p.eps[k]);
    }
    EXPECT_EQ(p.seed, 2u);
    EXPECT_EQ(p.replicate, 9u);
    EXPECT_TRUE(p.martingale_difference);
}
