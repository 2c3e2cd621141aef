#include <gtest/gtest.h>

#include <cmath>

#include "seqcv/change_model.hpp"
#include "seqcv/error.hpp"

using namespace seqcv;

namespace {

template <class F>
void expect_error(F&& f, ErrorCode code) {
    try {
        f();
        ADD_FAILURE() << "no error raised";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

// Linear rise 0 -> 1.6 on [0, 0.8), then constant 0.
PiecewiseFn rise_then_drop() {
    return PiecewiseFn({{0.0, LinearSegment{2.0, 0.0}}, {0.8, ConstantSegment{0.0}}});
}

}  // namespace

TEST(MeanAt, Examples) {
    ChangeModel null;
    null.T = 100;
    EXPECT_DOUBLE_EQ(mean_at(null, 37), 0.0);

    ChangeModel drift;
    drift.T = 100;
    drift.delta = PiecewiseFn::constant(1.0);
    EXPECT_DOUBLE_EQ(mean_at(drift, 50), 0.1);

    ChangeModel step;
    step.T = 100;
    step.delta = PiecewiseFn::step(0.5, 0.0, 2.0);
    EXPECT_DOUBLE_EQ(mean_at(step, 60), 0.2);
    EXPECT_DOUBLE_EQ(mean_at(step, 50), 0.2);  // right-continuous at the jump
    EXPECT_DOUBLE_EQ(mean_at(step, 49), 0.0);
}

TEST(MeanAt, IndexOutOfRange) {
    ChangeModel m;
    m.T = 10;
    expect_error([&] { mean_at(m, 0); }, ErrorCode::Index);
    expect_error([&] { mean_at(m, 11); }, ErrorCode::Index);
}

TEST(MeanAt, NullDriftIsBaselineOnDesign) {
    ChangeModel m;
    m.T = 40;
    m.m0 = PiecewiseFn::linear(3.0, -1.0);
    m.design.kind = DesignKind::TabulatedQuantile;
    m.design.p = {0.0, 0.5, 1.0};
    m.design.x = {0.0, 0.2, 1.0};
    for (int n = 1; n <= 40; ++n) {
        const double p = static_cast<double>(n) / 40;
        const double x = p <= 0.5 ? 0.4 * p : 0.2 + 1.6 * (p - 0.5);
        EXPECT_NEAR(mean_at(m, n), 3.0 * x - 1.0, 1e-14);
    }
}

TEST(DeltaIntegral, Examples) {
    EXPECT_DOUBLE_EQ(delta_integral(PiecewiseFn(), 0.7), 0.0);
    EXPECT_NEAR(delta_integral(PiecewiseFn::constant(1.0), 0.7), 0.7, 1e-15);
    EXPECT_NEAR(delta_integral(PiecewiseFn::step(0.5, 0.0, 1.0), 0.75), 0.25, 1e-15);
    EXPECT_NEAR(delta_integral(rise_then_drop(), 1.0), 0.64, 1e-15);
    expect_error([] { delta_integral(PiecewiseFn(), 1.5); }, ErrorCode::Domain);
}

TEST(DeltaIntegral, TabulatedMatchesFineTrapezoid) {
    const PiecewiseFn f({{0.0, ConstantSegment{0.0}},
                         {0.3, TabulatedSegment{{0.3, 0.5, 0.9}, {1.0, -2.0, 0.5}}}});
    // Independent trapezoid with step 1e-5.
    auto ref = [&](double u) {
        const int n = static_cast<int>(std::round(u / 1e-5));
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += 0.5 * (f(k * 1e-5) + f((k + 1) * 1e-5)) * 1e-5;
        return s;
    };
    for (double u : {0.4, 0.6, 0.95, 1.0}) EXPECT_NEAR(delta_integral(f, u), ref(u), 1e-4);
}

TEST(DeltaVariation, Examples) {
    EXPECT_DOUBLE_EQ(delta_variation(PiecewiseFn::constant(4.0)), 0.0);
    EXPECT_DOUBLE_EQ(delta_variation(PiecewiseFn::step(0.5, 0.0, 1.0)), 1.0);
    // Enumerated by segments: rise 1.6 on [0, 0.8), jump 1.6 down, flat afterwards.
    EXPECT_NEAR(delta_variation(rise_then_drop()), 3.2, 1e-12);
}

TEST(DeltaVariation, MatchesFineGridOracle) {
    const PiecewiseFn f({{0.0, LinearSegment{-1.0, 0.5}},
                         {0.4, TabulatedSegment{{0.4, 0.6, 0.8}, {2.0, -1.0, 0.0}}},
                         {0.9, ConstantSegment{3.0}}});
    double v = 0.0;
    const int n = 1000000;
    for (int k = 1; k <= n; ++k) v += std::abs(f(static_cast<double>(k) / n) - f(static_cast<double>(k - 1) / n));
    // The grid misses O(1/n) of the variation next to each breakpoint.
    EXPECT_NEAR(delta_variation(f), v, 1e-5);
    EXPECT_NEAR(delta_variation(f), 0.4 + 1.9 + 4.0 + 3.0, 1e-12);
}

TEST(PiecewiseFn, ChangePointAndSign) {
    const auto step = PiecewiseFn::step(0.3, 0.0, -2.0);
    ASSERT_TRUE(step.first_change_point().has_value());
    EXPECT_DOUBLE_EQ(*step.first_change_point(), 0.3);
    EXPECT_TRUE(step.sign_consistent());
    EXPECT_FALSE(PiecewiseFn({{0.0, ConstantSegment{0.0}}, {0.4, LinearSegment{1.0, -0.6}}}).sign_consistent());
    EXPECT_FALSE(PiecewiseFn().first_change_point().has_value());
    EXPECT_TRUE(PiecewiseFn().is_zero());
}

TEST(PiecewiseFn, InvalidConstruction) {
    expect_error([] { PiecewiseFn({{0.1, ConstantSegment{1.0}}}); }, ErrorCode::Validation);
    expect_error([] { PiecewiseFn({{0.0, ConstantSegment{1.0}}, {0.5, ConstantSegment{0.0}}, {0.5, ConstantSegment{1.0}}}); },
                 ErrorCode::Validation);
    expect_error([] { PiecewiseFn({{0.0, TabulatedSegment{{0.0}, {1.0}}}}); }, ErrorCode::Validation);
    expect_error([] { PiecewiseFn::constant(1.0)(-0.1); }, ErrorCode::Domain);
}

TEST(ChangeModel, ValidationOfChangePoint) {
    ChangeModel m;
    m.T = 100;
    m.delta = PiecewiseFn::step(0.05, 0.0, 1.0);
    expect_error([&] { m.validate(0.1); }, ErrorCode::Validation);
    m.delta = PiecewiseFn::step(0.5, 0.0, 1.0);
    EXPECT_NO_THROW(m.validate(0.1));
    m.enforce_sign = true;
    m.delta = PiecewiseFn({{0.0, ConstantSegment{0.0}}, {0.5, ConstantSegment{1.0}}, {0.7, ConstantSegment{-1.0}}});
    expect_error([&] { m.validate(0.1); }, ErrorCode::Validation);
}

TEST(RiemannSum, KoksmaPropertyOnGrid) {
    const PiecewiseFn cases[] = {PiecewiseFn::step(0.5, 0.0, 1.0), PiecewiseFn::linear(2.0, 0.0), rise_then_drop()};
    for (const auto& d : cases) {
        const double V = delta_variation(d);
        for (int T : {10, 100, 1000}) {
            for (int k = 1; k <= 40; ++k) {
                const double u = k / 40.0;
                double sum = 0.0;
                for (int i = 1; i <= static_cast<int>(std::floor(T * u + 1e-9)); ++i) sum += d(static_cast<double>(i) / T);
                EXPECT_LE(std::abs(sum / T - delta_integral(d, u)), V / T + 1e-12) << "T=" << T << " u=" << u;
            }
        }
    }
}
