#include <gtest/gtest.h>

#include "seqcv/config.hpp"
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

const char* kFull = R"([model]
T = 250
m0 = 0 constant 0.5
delta = 0 constant 0; 0.5 linear 2 -1; 0.8 tabulated 0.8:1 0.9:2
check_sign = false

[errors]
kind = garch
alpha0 = 0.5
alpha = 0.1
beta = 0.3
burn_in = 500

[kernel]
family = half_gaussian

[monitor]
gamma = 0.1
s0 = 0.25
threshold = 0.4
direction = lower
xi = 8

[cv]
xi_grid = 5, 10, 20
s_grid = 0.5, 1.0
checkpoints = 0.3, 0.6

[limit]
grid_points = 500
sigma = 0.9
s_points = 0.5, 1
what = Q

[anscombe]
family = dispersion
mu = 0
sd = 2
c0 = 1
a_values = 100, 1000

[run]
reps = 7
seed = 99
threads = 2
)";

}  // namespace

TEST(Config, ParsesAllSections) {
    const auto c = parse_config(kFull);
    EXPECT_EQ(c.model.T, 250);
    EXPECT_DOUBLE_EQ(c.model.m0(0.3), 0.5);
    EXPECT_DOUBLE_EQ(c.model.delta(0.6), 0.2);
    EXPECT_DOUBLE_EQ(c.model.delta(0.85), 1.5);
    EXPECT_EQ(c.errors.kind, NoiseKind::GARCH);
    EXPECT_EQ(c.errors.garch.alpha, std::vector<double>{0.1});
    EXPECT_EQ(c.errors.burn_in, 500);
    EXPECT_EQ(c.kernel.family, KernelFamily::HalfGaussian);
    EXPECT_EQ(c.monitor.cfg.direction, Direction::Lower);
    EXPECT_DOUBLE_EQ(c.monitor.cfg.s0, 0.25);
    EXPECT_EQ(c.cv.xi_grid, (std::vector<double>{5, 10, 20}));
    EXPECT_EQ(c.limit.grid.grid_points, 500);
    EXPECT_DOUBLE_EQ(c.limit.grid.s0, 0.25);
    EXPECT_DOUBLE_EQ(c.limit.grid.delta(0.6), 0.2);
    EXPECT_EQ(c.limit.what, LimitQuantity::Q);
    EXPECT_EQ(c.anscombe.family.kind, StopKind::Dispersion);
    EXPECT_EQ(c.run.reps, 7);
    EXPECT_EQ(c.run.seed, 99u);
}

TEST(Config, DefaultsAreValid) {
    const auto c = parse_config("");
    EXPECT_EQ(c.kernel.family, KernelFamily::Exponential);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, RejectsUnknownSectionsKeysAndValues) {
    expect_error([] { parse_config("[nope]\na = 1\n"); }, ErrorCode::Configuration);
    expect_error([] { parse_config("[model]\nT2 = 1\n"); }, ErrorCode::Configuration);
    expect_error([] { parse_config("[model]\nT = ten\n"); }, ErrorCode::Configuration);
    expect_error([] { parse_config("[kernel]\nfamily = epanechnikov\n"); }, ErrorCode::Configuration);
    expect_error([] { parse_config("[errors]\nkind = arma\n"); }, ErrorCode::Configuration);
    expect_error([] { parse_config("[model]\ndelta = 0 cubic 1\n"); }, ErrorCode::Configuration);
}

TEST(Config, CrossSectionValidation) {
    expect_error([] { parse_config("[cv]\ns_grid = 0.1, 0.5\n"); }, ErrorCode::Configuration);
    expect_error([] { parse_config("[monitor]\ngamma = 0.3\ns0 = 0.2\n"); }, ErrorCode::Configuration);
    expect_error([] { parse_config("[model]\ndelta = 0 constant 1\n"); }, ErrorCode::Validation);
    expect_error([] { parse_config("[model]\ndelta = 0 constant 0; 0.5005 constant 1\n"); }, ErrorCode::Configuration);
}

TEST(Config, RiskLimitAutoCalibration) {
    const auto c = parse_config("[anscombe]\nfamily = risk_limit\nr_bar = auto\na_values = 200\n"
                                "[errors]\nkind = garch\nalpha0 = 0.5\nalpha = 0.1\nbeta = 0.3\n");
    EXPECT_GT(c.anscombe.family.r_bar, 0.8);
    EXPECT_EQ(c.anscombe.family.risk_errors.kind, NoiseKind::GARCH);
}

TEST(Config, Lists) {
    EXPECT_EQ(parse_list(" 1, 2.5 ,3 "), (std::vector<double>{1, 2.5, 3}));
    EXPECT_TRUE(parse_list("  ").empty());
    expect_error([] { parse_list("1,,2"); }, ErrorCode::Configuration);
}
