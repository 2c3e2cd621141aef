#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "seqcv/error.hpp"
#include "seqcv/harness.hpp"

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

ExperimentConfig base_config() {
    ExperimentConfig c;
    c.model.T = 100;
    c.model.delta = PiecewiseFn::step(0.5, 0.0, 2.0);
    c.cv.s_grid = {0.5, 1.0};
    c.cv.xi_grid = {5.0, 10.0};
    c.cv.checkpoints = {0.3, 0.6};
    c.limit.grid.grid_points = 200;
    c.limit.s_points = {0.5, 1.0};
    c.limit.xi_grid = {5.0, 10.0};
    c.run.reps = 6;
    c.run.seed = 123;
    c.anscombe.a_values = {50.0, 80.0};
    return c;
}

std::string csv(const SampleTable& t) {
    std::ostringstream out;
    write_csv(t, out);
    return out.str();
}

}  // namespace

TEST(RunMc, ZeroPathGivesZeroCv) {
    auto c = base_config();
    c.model.delta = PiecewiseFn();
    c.errors.sigma = 0.0;
    c.run.reps = 1;
    const auto t = run_mc(c, Task::FiniteTCv);
    ASSERT_EQ(t.rows.size(), 4u);
    for (double v : t.values("CV")) EXPECT_EQ(v, 0.0);
}

TEST(RunMc, ReproducibleAndThreadInvariant) {
    const auto c = base_config();
    for (Task task : {Task::Generate, Task::FiniteTCv, Task::BandwidthPath, Task::LimitB, Task::LimitL, Task::LimitQ,
                      Task::LimitArgmin, Task::StoppedCv, Task::Detector, Task::StopTimes}) {
        const auto one = csv(run_mc(c, task, 1));
        EXPECT_EQ(one, csv(run_mc(c, task, 1)));
        EXPECT_EQ(one, csv(run_mc(c, task, 3)));
        EXPECT_FALSE(one.empty());
    }
}

TEST(RunMc, LimitMeanWithinBand) {
    auto c = base_config();
    c.model.delta = PiecewiseFn();
    c.limit.grid.delta = PiecewiseFn();
    c.limit.s_points = {1.0};
    c.run.reps = 2000;
    const auto v = run_mc(c, Task::LimitL).values("value");
    ASSERT_EQ(v.size(), 2000u);
    const auto m = moments(v);
    EXPECT_LE(std::abs(m.mean), 3.0 * std::sqrt(m.variance / 2000.0));
}

TEST(RunMc, FailedReplicatesAreCounted) {
    auto c = base_config();
    c.anscombe.family.increments = {-1.0, 1.0};
    const auto t = run_mc(c, Task::StopTimes);
    EXPECT_EQ(t.failed_replicates, c.run.reps);
    EXPECT_TRUE(t.rows.empty());
    EXPECT_EQ(t.failures.size(), static_cast<std::size_t>(c.run.reps));

    auto ok = base_config();
    const auto good = run_mc(ok, Task::Detector);
    EXPECT_EQ(good.failed_replicates + static_cast<int>(good.rows.size()), ok.run.reps);
}

TEST(RunMc, ColumnsAndMissingCells) {
    auto c = base_config();
    c.anscombe.family.kind = StopKind::DeterministicFraction;
    c.anscombe.family.fraction = 0.3;
    c.cv.s_grid = {0.5, 1.0};
    const auto t = run_mc(c, Task::StoppedCv);
    EXPECT_EQ(t.columns, (std::vector<std::string>{"replicate", "a", "tau", "s", "phi", "T_C"}));
    const auto text = csv(t);
    // phi = 0.3 * 0.5 < s0 gives an empty T_C cell.
    EXPECT_NE(text.find(",0.14999999999999999,\n"), std::string::npos) << text;
    std::ostringstream js;
    write_json(t, js);
    const auto doc = nlohmann::json::parse(js.str());
    EXPECT_EQ(doc["rows"].size(), t.rows.size());
    EXPECT_TRUE(doc["rows"][0][5].is_null());
    EXPECT_EQ(doc["columns"][5], "T_C");
    EXPECT_EQ(doc["failed_replicates"], 0);
}

TEST(RunMc, CsvHeaders) {
    const auto c = base_config();
    EXPECT_EQ(csv(run_mc(c, Task::FiniteTCv)).substr(0, 32), "replicate,s,xi,CV,L,Q,C,T_C,Q_of");
    EXPECT_EQ(csv(run_mc(c, Task::Detector)).substr(0, 32), "replicate,signal_index,signaled\n");
    EXPECT_EQ(csv(run_mc(c, Task::StopTimes)).substr(0, 29), "family,a,replicate,tau,ratio\n");
}

TEST(Ks, Examples) {
    const std::vector<double> x{1, 2, 3};
    const std::vector<double> y{1.5, 2.5, 3.5};
    EXPECT_EQ(ks_two_sample(x, x), 0.0);
    EXPECT_NEAR(ks_two_sample(x, y), 1.0 / 3.0, 1e-15);
    const std::vector<double> far{10, 11};
    EXPECT_EQ(ks_two_sample(x, far), 1.0);
    EXPECT_EQ(ks_two_sample(far, x), 1.0);
    expect_error([&] { ks_two_sample(std::vector<double>{}, x); }, ErrorCode::Domain);
}

TEST(Ks, SymmetricAndTiesHandled) {
    const std::vector<double> a{0.1, 0.5, 0.5, 0.9, 2.0, -1.0};
    const std::vector<double> b{0.5, 0.5, 3.0, -2.0};
    EXPECT_EQ(ks_two_sample(a, b), ks_two_sample(b, a));
    // ECDF enumeration: at t = 0.5, F_a = 4/6 and F_b = 3/4; at t = 2.0, F_a = 1 and F_b = 3/4.
    EXPECT_NEAR(ks_two_sample(a, b), 0.25, 1e-15);
    for (double v : {ks_two_sample(a, b)}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(ScalingFit, ExactPowerLaws) {
    std::vector<double> base;
    for (int k = 0; k < 300; ++k) base.push_back(std::sin(k * 1.7) + 0.01 * k);
    for (double power : {1.0, 2.0}) {
        std::map<int, std::vector<double>> samples;
        for (int T : {100, 200, 400, 800}) {
            auto& v = samples[T];
            for (double b : base) v.push_back(b / std::pow(T, power));
        }
        const auto fit = scaling_fit(samples);
        EXPECT_NEAR(fit.kappa, power, 1e-6);
        EXPECT_LE(fit.std_error, 1e-6);
    }
}

TEST(ScalingFit, Preconditions) {
    std::map<int, std::vector<double>> two{{100, std::vector<double>(300, 1.0)}, {200, std::vector<double>(300, 2.0)}};
    expect_error([&] { scaling_fit(two); }, ErrorCode::Diagnostics);
    std::map<int, std::vector<double>> flat{{100, std::vector<double>(300, 1.0)},
                                            {200, std::vector<double>(300, 1.0)},
                                            {400, std::vector<double>(300, 1.0)}};
    expect_error([&] { scaling_fit(flat); }, ErrorCode::Diagnostics);
    std::map<int, std::vector<double>> small{{100, {1.0, 2.0}}, {200, {1.0, 2.0}}, {400, {1.0, 2.0}}};
    expect_error([&] { scaling_fit(small); }, ErrorCode::Diagnostics);
}

TEST(Moments, Basics) {
    const std::vector<double> x{1, 2, 3, 4};
    const auto m = moments(x);
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_DOUBLE_EQ(m.variance, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(quantile(x, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(iqr(x), 1.5);
}
