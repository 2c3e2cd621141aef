#include "seqcv/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "seqcv/anscombe.hpp"
#include "seqcv/config.hpp"
#include "seqcv/crossval.hpp"
#include "seqcv/error.hpp"
#include "seqcv/error_process.hpp"
#include "seqcv/harness.hpp"
#include "seqcv/kernel.hpp"
#include "seqcv/limits.hpp"
#include "seqcv/monitor.hpp"
#include "seqcv/numeric.hpp"
#include "seqcv/predictor.hpp"

namespace seqcv {
namespace {

constexpr double kGamma = 0.1;
constexpr double kS0 = 0.2;
constexpr double kXi = 10.0;

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string g6(double v) { return fmt("%.6g", v); }

ChangeModel null_model(int T, double drift = 0.0) {
    ChangeModel m;
    m.T = T;
    m.delta = PiecewiseFn::constant(drift);
    return m;
}

ErrorConfig gaussian_errors(double sigma) {
    ErrorConfig e;
    e.sigma = sigma;
    return e;
}

LimitGridConfig limit_config(int grid_points, double sigma, double drift = 0.0) {
    LimitGridConfig cfg;
    cfg.grid_points = grid_points;
    cfg.sigma = sigma;
    cfg.delta = PiecewiseFn::constant(drift);
    cfg.xi = kXi;
    cfg.gamma = kGamma;
    cfg.s0 = kS0;
    return cfg;
}

// Plain double-loop CV pieces, sharing no code with the incremental scan.
struct BruteCv {
    double cv = 0.0, L = 0.0, Q = 0.0;
};

BruteCv brute_cv(const std::vector<double>& Y, int T, double s, double xi) {
    const double h = T / xi;
    const int j0 = std::max(1, static_cast<int>(std::floor(T * kGamma + 1e-9)));
    const int first = static_cast<int>(std::floor(T * kS0 + 1e-9));
    const int last = static_cast<int>(std::floor(T * s + 1e-9));
    BruteCv out;
    for (int i = first; i <= last; ++i) {
        double num = 0.0, den = 0.0;
        for (int j = j0; j <= i - 1; ++j) {
            const double w = std::exp(-(i - j) / h);
            num += w * Y[static_cast<std::size_t>(j - 1)];
            den += w;
        }
        const double m = num / den;
        const double y = Y[static_cast<std::size_t>(i - 1)];
        out.cv += (y - m) * (y - m);
        out.L += -2.0 * y * m;
        out.Q += m * m;
    }
    out.cv /= T;
    out.L /= T;
    out.Q /= T;
    return out;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// T C_{T,s}(T / xi) and T L_T(s) over replications of the null model.
struct FiniteSample {
    std::vector<double> TC, TL, TQ;
};

FiniteSample finite_sample(int T, double s, int reps, std::uint64_t seed, int threads) {
    FiniteSample out;
    out.TC.resize(static_cast<std::size_t>(reps));
    out.TL.resize(out.TC.size());
    out.TQ.resize(out.TC.size());
    const ChangeModel model = null_model(T);
    const ErrorConfig errors = gaussian_errors(1.0);
    const KernelSpec K = make_kernel(KernelFamily::Exponential);
    const CvConfig cfg{kGamma, kS0, T};
    const double s_grid[] = {s};
    const double xi_grid[] = {kXi};
    for_each_replicate(reps, threads, [&](int r) {
        const auto path = gen_path(model, errors, seed, static_cast<std::uint64_t>(r));
        const auto ev = decompose(path.Y, K, cfg, s_grid, xi_grid);
        const auto k = static_cast<std::size_t>(r);
        out.TC[k] = T * ev.C(0, 0);
        out.TL[k] = T * ev.L(0, 0);
        out.TQ[k] = T * ev.Q(0, 0);
    });
    return out;
}

std::vector<double> limit_sample(const LimitGridConfig& cfg, double s, int reps,
                                 std::uint64_t seed, int threads) {
    std::vector<double> out(static_cast<std::size_t>(reps));
    const KernelSpec K = make_kernel(KernelFamily::Exponential);
    for_each_replicate(reps, threads, [&](int r) {
        out[static_cast<std::size_t>(r)] = simulate_L(K, cfg, seed, static_cast<std::uint64_t>(r)).L_at(s);
    });
    return out;
}

CriterionResult c01_koksma(const AcceptanceOptions&) {
    CriterionResult res{1, "normalizer discretization within 1/T", true, ""};
    const KernelSpec K = make_kernel(KernelFamily::Exponential);
    std::ostringstream detail;
    for (int T : {10, 100, 1000, 10000}) {
        const NormalizerConfig cfg{kXi, kGamma, T};
        double worst = 0.0;
        for (int k = 1; k <= 100; ++k) {
            const double w = kGamma + (1.0 - kGamma) * k / 100.0;
            worst = std::max(worst, std::abs(normalizer_discrete(K, cfg, w) - normalizer_limit(K, cfg, w)));
        }
        const bool ok = worst <= K.total_variation / T;
        res.passed = res.passed && ok;
        detail << "T=" << T << " max|N_T-N|*T=" << g6(worst * T) << (ok ? "" : " (exceeds)") << "; ";
    }
    res.detail = detail.str();
    return res;
}

CriterionResult c02_riemann(const AcceptanceOptions&) {
    CriterionResult res{2, "Riemann sums of delta within V(delta)/T", true, ""};
    std::ostringstream detail;
    const std::pair<const char*, PiecewiseFn> cases[] = {
        {"step", PiecewiseFn::step(0.5, 0.0, 1.0)},
        {"linear", PiecewiseFn::linear(2.0, 0.0)},
    };
    for (const auto& [label, delta] : cases) {
        const double V = delta_variation(delta);
        for (int T : {10, 100, 1000}) {
            double worst = 0.0;
            for (int k = 1; k <= 20; ++k) {
                const double u = k / 20.0;
                const int last = index_floor(T, u);
                CompensatedSum sum;
                for (int i = 1; i <= last; ++i) sum.add(delta(static_cast<double>(i) / T));
                worst = std::max(worst, std::abs(sum.value() / T - delta_integral(delta, u)));
            }
            const bool ok = worst <= V / T + 1e-15;
            res.passed = res.passed && ok;
            detail << label << " T=" << T << " err*T/V=" << g6(worst * T / V) << "; ";
        }
    }
    res.detail = detail.str();
    return res;
}

CriterionResult c03_cv_oracle(const AcceptanceOptions& opt) {
    CriterionResult res{3, "incremental CV matches double-loop oracle", true, ""};
    const int T = 50;
    const std::vector<double> s_grid{0.2, 0.3, 0.5, 0.62, 0.8, 1.0};
    const std::vector<double> xi_grid{1.0, 2.5, 5.0, 10.0, 20.0, 40.0};
    const KernelSpec K = make_kernel(KernelFamily::Exponential);
    ChangeModel model = null_model(T, 1.5);
    model.delta = PiecewiseFn::step(0.5, 0.0, 1.5);
    double worst = 0.0;
    for (int r = 0; r < 10; ++r) {
        const auto path = gen_path(model, gaussian_errors(1.0), opt.seed + 3, static_cast<std::uint64_t>(r));
        const auto ev = decompose(path.Y, K, CvConfig{kGamma, kS0, T}, s_grid, xi_grid);
        for (std::size_t i = 0; i < s_grid.size(); ++i) {
            for (std::size_t j = 0; j < xi_grid.size(); ++j) {
                const auto b = brute_cv(path.Y, T, s_grid[i], xi_grid[j]);
                worst = std::max({worst, rel_err(ev.CV(i, j), b.cv), rel_err(ev.L(i, j), b.L),
                                  rel_err(ev.Q(i, j), b.Q), rel_err(ev.C(i, j), b.L + b.Q)});
            }
        }
    }
    res.passed = worst <= 1e-10;
    res.detail = "max relative error " + g6(worst) + " over 10 paths x 36 cells";
    return res;
}

CriterionResult c04_drift(const AcceptanceOptions&) {
    CriterionResult res{4, "deterministic drift limit of T L_T and simulated L", true, ""};
    std::ostringstream detail;
    const KernelSpec K = make_kernel(KernelFamily::Exponential);
    const std::vector<double> s_grid{0.5, 0.75, 1.0};
    const double xi_grid[] = {kXi};
    for (int T : {200, 800}) {
        const auto path = gen_path(null_model(T, 1.0), gaussian_errors(0.0), 1, 0);
        const auto ev = decompose(path.Y, K, CvConfig{kGamma, kS0, T}, s_grid, xi_grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < s_grid.size(); ++i) {
            worst = std::max(worst, std::abs(T * ev.L(i, 0) + 2.0 * (s_grid[i] - kS0)));
        }
        const bool ok = worst <= 5.0 / T;
        res.passed = res.passed && ok;
        detail << "T=" << T << " max|T L_T - limit|*T=" << g6(worst * T) << "; ";
    }
    const auto cfg = limit_config(2000, 0.0, 1.0);
    const auto L = simulate_L(K, cfg, 1, 0);
    double worst = 0.0;
    for (double s : s_grid) worst = std::max(worst, std::abs(L.L_at(s) + 2.0 * (s - kS0)));
    const bool ok = worst <= 2.0 * cfg.step();
    res.passed = res.passed && ok;
    detail << "simulated L max error/step=" << g6(worst / cfg.step());
    res.detail = detail.str();
    return res;
}

CriterionResult c05_fclt(const AcceptanceOptions& opt) {
    CriterionResult res{5, "T C_T(1) vs simulated L(1): KS <= 0.08, nonincreasing in T", true, ""};
    const int reps = 2000;
    const auto limit = limit_sample(limit_config(2000, 1.0), 1.0, reps, opt.seed + 50, opt.threads);
    std::ostringstream detail;
    double prev = 1.0;
    bool monotone = true;
    double ks400 = 1.0;
    for (int T : {100, 200, 400}) {
        const auto fs = finite_sample(T, 1.0, reps, opt.seed + 51 + static_cast<std::uint64_t>(T), opt.threads);
        const double ks = ks_two_sample(fs.TC, limit);
        const double ks_L = ks_two_sample(fs.TL, limit);
        monotone = monotone && ks <= prev + 0.02;
        prev = ks;
        if (T == 400) ks400 = ks;
        detail << "T=" << T << " KS(TC)=" << fmt("%.4f", ks) << " KS(TL)=" << fmt("%.4f", ks_L)
               << " mean TQ=" << fmt("%.3f", moments(fs.TQ).mean) << "; ";
    }
    const auto lm = moments(limit);
    detail << "limit mean=" << fmt("%.3f", lm.mean) << " var=" << fmt("%.3f", lm.variance)
           << "; monotone=" << (monotone ? "yes" : "no");
    res.passed = ks400 <= 0.08 && monotone;
    res.detail = detail.str();
    return res;
}

CriterionResult c06_isometry(const AcceptanceOptions& opt) {
    CriterionResult res{6, "variance of simulated L(1) within 10% of the isometry value", true, ""};
    const auto cfg = limit_config(1000, 1.0);
    const auto sample = limit_sample(cfg, 1.0, 10000, opt.seed + 60, opt.threads);
    const double oracle = variance_oracle(make_kernel(KernelFamily::Exponential), cfg);
    const auto m = moments(sample);
    const double rel = std::abs(m.variance - oracle) / oracle;
    res.passed = rel <= 0.10;
    res.detail = "MC variance " + g6(m.variance) + " vs oracle " + g6(oracle) + " (relative gap " +
                 fmt("%.4f", rel) + ")";
    return res;
}

CriterionResult c07_anscombe(const AcceptanceOptions& opt) {
    CriterionResult res{7, "first-passage ratio tau_a/a near 1/mu", true, ""};
    const IncrementSpec inc{2.0, 1.0};
    const double a = 1e4;
    std::vector<double> ratios;
    for (int r = 0; r < 100; ++r) {
        ratios.push_back(first_passage_tau(inc, a, opt.seed + 70, static_cast<std::uint64_t>(r)).tau / a);
    }
    const double mean = moments(ratios).mean;
    res.passed = std::abs(mean - 0.5) <= 0.02;
    res.detail = "mean ratio " + fmt("%.5f", mean);
    return res;
}

CriterionResult c08_random_horizon(const AcceptanceOptions& opt) {
    CriterionResult res{8, "stopped T' C(1) with tau = floor(a/2) vs simulated L(0.5): KS <= 0.10", true, ""};
    const int reps = 2000;
    const double a = 400.0;
    const int tau = static_cast<int>(std::floor(a / 2.0));
    const auto change = TimeChange::from_level(tau, a);
    const KernelSpec K = make_kernel(KernelFamily::Exponential);
    const ChangeModel model = null_model(change.T_prime);
    const CvConfig cfg{kGamma, kS0, change.T_prime};
    std::vector<double> stopped(static_cast<std::size_t>(reps));
    std::vector<double> stopped_L(stopped.size());
    const double s_grid[] = {change.phi(1.0)};
    const double xi_grid[] = {kXi};
    for_each_replicate(reps, opt.threads, [&](int r) {
        const auto path = gen_path(model, gaussian_errors(1.0), opt.seed + 80, static_cast<std::uint64_t>(r));
        const auto v = stopped_cv(path.Y, change, K, cfg, 1.0, kXi);
        if (!v) throw Error(ErrorCode::Evaluation, "stopped value below start");
        stopped[static_cast<std::size_t>(r)] = *v;
        const auto ev = decompose(path.Y, K, cfg, s_grid, xi_grid);
        stopped_L[static_cast<std::size_t>(r)] = cfg.T * ev.L(0, 0);
    });
    const auto limit = limit_sample(limit_config(2000, 1.0), 0.5, reps, opt.seed + 81, opt.threads);
    const double ks = ks_two_sample(stopped, limit);
    const double ks_L = ks_two_sample(stopped_L, limit);
    res.passed = ks <= 0.10;
    res.detail = "KS(stopped TC)=" + fmt("%.4f", ks) + " KS(stopped TL)=" + fmt("%.4f", ks_L) +
                 " mean stopped=" + fmt("%.3f", moments(stopped).mean) +
                 " mean limit=" + fmt("%.3f", moments(limit).mean);
    return res;
}

CriterionResult c09_garch(const AcceptanceOptions& opt) {
    CriterionResult res{9, "GARCH(1,1) variance and lag-1 autocorrelation", true, ""};
    ErrorConfig cfg;
    cfg.kind = NoiseKind::GARCH;
    cfg.garch.alpha0 = 0.5;
    cfg.garch.alpha = {0.1};
    cfg.garch.beta = {0.3};
    const int n = 1000000;
    const auto eps = gen_errors(cfg, n, opt.seed + 90, 0);
    const auto m = moments(eps);
    CompensatedSum lag;
    for (int t = 1; t < n; ++t) {
        lag.add((eps[static_cast<std::size_t>(t)] - m.mean) * (eps[static_cast<std::size_t>(t - 1)] - m.mean));
    }
    const double rho = lag.value() / ((n - 1) * m.variance);
    const double target = cfg.garch.unconditional_variance();
    const double rel = std::abs(m.variance - target) / target;
    const double se = 1.0 / std::sqrt(static_cast<double>(n));
    res.passed = rel <= 0.05 && std::abs(rho) <= 3.0 * se;
    res.detail = "variance " + g6(m.variance) + " (target " + g6(target) + "), lag-1 autocorrelation " +
                 g6(rho) + " (3 SE = " + g6(3.0 * se) + ")";
    return res;
}

CriterionResult c10_q_scaling(const AcceptanceOptions& opt) {
    CriterionResult res{10, "stabilizing exponent of off-diagonal Q_T(1) estimated with stderr <= 0.15", true, ""};
    std::map<int, std::vector<double>> samples;
    const KernelSpec K = make_kernel(KernelFamily::Exponential);
    const double s_grid[] = {1.0};
    const double xi_grid[] = {kXi};
    for (int T : {100, 200, 400, 800}) {
        auto& v = samples[T];
        v.resize(500);
        const ChangeModel model = null_model(T);
        for_each_replicate(500, opt.threads, [&](int r) {
            const auto path = gen_path(model, gaussian_errors(1.0), opt.seed + 100 + static_cast<std::uint64_t>(T),
                                       static_cast<std::uint64_t>(r));
            v[static_cast<std::size_t>(r)] = decompose(path.Y, K, CvConfig{kGamma, kS0, T}, s_grid, xi_grid).Q_off(0, 0);
        });
    }
    const auto fit = scaling_fit(samples);
    res.passed = fit.std_error <= 0.15;
    const bool agrees = std::abs(fit.kappa - 2.0) <= 2.0 * fit.std_error;
    res.detail = "kappa_hat " + fmt("%.4f", fit.kappa) + " stderr " + fmt("%.4f", fit.std_error) +
                 "; rate 2 " + (agrees ? "consistent" : "not consistent") + " with the estimate";
    return res;
}

CriterionResult c11_contracts(const AcceptanceOptions& opt) {
    CriterionResult res{11, "previsibility, tie-breaking, adaptedness, identities, reproducibility", true, ""};
    std::ostringstream detail;
    const KernelSpec K = make_kernel(KernelFamily::Exponential);
    const int T = 100;
    const auto path = gen_path(null_model(T, 1.0), gaussian_errors(1.0), opt.seed + 110, 0);

    // Changing Y_k (and later values) leaves predictions at indices <= k unchanged.
    const Predictor pred(K, kGamma, T, T / kXi);
    bool previsible = true;
    for (int k : {20, 45, 77, 100}) {
        auto mutated = path.Y;
        for (int j = k; j <= T; ++j) mutated[static_cast<std::size_t>(j - 1)] += 1e3 * (j + 1);
        for (int i = index_floor(T, kS0); i <= k; ++i) {
            if (pred(path.Y, i) != pred(mutated, i)) previsible = false;
        }
        const double before = pred(path.Y, std::min(k + 1, T));
        if (k < T && before == pred(mutated, k + 1)) previsible = false;  // the mutation must be visible later
    }
    detail << "previsible=" << previsible << "; ";

    const double tie_vals[] = {1.0, -2.0, 3.0, -2.0, -2.0};
    const double tie_xi[] = {40.0, 5.0, 1.0, 2.0, 20.0};
    const bool ties = argmin_grid(tie_vals, tie_xi) == 2.0;
    detail << "smallest-minimizer=" << ties << "; ";

    const std::vector<double> checkpoints{0.3, 0.5, 0.7, 0.9};
    const std::vector<double> xi_grid{2.0, 5.0, 10.0, 20.0, 40.0};
    const CvConfig cfg{kGamma, kS0, T};
    const auto base = bandwidth_path(path.Y, K, cfg, checkpoints, xi_grid);
    bool adapted = true;
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        auto mutated = path.Y;
        for (int j = index_floor(T, checkpoints[k]) + 1; j <= T; ++j) {
            mutated[static_cast<std::size_t>(j - 1)] = -mutated[static_cast<std::size_t>(j - 1)] * 7.0;
        }
        const auto other = bandwidth_path(mutated, K, cfg, checkpoints, xi_grid);
        for (std::size_t m = 0; m <= k; ++m) adapted = adapted && other.xi_star[m] == base.xi_star[m];
    }
    detail << "adapted=" << adapted << "; ";

    const std::vector<double> s_grid{0.25, 0.5, 0.75, 1.0};
    const auto ev = decompose(path.Y, K, cfg, s_grid, xi_grid);
    double id_gap = 0.0;
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        for (std::size_t j = 0; j < xi_grid.size(); ++j) {
            id_gap = std::max(id_gap, std::abs(ev.C(i, j) - (ev.L(i, j) + ev.Q(i, j))));
            id_gap = std::max(id_gap, std::abs(ev.CV(i, j) - (ev.sum_y2[i] + ev.C(i, j))));
            id_gap = std::max(id_gap, std::abs(ev.CV(i, j) - cv_criterion(path.Y, K, cfg, s_grid[i], xi_grid[j])));
        }
    }
    const bool identities = id_gap <= 1e-12;
    detail << "identity gap=" << g6(id_gap) << "; ";

    ExperimentConfig ec;
    ec.model = null_model(120);
    ec.model.delta = PiecewiseFn::step(0.5, 0.0, 1.0);
    ec.run.reps = 12;
    ec.run.seed = opt.seed + 111;
    ec.cv.xi_grid = xi_grid;
    ec.cv.s_grid = s_grid;
    ec.limit.grid = limit_config(200, 1.0);
    bool reproducible = true;
    for (Task task : {Task::FiniteTCv, Task::LimitL, Task::Detector}) {
        std::ostringstream one, four, again;
        write_csv(run_mc(ec, task, 1), one);
        write_csv(run_mc(ec, task, 4), four);
        write_csv(run_mc(ec, task, 1), again);
        reproducible = reproducible && one.str() == four.str() && one.str() == again.str();
    }
    detail << "bitwise reproducible=" << reproducible;

    res.passed = previsible && ties && adapted && identities && reproducible;
    res.detail = detail.str();
    return res;
}

}  // namespace

std::vector<int> criterion_ids() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}; }

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
    switch (id) {
        case 1: return c01_koksma(options);
        case 2: return c02_riemann(options);
        case 3: return c03_cv_oracle(options);
        case 4: return c04_drift(options);
        case 5: return c05_fclt(options);
        case 6: return c06_isometry(options);
        case 7: return c07_anscombe(options);
        case 8: return c08_random_horizon(options);
        case 9: return c09_garch(options);
        case 10: return c10_q_scaling(options);
        case 11: return c11_contracts(options);
        default: throw Error(ErrorCode::Configuration, "no acceptance criterion " + std::to_string(id));
    }
}

std::string format_result(const CriterionResult& result) {
    char id[8];
    std::snprintf(id, sizeof id, "%02d", result.id);
    return std::string(result.passed ? "[PASS] " : "[FAIL] ") + id + " " + result.name + ": " + result.detail;
}

}  // namespace seqcv
