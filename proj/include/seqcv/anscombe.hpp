#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqcv/crossval.hpp"
#include "seqcv/error_process.hpp"
#include "seqcv/kernel.hpp"

namespace seqcv {

/// Gaussian increments N(mean, sd^2); sd == 0 gives the constant sequence.
struct IncrementSpec {
    double mean = 1.0;
    double sd = 1.0;
};

struct FirstPassage {
    int tau = 0;
    double sum_at_tau = 0.0;  ///< S_tau > a
    double sum_before = 0.0;  ///< S_{tau-1} <= a
};

/// First n with S_n = X_1 + ... + X_n > a, drawing at most cap increments.
FirstPassage first_passage_tau(const std::function<double()>& next, double a, long cap);

/// Increments from the stopping stream of (seed, replicate); cap = 100 a / |mean|.
FirstPassage first_passage_tau(const IncrementSpec& inc, double a, std::uint64_t seed,
                               std::uint64_t replicate);

/// First n >= 2 with sd_n / sqrt(n) <= c0 / sqrt(a), where sd_n is the running sample
/// standard deviation, or known_sigma when given.
int dispersion_tau(const std::function<double()>& next, double c0, double a, long cap,
                   std::optional<double> known_sigma = std::nullopt);

/// Stream from the stopping stream of (seed, replicate); cap = max(2, 100 a sd^2 / c0^2).
int dispersion_tau(const IncrementSpec& inc, double c0, double a, std::uint64_t seed,
                   std::uint64_t replicate, std::optional<double> known_sigma = std::nullopt);

/// First 1-based n <= cap with risk[n-1] > r_bar; empty when no exceedance occurs.
std::optional<int> risk_limit_tau(std::span<const double> risk, double r_bar,
                                  std::optional<int> cap = std::nullopt);

/// r_n = sample standard deviation of x_1..x_n (r_1 = 0).
std::vector<double> running_std(std::span<const double> x);

/// Level r_bar such that a fraction `level` of calibration paths never exceeds it:
/// the `level` quantile of max_{n <= T'} r_n over `reps` error paths drawn from the
/// calibration stream of `seed`.
double calibrate_risk_limit(const ErrorConfig& errors, int T_prime, int reps, std::uint64_t seed,
                            double level = 0.5);

/// Embedding of a stopped sample into horizon T' = ceil(a).
struct TimeChange {
    int tau = 1;
    int T_prime = 1;

    static TimeChange from_level(int tau, double a);
    double ratio() const { return static_cast<double>(tau) / T_prime; }
    double phi(double s) const { return ratio() * s; }
};

/// T' C_{T',Phi(s)}(T'/xi) with Phi(s) = (tau/T') s, read from the horizon-T' data Y.
/// cfg.T must equal T'. Empty when Phi(s) < s0; tau > T' is unsupported.
std::optional<double> stopped_cv(std::span<const double> Y, const TimeChange& change,
                                 const KernelSpec& kernel, const CvConfig& cfg, double s,
                                 double xi);

enum class StopKind {
    FirstPassage,           ///< S_n > a with Gaussian increments
    Dispersion,             ///< sample-mean precision reaches c0 / sqrt(a)
    RiskLimit,              ///< running std of an error path exceeds r_bar, capped at ceil(a)
    DeterministicFraction,  ///< floor(fraction a)
    RandomFraction,         ///< floor(U a), U uniform on {0.5, 1}, independent of the data
};

struct StopFamily {
    StopKind kind = StopKind::FirstPassage;
    IncrementSpec increments;            ///< FirstPassage, Dispersion
    double c0 = 1.0;                     ///< Dispersion
    std::optional<double> known_sigma;   ///< Dispersion
    double r_bar = 1.0;                  ///< RiskLimit
    ErrorConfig risk_errors;             ///< RiskLimit
    double fraction = 0.5;               ///< DeterministicFraction
    std::optional<double> lambda_expected;
    std::string description;

    /// Limit ratio is itself random (data-independent).
    bool random_lambda() const { return kind == StopKind::RandomFraction; }
    void validate() const;
};

StopKind stop_kind_from_name(const std::string& name);
std::string stop_kind_name(StopKind kind);

/// One realization of tau_a; empty for a censored risk-limit run.
std::optional<int> realize_tau(const StopFamily& family, double a, std::uint64_t seed,
                               std::uint64_t replicate);

struct TauSample {
    double a = 0.0;
    std::uint64_t replicate = 0;
    std::optional<int> tau;  ///< empty when censored or failed
    bool failed = false;     ///< nontermination
};

std::vector<TauSample> tau_samples(const StopFamily& family, std::span<const double> a_values,
                                   int reps, std::uint64_t seed);

struct LambdaRow {
    double a = 0.0;
    double mean_ratio = 0.0;
    double std_ratio = 0.0;
    int effective = 0;  ///< stopped replicates entering the moments
    int censored = 0;
    int failures = 0;   ///< nontermination errors
};

/// Moments of tau_a / a per a.
std::vector<LambdaRow> lambda_diagnostic(const StopFamily& family,
                                         std::span<const double> a_values, int reps,
                                         std::uint64_t seed);

}  // namespace seqcv
