#include "seqcv/anscombe.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "seqcv/error.hpp"
#include "seqcv/numeric.hpp"
#include "seqcv/rng.hpp"

namespace seqcv {
namespace {

std::function<double()> gaussian_stream(const IncrementSpec& inc, Rng& rng) {
    return [&rng, inc, normal = std::normal_distribution<double>(0.0, 1.0)]() mutable {
        return inc.sd == 0.0 ? inc.mean : inc.mean + inc.sd * normal(rng);
    };
}

void check_level(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorCode::Validation, "a must be positive");
}

}  // namespace

FirstPassage first_passage_tau(const std::function<double()>& next, double a, long cap) {
    check_level(a);
    double sum = 0.0;
    for (long n = 1; n <= cap; ++n) {
        const double before = sum;
        sum += next();
        if (sum > a) return {static_cast<int>(n), sum, before};
    }
    throw Error(ErrorCode::Nontermination,
                "first passage not reached within " + std::to_string(cap) + " steps");
}

FirstPassage first_passage_tau(const IncrementSpec& inc, double a, std::uint64_t seed,
                               std::uint64_t replicate) {
    check_level(a);
    if (inc.mean == 0.0) throw Error(ErrorCode::Nontermination, "zero drift never passes the level");
    Rng rng = make_rng(seed, replicate, StreamTag::Stopping);
    const long cap = static_cast<long>(std::ceil(100.0 * a / std::abs(inc.mean)));
    return first_passage_tau(gaussian_stream(inc, rng), a, cap);
}

int dispersion_tau(const std::function<double()>& next, double c0, double a, long cap,
                   std::optional<double> known_sigma) {
    check_level(a);
    if (!(c0 > 0.0)) throw Error(ErrorCode::Validation, "c0 must be positive");
    // Welford running variance.
    double mean = 0.0;
    double m2 = 0.0;
    for (long n = 1; n <= cap; ++n) {
        const double x = next();
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
        if (n < 2) continue;
        const double var = known_sigma ? (*known_sigma) * (*known_sigma) : m2 / (n - 1);
        if (var * a <= c0 * c0 * n) return static_cast<int>(n);
    }
    throw Error(ErrorCode::Nontermination,
                "dispersion target not reached within " + std::to_string(cap) + " steps");
}

int dispersion_tau(const IncrementSpec& inc, double c0, double a, std::uint64_t seed,
                   std::uint64_t replicate, std::optional<double> known_sigma) {
    check_level(a);
    if (!(c0 > 0.0)) throw Error(ErrorCode::Validation, "c0 must be positive");
    Rng rng = make_rng(seed, replicate, StreamTag::Stopping);
    const double sigma = known_sigma ? *known_sigma : inc.sd;
    const long cap = std::max(2L, static_cast<long>(std::ceil(100.0 * a * sigma * sigma / (c0 * c0))));
    return dispersion_tau(gaussian_stream(inc, rng), c0, a, cap, known_sigma);
}

std::optional<int> risk_limit_tau(std::span<const double> risk, double r_bar,
                                  std::optional<int> cap) {
    if (risk.empty()) throw Error(ErrorCode::Validation, "risk path is empty");
    std::size_t limit = risk.size();
    if (cap) limit = std::min(limit, static_cast<std::size_t>(std::max(*cap, 0)));
    for (std::size_t n = 0; n < limit; ++n) {
        if (risk[n] > r_bar) return static_cast<int>(n + 1);
    }
    return std::nullopt;
}

std::vector<double> running_std(std::span<const double> x) {
    std::vector<double> r(x.size(), 0.0);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double d = x[i] - mean;
        mean += d / n;
        m2 += d * (x[i] - mean);
        r[i] = i == 0 ? 0.0 : std::sqrt(m2 / (n - 1.0));
    }
    return r;
}

double calibrate_risk_limit(const ErrorConfig& errors, int T_prime, int reps, std::uint64_t seed,
                            double level) {
    if (reps < 1) throw Error(ErrorCode::Validation, "reps must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::Validation, "level must lie in (0, 1)");
    const std::uint64_t base = stream_seed(seed, 0, StreamTag::Calibration);
    std::vector<double> peaks;
    peaks.reserve(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        const auto risk = running_std(gen_errors(errors, T_prime, base, static_cast<std::uint64_t>(r)));
        peaks.push_back(*std::max_element(risk.begin(), risk.end()));
    }
    std::sort(peaks.begin(), peaks.end());
    const double pos = level * static_cast<double>(peaks.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, peaks.size() - 1);
    return peaks[lo] + (pos - static_cast<double>(lo)) * (peaks[hi] - peaks[lo]);
}

TimeChange TimeChange::from_level(int tau, double a) {
    check_level(a);
    if (tau < 1) throw Error(ErrorCode::Validation, "tau must be >= 1");
    return {tau, static_cast<int>(std::ceil(a - 1e-9))};
}

std::optional<double> stopped_cv(std::span<const double> Y, const TimeChange& change,
                                 const KernelSpec& kernel, const CvConfig& cfg, double s,
                                 double xi) {
    if (change.tau > change.T_prime) {
        throw Error(ErrorCode::Unsupported, "tau beyond the embedding horizon (lambda > 1)");
    }
    if (cfg.T != change.T_prime) throw Error(ErrorCode::Configuration, "cfg.T must equal T'");
    if (s < cfg.s0 || s > 1.0) throw Error(ErrorCode::Domain, "s must lie in [s0, 1]");
    if (Y.size() < static_cast<std::size_t>(change.T_prime)) {
        throw Error(ErrorCode::Index, "data shorter than the embedding horizon");
    }
    const double phi = change.phi(s);
    if (phi < cfg.s0) return std::nullopt;
    const double s_grid[] = {phi};
    const double xi_grid[] = {xi};
    const auto ev = decompose(Y.first(static_cast<std::size_t>(change.T_prime)), kernel, cfg,
                              s_grid, xi_grid);
    return ev.scaled_C(0, 0);
}

void StopFamily::validate() const {
    switch (kind) {
        case StopKind::FirstPassage:
        case StopKind::Dispersion:
            if (!(increments.sd >= 0.0)) throw Error(ErrorCode::Validation, "increment sd must be >= 0");
            if (kind == StopKind::Dispersion && !(c0 > 0.0)) {
                throw Error(ErrorCode::Validation, "c0 must be positive");
            }
            break;
        case StopKind::RiskLimit:
            risk_errors.validate();
            break;
        case StopKind::DeterministicFraction:
            if (!(fraction > 0.0 && fraction <= 1.0)) {
                throw Error(ErrorCode::Validation, "fraction must lie in (0, 1]");
            }
            break;
        case StopKind::RandomFraction:
            break;
    }
    if (lambda_expected && !(*lambda_expected > 0.0)) {
        throw Error(ErrorCode::Validation, "lambda_expected must be positive");
    }
}

StopKind stop_kind_from_name(const std::string& name) {
    if (name == "first_passage") return StopKind::FirstPassage;
    if (name == "dispersion") return StopKind::Dispersion;
    if (name == "risk_limit") return StopKind::RiskLimit;
    if (name == "deterministic_fraction") return StopKind::DeterministicFraction;
    if (name == "random_fraction") return StopKind::RandomFraction;
    throw Error(ErrorCode::Configuration, "unknown stopping family '" + name + "'");
}

std::string stop_kind_name(StopKind kind) {
    switch (kind) {
        case StopKind::FirstPassage: return "first_passage";
        case StopKind::Dispersion: return "dispersion";
        case StopKind::RiskLimit: return "risk_limit";
        case StopKind::DeterministicFraction: return "deterministic_fraction";
        case StopKind::RandomFraction: return "random_fraction";
    }
    return "unknown";
}

std::optional<int> realize_tau(const StopFamily& family, double a, std::uint64_t seed,
                               std::uint64_t replicate) {
    family.validate();
    check_level(a);
    switch (family.kind) {
        case StopKind::FirstPassage:
            return first_passage_tau(family.increments, a, seed, replicate).tau;
        case StopKind::Dispersion:
            return dispersion_tau(family.increments, family.c0, a, seed, replicate,
                                  family.known_sigma);
        case StopKind::RiskLimit: {
            const int T_prime = static_cast<int>(std::ceil(a - 1e-9));
            const auto eps = gen_errors(family.risk_errors, T_prime, seed, replicate);
            return risk_limit_tau(running_std(eps), family.r_bar, T_prime);
        }
        case StopKind::DeterministicFraction:
            return std::max(1, static_cast<int>(std::floor(family.fraction * a + 1e-9)));
        case StopKind::RandomFraction: {
            Rng rng = make_rng(seed, replicate, StreamTag::Stopping);
            const double u = std::bernoulli_distribution(0.5)(rng) ? 1.0 : 0.5;
            return std::max(1, static_cast<int>(std::floor(u * a + 1e-9)));
        }
    }
    return std::nullopt;
}

std::vector<TauSample> tau_samples(const StopFamily& family, std::span<const double> a_values,
                                   int reps, std::uint64_t seed) {
    if (reps < 1) throw Error(ErrorCode::Validation, "reps must be >= 1");
    std::vector<TauSample> out;
    out.reserve(a_values.size() * static_cast<std::size_t>(reps));
    for (double a : a_values) {
        for (int r = 0; r < reps; ++r) {
            TauSample row{a, static_cast<std::uint64_t>(r), std::nullopt, false};
            try {
                row.tau = realize_tau(family, a, seed, row.replicate);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::Nontermination) throw;
                row.failed = true;
            }
            out.push_back(row);
        }
    }
    return out;
}

std::vector<LambdaRow> lambda_diagnostic(const StopFamily& family,
                                         std::span<const double> a_values, int reps,
                                         std::uint64_t seed) {
    const auto samples = tau_samples(family, a_values, reps, seed);
    std::vector<LambdaRow> rows;
    for (double a : a_values) {
        LambdaRow row;
        row.a = a;
        double mean = 0.0;
        double m2 = 0.0;
        for (const auto& smp : samples) {
            if (smp.a != a) continue;
            if (smp.failed) {
                ++row.failures;
                continue;
            }
            if (!smp.tau) {
                ++row.censored;
                continue;
            }
            const double ratio = *smp.tau / a;
            ++row.effective;
            const double d = ratio - mean;
            mean += d / row.effective;
            m2 += d * (ratio - mean);
        }
        row.mean_ratio = row.effective > 0 ? mean : std::nan("");
        row.std_ratio = row.effective > 1 ? std::sqrt(m2 / (row.effective - 1)) : std::nan("");
        rows.push_back(row);
    }
    return rows;
}

}  // namespace seqcv
