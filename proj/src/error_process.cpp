#include "seqcv/error_process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "seqcv/error.hpp"
#include "seqcv/rng.hpp"

namespace seqcv {
namespace {

class InnovationSource {
public:
    InnovationSource(const ErrorConfig& cfg, Rng& rng)
        : rng_(rng), kind_(cfg.innovation), student_(cfg.df),
          t_scale_(std::sqrt((cfg.df - 2.0) / cfg.df)) {}

    // Mean zero, unit variance.
    double operator()() {
        if (kind_ == Innovation::Gaussian) return normal_(rng_);
        return t_scale_ * student_(rng_);
    }

private:
    Rng& rng_;
    Innovation kind_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::student_t_distribution<double> student_;
    double t_scale_;
};

}  // namespace

double GarchParams::persistence() const {
    return std::accumulate(alpha.begin(), alpha.end(), 0.0) +
           std::accumulate(beta.begin(), beta.end(), 0.0);
}

double GarchParams::unconditional_variance() const { return alpha0 / (1.0 - persistence()); }

void ErrorConfig::validate() const {
    if (burn_in < 0) throw Error(ErrorCode::Validation, "burn_in must be >= 0");
    if (innovation == Innovation::StudentT && !(df > 8.0)) {
        throw Error(ErrorCode::Validation, "Student-t innovations need df > 8 (finite 8th moment)");
    }
    switch (kind) {
        case NoiseKind::IID:
        case NoiseKind::MA:
            if (!(sigma >= 0.0)) throw Error(ErrorCode::Validation, "sigma must be >= 0");
            break;
        case NoiseKind::GARCH:
            if (!(garch.alpha0 > 0.0)) throw Error(ErrorCode::Validation, "GARCH alpha0 must be > 0");
            for (double a : garch.alpha) {
                if (!(a >= 0.0)) throw Error(ErrorCode::Validation, "GARCH alpha_j must be >= 0");
            }
            for (double b : garch.beta) {
                if (!(b >= 0.0)) throw Error(ErrorCode::Validation, "GARCH beta_j must be >= 0");
            }
            if (!garch.alpha.empty() && garch.alpha.back() == 0.0) {
                throw Error(ErrorCode::Validation, "last GARCH alpha must be nonzero");
            }
            if (!garch.beta.empty() && garch.beta.back() == 0.0) {
                throw Error(ErrorCode::Validation, "last GARCH beta must be nonzero");
            }
            if (!(garch.persistence() < 1.0)) {
                throw Error(ErrorCode::Validation, "GARCH requires sum(alpha) + sum(beta) < 1");
            }
            break;
    }
}

std::vector<double> gen_errors(const ErrorConfig& cfg, int T, std::uint64_t seed,
                               std::uint64_t replicate) {
    cfg.validate();
    if (T < 1) throw Error(ErrorCode::Validation, "T must be >= 1");
    Rng rng = make_rng(seed, replicate, StreamTag::Errors);
    InnovationSource z(cfg, rng);

    const std::size_t total = static_cast<std::size_t>(cfg.burn_in) + static_cast<std::size_t>(T);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(T));

    switch (cfg.kind) {
        case NoiseKind::IID:
            for (std::size_t t = 0; t < total; ++t) {
                const double e = cfg.sigma * z();
                if (t >= static_cast<std::size_t>(cfg.burn_in)) out.push_back(e);
            }
            break;
        case NoiseKind::GARCH: {
            const auto& g = cfg.garch;
            const std::size_t p = g.alpha.size();
            const std::size_t q = g.beta.size();
            const double v0 = g.unconditional_variance();
            // Circular histories, most recent first; seeded at the unconditional variance.
            std::vector<double> eps2(std::max<std::size_t>(p, 1), v0);
            std::vector<double> sig2(std::max<std::size_t>(q, 1), v0);
            for (std::size_t t = 0; t < total; ++t) {
                double s2 = g.alpha0;
                for (std::size_t j = 0; j < p; ++j) s2 += g.alpha[j] * eps2[j];
                for (std::size_t j = 0; j < q; ++j) s2 += g.beta[j] * sig2[j];
                const double e = std::sqrt(s2) * z();
                if (p > 0) {
                    std::rotate(eps2.rbegin(), eps2.rbegin() + 1, eps2.rend());
                    eps2[0] = e * e;
                }
                if (q > 0) {
                    std::rotate(sig2.rbegin(), sig2.rbegin() + 1, sig2.rend());
                    sig2[0] = s2;
                }
                if (t >= static_cast<std::size_t>(cfg.burn_in)) out.push_back(e);
            }
            break;
        }
        case NoiseKind::MA: {
            const std::size_t q = cfg.ma.size();
            std::vector<double> past(q, 0.0);
            for (std::size_t k = 0; k < q; ++k) past[k] = z();
            for (std::size_t t = 0; t < total; ++t) {
                const double zt = z();
                double e = zt;
                for (std::size_t k = 0; k < q; ++k) e += cfg.ma[k] * past[k];
                if (q > 0) {
                    std::rotate(past.rbegin(), past.rbegin() + 1, past.rend());
                    past[0] = zt;
                }
                if (t >= static_cast<std::size_t>(cfg.burn_in)) out.push_back(cfg.sigma * e);
            }
            break;
        }
    }
    return out;
}

SamplePath gen_path(const ChangeModel& model, const ErrorConfig& cfg, std::uint64_t seed,
                    std::uint64_t replicate) {
    if (model.T < 1) throw Error(ErrorCode::Validation, "T must be >= 1");
    SamplePath path;
    path.eps = gen_errors(cfg, model.T, seed, replicate);
    path.seed = seed;
    path.replicate = replicate;
    path.martingale_difference = cfg.martingale_difference();
    path.mean.resize(static_cast<std::size_t>(model.T));
    path.Y.resize(static_cast<std::size_t>(model.T));
    for (int n = 1; n <= model.T; ++n) {
        const auto k = static_cast<std::size_t>(n - 1);
        path.mean[k] = mean_at(model, n);
        path.Y[k] = path.mean[k] + path.eps[k];
    }
    return path;
}

}  // namespace seqcv
