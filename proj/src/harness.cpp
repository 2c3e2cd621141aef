#include "seqcv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "seqcv/error.hpp"
#include "seqcv/numeric.hpp"

namespace seqcv {
namespace {

using Rows = std::vector<std::vector<Cell>>;

std::vector<std::string> columns_for(Task task) {
    switch (task) {
        case Task::Generate: return {"replicate", "n", "x", "mean", "eps", "Y"};
        case Task::FiniteTCv: return {"replicate", "s", "xi", "CV", "L", "Q", "C", "T_C", "Q_off"};
        case Task::BandwidthPath: return {"replicate", "s", "xi_star"};
        case Task::LimitB:
        case Task::LimitL:
        case Task::LimitQ: return {"replicate", "s", "value"};
        case Task::LimitArgmin: return {"replicate", "s", "xi"};
        case Task::StoppedCv: return {"replicate", "a", "tau", "s", "phi", "T_C"};
        case Task::Detector: return {"replicate", "signal_index", "signaled"};
        case Task::StopTimes: return {"family", "a", "replicate", "tau", "ratio"};
    }
    return {};
}

CvConfig cv_config(const ExperimentConfig& c, int T) { return {c.gamma(), c.s0(), T}; }

Cell cell(int v) { return static_cast<long long>(v); }
Cell cell(double v) { return v; }

std::string format_double(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Rows replicate_rows(const ExperimentConfig& c, Task task, int r, const QLimitSimulator* qsim) {
    const auto rep = static_cast<std::uint64_t>(r);
    const std::uint64_t seed = c.run.seed;
    Rows rows;
    switch (task) {
        case Task::Generate: {
            const auto path = gen_path(c.model, c.errors, seed, rep);
            for (int n = 1; n <= path.T(); ++n) {
                const auto k = static_cast<std::size_t>(n - 1);
                rows.push_back({cell(r), cell(n), cell(c.model.design_point(n)), cell(path.mean[k]),
                                cell(path.eps[k]), cell(path.Y[k])});
            }
            break;
        }
        case Task::FiniteTCv: {
            const auto path = gen_path(c.model, c.errors, seed, rep);
            const auto ev = decompose(path.Y, c.kernel, cv_config(c, c.model.T), c.cv.s_grid, c.cv.xi_grid);
            for (std::size_t i = 0; i < ev.s_grid.size(); ++i) {
                for (std::size_t j = 0; j < ev.xi_grid.size(); ++j) {
                    rows.push_back({cell(r), cell(ev.s_grid[i]), cell(ev.xi_grid[j]), cell(ev.CV(i, j)),
                                    cell(ev.L(i, j)), cell(ev.Q(i, j)), cell(ev.C(i, j)),
                                    cell(ev.scaled_C(i, j)), cell(ev.Q_off(i, j))});
                }
            }
            break;
        }
        case Task::BandwidthPath: {
            const auto path = gen_path(c.model, c.errors, seed, rep);
            const auto bp = bandwidth_path(path.Y, c.kernel, cv_config(c, c.model.T), c.cv.checkpoints,
                                           c.cv.xi_grid);
            for (std::size_t k = 0; k < bp.checkpoints.size(); ++k) {
                rows.push_back({cell(r), cell(bp.checkpoints[k]), cell(bp.xi_star[k])});
            }
            break;
        }
        case Task::LimitB: {
            const auto B = simulate_B(c.limit.grid, seed, rep);
            for (double s : c.limit.s_points) {
                rows.push_back({cell(r), cell(s), cell(B[static_cast<std::size_t>(index_floor(c.limit.grid.grid_points, s))])});
            }
            break;
        }
        case Task::LimitL: {
            const auto path = simulate_L(c.kernel, c.limit.grid, seed, rep);
            for (double s : c.limit.s_points) rows.push_back({cell(r), cell(s), cell(path.L_at(s))});
            break;
        }
        case Task::LimitQ: {
            const auto q = qsim->sample(seed, rep);
            for (std::size_t i = 0; i < q.size(); ++i) {
                rows.push_back({cell(r), cell(c.limit.s_points[i]), cell(q[i])});
            }
            break;
        }
        case Task::LimitArgmin: {
            for (double s : c.limit.s_points) {
                rows.push_back({cell(r), cell(s), cell(argmin_limit(c.kernel, c.limit.grid, c.limit.xi_grid, seed, rep, s))});
            }
            break;
        }
        case Task::StoppedCv: {
            for (double a : c.anscombe.a_values) {
                const auto tau = realize_tau(c.anscombe.family, a, seed, rep);
                if (!tau) {
                    for (double s : c.cv.s_grid) {
                        rows.push_back({cell(r), cell(a), Cell{}, cell(s), Cell{}, Cell{}});
                    }
                    continue;
                }
                const auto change = TimeChange::from_level(*tau, a);
                ChangeModel model = c.model;
                model.T = change.T_prime;
                const auto path = gen_path(model, c.errors, seed, rep);
                for (double s : c.cv.s_grid) {
                    const auto v = stopped_cv(path.Y, change, c.kernel, cv_config(c, change.T_prime), s,
                                              c.monitor.xi);
                    rows.push_back({cell(r), cell(a), cell(*tau), cell(s), cell(change.phi(s)),
                                    v ? cell(*v) : Cell{}});
                }
            }
            break;
        }
        case Task::Detector: {
            const auto path = gen_path(c.model, c.errors, seed, rep);
            Bandwidth bw = FixedXi{c.monitor.xi};
            if (c.monitor.cv_bandwidth) {
                bw = bandwidth_path(path.Y, c.kernel, cv_config(c, c.model.T), c.cv.checkpoints, c.cv.xi_grid);
            }
            const auto res = run_detector(path.Y, c.kernel, c.monitor.cfg, bw);
            rows.push_back({cell(r), res.signal_index ? cell(*res.signal_index) : Cell{},
                            cell(res.signaled() ? 1 : 0)});
            break;
        }
        case Task::StopTimes: {
            const std::string name = stop_kind_name(c.anscombe.family.kind);
            for (double a : c.anscombe.a_values) {
                const auto tau = realize_tau(c.anscombe.family, a, seed, rep);
                rows.push_back({name, cell(a), cell(r), tau ? cell(*tau) : Cell{},
                                tau ? cell(*tau / a) : Cell{}});
            }
            break;
        }
    }
    return rows;
}

}  // namespace

std::size_t SampleTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error(ErrorCode::Configuration, "no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> SampleTable::values(const std::string& name) const {
    const std::size_t k = column(name);
    std::vector<double> out;
    for (const auto& row : rows) {
        if (const auto* d = std::get_if<double>(&row[k])) out.push_back(*d);
        else if (const auto* i = std::get_if<long long>(&row[k])) out.push_back(static_cast<double>(*i));
    }
    return out;
}

void for_each_replicate(int reps, int threads, const std::function<void(int)>& fn) {
    const int workers = std::max(1, std::min(threads, reps));
    if (workers == 1) {
        for (int r = 0; r < reps; ++r) fn(r);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int r = next++; r < reps; r = next++) {
                try {
                    fn(r);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

SampleTable run_mc(const ExperimentConfig& config, Task task, int threads) {
    config.validate();
    SampleTable table;
    table.columns = columns_for(task);
    table.reps = config.run.reps;

    std::optional<QLimitSimulator> qsim;
    if (task == Task::LimitQ) qsim.emplace(config.kernel, config.limit.grid, config.limit.s_points);

    std::vector<Rows> slots(static_cast<std::size_t>(config.run.reps));
    std::vector<std::string> errors(slots.size());
    for_each_replicate(config.run.reps, threads, [&](int r) {
        try {
            slots[static_cast<std::size_t>(r)] = replicate_rows(config, task, r, qsim ? &*qsim : nullptr);
        } catch (const Error& e) {
            errors[static_cast<std::size_t>(r)] = e.what();
        }
    });
    for (std::size_t r = 0; r < slots.size(); ++r) {
        if (!errors[r].empty()) {
            ++table.failed_replicates;
            table.failures.push_back("replicate " + std::to_string(r) + ": " + errors[r]);
            continue;
        }
        for (auto& row : slots[r]) table.rows.push_back(std::move(row));
    }
    return table;
}

void write_csv(const SampleTable& table, std::ostream& out) {
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
        out << (k ? "," : "") << table.columns[k];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out << ',';
            std::visit(
                [&out](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) out << format_double(v);
                    else if constexpr (std::is_same_v<V, long long>) out << v;
                    else if constexpr (std::is_same_v<V, std::string>) out << v;
                },
                row[k]);
        }
        out << '\n';
    }
}

void write_json(const SampleTable& table, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["columns"] = table.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        auto jrow = nlohmann::ordered_json::array();
        for (const auto& c : row) {
            std::visit(
                [&jrow](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, std::monostate>) jrow.push_back(nullptr);
                    else if constexpr (std::is_same_v<V, double>) {
                        if (std::isfinite(v)) jrow.push_back(v);
                        else jrow.push_back(nullptr);
                    } else jrow.push_back(v);
                },
                c);
        }
        rows.push_back(std::move(jrow));
    }
    doc["rows"] = std::move(rows);
    doc["reps"] = table.reps;
    doc["failed_replicates"] = table.failed_replicates;
    doc["failures"] = table.failures;
    out << doc.dump(1) << '\n';
}

double ks_two_sample(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw Error(ErrorCode::Domain, "KS needs two nonempty samples");
    std::vector<double> a(x.begin(), x.end());
    std::vector<double> b(y.begin(), y.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == t) ++i;
        while (j < b.size() && b[j] == t) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

Moments moments(std::span<const double> x) {
    Moments m;
    m.n = x.size();
    if (x.empty()) throw Error(ErrorCode::Domain, "moments of an empty sample");
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - mean;
        mean += d / static_cast<double>(k + 1);
        m2 += d * (x[k] - mean);
    }
    m.mean = mean;
    m.variance = x.size() > 1 ? m2 / static_cast<double>(x.size() - 1) : 0.0;
    m.se_mean = std::sqrt(m.variance / static_cast<double>(x.size()));
    return m;
}

double quantile(std::span<const double> x, double p) {
    if (x.empty()) throw Error(ErrorCode::Domain, "quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::Domain, "quantile level outside [0, 1]");
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double iqr(std::span<const double> x) { return quantile(x, 0.75) - quantile(x, 0.25); }

ScalingFit scaling_fit(const std::map<int, std::vector<double>>& samples) {
    if (samples.size() < 3) throw Error(ErrorCode::Diagnostics, "scaling fit needs at least 3 horizons");
    std::vector<double> lx;
    std::vector<double> ly;
    for (const auto& [T, vals] : samples) {
        if (T < 1) throw Error(ErrorCode::Diagnostics, "horizons must be positive");
        if (vals.size() < 200) throw Error(ErrorCode::Diagnostics, "scaling fit needs >= 200 values per horizon");
        const double spread = iqr(vals);
        if (!(spread > 0.0)) {
            throw Error(ErrorCode::Diagnostics, "zero interquartile range at T = " + std::to_string(T));
        }
        lx.push_back(std::log(static_cast<double>(T)));
        ly.push_back(std::log(spread));
    }
    const double m = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ssr = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        const double e = ly[k] - intercept - slope * lx[k];
        ssr += e * e;
    }
    ScalingFit fit;
    fit.kappa = -slope;
    fit.std_error = std::sqrt(ssr / (m - 2.0) / sxx);
    fit.intercept = intercept;
    return fit;
}

}  // namespace seqcv
