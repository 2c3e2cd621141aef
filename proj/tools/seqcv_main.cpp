#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seqcv/acceptance.hpp"
#include "seqcv/config.hpp"
#include "seqcv/error.hpp"
#include "seqcv/harness.hpp"

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<int> threads;
    std::string out;
    bool json = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "INI configuration file");
    sub->add_option("--seed", c.seed, "base seed (overrides [run] seed)");
    sub->add_option("--reps", c.reps, "replications (overrides [run] reps)");
    sub->add_option("--threads", c.threads, "worker threads (overrides [run] threads)");
    sub->add_option("--out", c.out, "output CSV path (default: stdout)");
    sub->add_flag("--json", c.json, "also write a JSON mirror (<out>.json, or stdout without --out)");
}

seqcv::ExperimentConfig load(const Common& c) {
    seqcv::ExperimentConfig cfg = c.config_path.empty() ? seqcv::parse_config("") : seqcv::load_config(c.config_path);
    if (c.seed) cfg.run.seed = *c.seed;
    if (c.reps) cfg.run.reps = *c.reps;
    if (c.threads) cfg.run.threads = *c.threads;
    if (!c.out.empty()) cfg.run.out = c.out;
    return cfg;
}

int emit(const seqcv::SampleTable& table, const seqcv::ExperimentConfig& cfg, bool json) {
    if (cfg.run.out.empty()) {
        if (json) seqcv::write_json(table, std::cout);
        else seqcv::write_csv(table, std::cout);
    } else {
        std::ofstream csv(cfg.run.out);
        if (!csv) throw seqcv::Error(seqcv::ErrorCode::Configuration, "cannot write " + cfg.run.out);
        seqcv::write_csv(table, csv);
        if (json) {
            std::ofstream js(cfg.run.out + ".json");
            seqcv::write_json(table, js);
        }
    }
    if (table.failed_replicates > 0) {
        std::cerr << table.failed_replicates << " of " << table.reps << " replicates failed\n";
        for (const auto& f : table.failures) std::cerr << "  " << f << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential kernel smoothing with cross-validated bandwidths: simulation and checks"};
    app.require_subcommand(1);

    Common generate_opts, monitor_opts, cv_opts, limit_opts, anscombe_opts;

    auto* generate = app.add_subcommand("generate", "simulate observation paths");
    add_common(generate, generate_opts);

    auto* monitor = app.add_subcommand("monitor", "run the first-exit detector");
    add_common(monitor, monitor_opts);
    std::optional<std::string> direction;
    std::optional<double> threshold, monitor_xi;
    bool cv_bandwidth = false;
    monitor->add_option("--direction", direction, "upper | lower")->check(CLI::IsMember({"upper", "lower"}));
    monitor->add_option("--threshold", threshold, "control limit c");
    monitor->add_option("--xi", monitor_xi, "fixed T/h");
    monitor->add_flag("--cv-bandwidth", cv_bandwidth, "use the cross-validated bandwidth path");

    auto* cv = app.add_subcommand("cv", "cross-validation criterion and decomposition");
    add_common(cv, cv_opts);
    std::optional<std::string> xi_grid, checkpoints;
    cv->add_option("--xi-grid", xi_grid, "comma-separated xi values");
    cv->add_option("--checkpoints", checkpoints, "comma-separated checkpoints; emits the bandwidth path");

    auto* limit = app.add_subcommand("limit", "simulate limit objects");
    add_common(limit, limit_opts);
    std::optional<std::string> what;
    std::optional<int> grid_points;
    limit->add_option("--what", what, "B | L | Q | argmin")->check(CLI::IsMember({"B", "L", "Q", "argmin"}));
    limit->add_option("--grid-points", grid_points, "uniform grid size on [0,1]");

    auto* anscombe = app.add_subcommand("anscombe", "random-horizon stopping times");
    add_common(anscombe, anscombe_opts);
    std::optional<std::string> family, a_values;
    bool stopped = false;
    anscombe->add_option("--family", family, "first_passage | dispersion | risk_limit | deterministic_fraction | random_fraction");
    anscombe->add_option("--a-values", a_values, "comma-separated levels a");
    anscombe->add_flag("--stopped-cv", stopped, "emit the randomly stopped CV process instead of tau");

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    std::vector<int> only;
    std::uint64_t verify_seed = seqcv::AcceptanceOptions{}.seed;
    int verify_threads = 1;
    verify->add_option("--only", only, "criterion ids to run");
    verify->add_option("--seed", verify_seed, "base seed");
    verify->add_option("--threads", verify_threads, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) {
            const auto cfg = load(generate_opts);
            return emit(seqcv::run_mc(cfg, seqcv::Task::Generate, cfg.run.threads), cfg, generate_opts.json);
        }
        if (*monitor) {
            auto cfg = load(monitor_opts);
            if (direction) cfg.monitor.cfg.direction = *direction == "upper" ? seqcv::Direction::Upper : seqcv::Direction::Lower;
            if (threshold) cfg.monitor.cfg.threshold = *threshold;
            if (monitor_xi) cfg.monitor.xi = *monitor_xi;
            if (cv_bandwidth) cfg.monitor.cv_bandwidth = true;
            return emit(seqcv::run_mc(cfg, seqcv::Task::Detector, cfg.run.threads), cfg, monitor_opts.json);
        }
        if (*cv) {
            auto cfg = load(cv_opts);
            if (xi_grid) cfg.cv.xi_grid = seqcv::parse_list(*xi_grid);
            if (checkpoints) cfg.cv.checkpoints = seqcv::parse_list(*checkpoints);
            const auto task = cfg.cv.checkpoints.empty() ? seqcv::Task::FiniteTCv : seqcv::Task::BandwidthPath;
            return emit(seqcv::run_mc(cfg, task, cfg.run.threads), cfg, cv_opts.json);
        }
        if (*limit) {
            auto cfg = load(limit_opts);
            if (what) cfg.limit.what = seqcv::limit_quantity_from_name(*what);
            if (grid_points) cfg.limit.grid.grid_points = *grid_points;
            seqcv::Task task = seqcv::Task::LimitL;
            switch (cfg.limit.what) {
                case seqcv::LimitQuantity::B: task = seqcv::Task::LimitB; break;
                case seqcv::LimitQuantity::L: task = seqcv::Task::LimitL; break;
                case seqcv::LimitQuantity::Q: task = seqcv::Task::LimitQ; break;
                case seqcv::LimitQuantity::Argmin: task = seqcv::Task::LimitArgmin; break;
            }
            return emit(seqcv::run_mc(cfg, task, cfg.run.threads), cfg, limit_opts.json);
        }
        if (*anscombe) {
            auto cfg = load(anscombe_opts);
            if (family) cfg.anscombe.family.kind = seqcv::stop_kind_from_name(*family);
            if (a_values) cfg.anscombe.a_values = seqcv::parse_list(*a_values);
            const auto task = stopped ? seqcv::Task::StoppedCv : seqcv::Task::StopTimes;
            return emit(seqcv::run_mc(cfg, task, cfg.run.threads), cfg, anscombe_opts.json);
        }
        if (*verify) {
            const seqcv::AcceptanceOptions opts{verify_seed, verify_threads};
            const auto ids = only.empty() ? seqcv::criterion_ids() : only;
            bool all = true;
            for (int id : ids) {
                const auto res = seqcv::run_criterion(id, opts);
                std::cout << seqcv::format_result(res) << std::endl;
                all = all && res.passed;
            }
            return all ? 0 : 1;
        }
    } catch (const seqcv::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
