#include "seqcv/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "seqcv/error.hpp"

namespace seqcv {
namespace {

namespace pt = boost::property_tree;

double to_double(const std::string& raw, const std::string& what) {
    const std::string s = boost::trim_copy(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::Configuration, "cannot parse '" + raw + "' as a number for " + what);
    }
    return v;
}

long long to_int(const std::string& raw, const std::string& what) {
    const std::string s = boost::trim_copy(raw);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::Configuration, "cannot parse '" + raw + "' as an integer for " + what);
    }
    return v;
}

bool to_bool(const std::string& raw, const std::string& what) {
    const std::string s = boost::to_lower_copy(boost::trim_copy(raw));
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw Error(ErrorCode::Configuration, "cannot parse '" + raw + "' as a boolean for " + what);
}

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    boost::split(tokens, text, boost::is_any_of(" \t"), boost::token_compress_on);
    tokens.erase(std::remove(tokens.begin(), tokens.end(), std::string()), tokens.end());
    return tokens;
}

// Reads one section, rejecting unknown keys.
class Section {
public:
    Section(const pt::ptree& root, const std::string& name, std::set<std::string> allowed)
        : name_(name), allowed_(std::move(allowed)) {
        if (auto child = root.get_child_optional(name)) {
            for (const auto& [key, node] : *child) {
                if (!allowed_.count(key)) {
                    throw Error(ErrorCode::Configuration, "unknown key '" + key + "' in [" + name + "]");
                }
                values_[key] = node.get_value<std::string>();
            }
        }
    }

    const std::string* find(const std::string& key) const {
        auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }
    std::string label(const std::string& key) const { return "[" + name_ + "] " + key; }

    void read(const std::string& key, double& out) const {
        if (auto v = find(key)) out = to_double(*v, label(key));
    }
    void read(const std::string& key, int& out) const {
        if (auto v = find(key)) out = static_cast<int>(to_int(*v, label(key)));
    }
    void read(const std::string& key, bool& out) const {
        if (auto v = find(key)) out = to_bool(*v, label(key));
    }
    void read(const std::string& key, std::vector<double>& out) const {
        if (auto v = find(key)) out = parse_list(*v);
    }
    void read(const std::string& key, std::string& out) const {
        if (auto v = find(key)) out = boost::trim_copy(*v);
    }

private:
    std::string name_;
    std::set<std::string> allowed_;
    std::map<std::string, std::string> values_;
};

void check_grid(const std::vector<double>& grid, double lo, const std::string& what) {
    for (double v : grid) {
        if (!(v >= lo && v <= 1.0)) {
            throw Error(ErrorCode::Configuration, what + " values must lie in [s0, 1]");
        }
    }
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
    std::vector<std::string> parts;
    const std::string trimmed = boost::trim_copy(text);
    if (trimmed.empty()) return {};
    boost::split(parts, trimmed, boost::is_any_of(","));
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(to_double(p, "list entry"));
    return out;
}

PiecewiseFn parse_piecewise(const std::string& text) {
    std::vector<std::string> pieces;
    boost::split(pieces, text, boost::is_any_of(";"));
    std::vector<Segment> segments;
    for (const auto& piece : pieces) {
        const auto tok = split_tokens(piece);
        if (tok.empty()) continue;
        if (tok.size() < 2) throw Error(ErrorCode::Configuration, "segment needs 'start kind ...': " + piece);
        Segment seg;
        seg.start = to_double(tok[0], "segment start");
        const std::string kind = boost::to_lower_copy(tok[1]);
        if (kind == "constant") {
            if (tok.size() != 3) throw Error(ErrorCode::Configuration, "constant takes one value: " + piece);
            seg.shape = ConstantSegment{to_double(tok[2], "constant value")};
        } else if (kind == "linear") {
            if (tok.size() != 4) throw Error(ErrorCode::Configuration, "linear takes slope intercept: " + piece);
            seg.shape = LinearSegment{to_double(tok[2], "slope"), to_double(tok[3], "intercept")};
        } else if (kind == "tabulated") {
            TabulatedSegment tab;
            for (std::size_t k = 2; k < tok.size(); ++k) {
                const auto colon = tok[k].find(':');
                if (colon == std::string::npos) {
                    throw Error(ErrorCode::Configuration, "tabulated sample must be x:y, got " + tok[k]);
                }
                tab.x.push_back(to_double(tok[k].substr(0, colon), "tabulated x"));
                tab.y.push_back(to_double(tok[k].substr(colon + 1), "tabulated y"));
            }
            seg.shape = std::move(tab);
        } else {
            throw Error(ErrorCode::Configuration, "unknown segment kind '" + tok[1] + "'");
        }
        segments.push_back(std::move(seg));
    }
    if (segments.empty()) return PiecewiseFn();
    try {
        return PiecewiseFn(std::move(segments));
    } catch (const Error& e) {
        throw Error(ErrorCode::Configuration, e.what());
    }
}

LimitQuantity limit_quantity_from_name(const std::string& name) {
    const std::string n = boost::to_lower_copy(name);
    if (n == "b") return LimitQuantity::B;
    if (n == "l") return LimitQuantity::L;
    if (n == "q") return LimitQuantity::Q;
    if (n == "argmin") return LimitQuantity::Argmin;
    throw Error(ErrorCode::Configuration, "unknown limit quantity '" + name + "'");
}

void ExperimentConfig::validate() const {
    monitor.cfg.validate();
    model.validate(gamma());
    errors.validate();
    if (!(monitor.xi > 0.0)) throw Error(ErrorCode::Configuration, "[monitor] xi must be positive");
    for (const auto* grid : {&cv.xi_grid, &limit.xi_grid}) {
        for (double xi : *grid) {
            if (!(xi > 0.0)) throw Error(ErrorCode::Configuration, "xi grid values must be positive");
        }
    }
    check_grid(cv.s_grid, s0(), "[cv] s_grid");
    check_grid(cv.checkpoints, s0(), "[cv] checkpoints");
    check_grid(limit.s_points, s0(), "[limit] s_points");
    if (monitor.cv_bandwidth && (cv.checkpoints.empty() || cv.xi_grid.empty())) {
        throw Error(ErrorCode::Configuration, "cv_bandwidth needs [cv] checkpoints and xi_grid");
    }
    limit.grid.validate();
    anscombe.family.validate();
    for (double a : anscombe.a_values) {
        if (!(a > 0.0)) throw Error(ErrorCode::Configuration, "[anscombe] a_values must be positive");
    }
    if (run.reps < 1) throw Error(ErrorCode::Configuration, "[run] reps must be >= 1");
    if (run.threads < 1) throw Error(ErrorCode::Configuration, "[run] threads must be >= 1");
}

ExperimentConfig parse_config(const std::string& text) {
    pt::ptree root;
    std::istringstream in(text);
    try {
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorCode::Configuration, e.what());
    }
    static const std::set<std::string> known{"model", "errors", "kernel", "monitor",
                                             "cv", "limit", "anscombe", "run"};
    for (const auto& [name, node] : root) {
        if (!known.count(name) || node.empty()) {
            throw Error(ErrorCode::Configuration, "unknown section or stray key '" + name + "'");
        }
    }

    ExperimentConfig c;

    const Section model(root, "model", {"T", "m0", "delta", "design", "design_table", "check_sign"});
    model.read("T", c.model.T);
    if (auto v = model.find("m0")) c.model.m0 = parse_piecewise(*v);
    if (auto v = model.find("delta")) c.model.delta = parse_piecewise(*v);
    model.read("check_sign", c.model.enforce_sign);
    std::string design = "identity";
    model.read("design", design);
    if (design == "tabulated") {
        c.model.design.kind = DesignKind::TabulatedQuantile;
        const auto* table = model.find("design_table");
        if (!table) throw Error(ErrorCode::Configuration, "tabulated design needs design_table");
        for (const auto& tok : split_tokens(*table)) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) throw Error(ErrorCode::Configuration, "design_table entries are p:x");
            c.model.design.p.push_back(to_double(tok.substr(0, colon), "design p"));
            c.model.design.x.push_back(to_double(tok.substr(colon + 1), "design x"));
        }
    } else if (design != "identity") {
        throw Error(ErrorCode::Configuration, "unknown design '" + design + "'");
    }

    const Section errors(root, "errors", {"kind", "innovation", "df", "sigma", "alpha0", "alpha",
                                          "beta", "ma", "burn_in"});
    std::string kind = "iid";
    errors.read("kind", kind);
    if (kind == "iid") c.errors.kind = NoiseKind::IID;
    else if (kind == "garch") c.errors.kind = NoiseKind::GARCH;
    else if (kind == "ma") c.errors.kind = NoiseKind::MA;
    else throw Error(ErrorCode::Configuration, "unknown error kind '" + kind + "'");
    std::string innovation = "gaussian";
    errors.read("innovation", innovation);
    if (innovation == "gaussian") c.errors.innovation = Innovation::Gaussian;
    else if (innovation == "student_t") c.errors.innovation = Innovation::StudentT;
    else throw Error(ErrorCode::Configuration, "unknown innovation '" + innovation + "'");
    errors.read("df", c.errors.df);
    errors.read("sigma", c.errors.sigma);
    errors.read("alpha0", c.errors.garch.alpha0);
    errors.read("alpha", c.errors.garch.alpha);
    errors.read("beta", c.errors.garch.beta);
    errors.read("ma", c.errors.ma);
    errors.read("burn_in", c.errors.burn_in);

    const Section kernel(root, "kernel", {"family"});
    if (auto v = kernel.find("family")) c.kernel = kernel_from_name(boost::trim_copy(*v));

    const Section monitor(root, "monitor", {"gamma", "s0", "threshold", "direction", "xi", "cv_bandwidth"});
    monitor.read("gamma", c.monitor.cfg.gamma);
    monitor.read("s0", c.monitor.cfg.s0);
    monitor.read("threshold", c.monitor.cfg.threshold);
    monitor.read("xi", c.monitor.xi);
    monitor.read("cv_bandwidth", c.monitor.cv_bandwidth);
    std::string direction = "upper";
    monitor.read("direction", direction);
    if (direction == "upper") c.monitor.cfg.direction = Direction::Upper;
    else if (direction == "lower") c.monitor.cfg.direction = Direction::Lower;
    else throw Error(ErrorCode::Configuration, "direction must be upper or lower");

    const Section cv(root, "cv", {"xi_grid", "s_grid", "checkpoints"});
    cv.read("xi_grid", c.cv.xi_grid);
    cv.read("s_grid", c.cv.s_grid);
    cv.read("checkpoints", c.cv.checkpoints);

    const Section limit(root, "limit", {"grid_points", "sigma", "xi", "s_points", "xi_grid",
                                        "lower_limits", "what"});
    limit.read("grid_points", c.limit.grid.grid_points);
    limit.read("sigma", c.limit.grid.sigma);
    limit.read("xi", c.limit.grid.xi);
    limit.read("s_points", c.limit.s_points);
    limit.read("xi_grid", c.limit.xi_grid);
    std::string lower = "window_start";
    limit.read("lower_limits", lower);
    if (lower == "window_start") c.limit.grid.lower_limits = LowerLimits::WindowStart;
    else if (lower == "zero") c.limit.grid.lower_limits = LowerLimits::Zero;
    else throw Error(ErrorCode::Configuration, "lower_limits must be window_start or zero");
    if (auto v = limit.find("what")) c.limit.what = limit_quantity_from_name(boost::trim_copy(*v));

    const Section ans(root, "anscombe", {"family", "mu", "sd", "c0", "known_sigma", "a_values",
                                         "r_bar", "fraction"});
    std::string family = "first_passage";
    ans.read("family", family);
    c.anscombe.family.kind = stop_kind_from_name(family);
    ans.read("mu", c.anscombe.family.increments.mean);
    ans.read("sd", c.anscombe.family.increments.sd);
    ans.read("c0", c.anscombe.family.c0);
    if (auto v = ans.find("known_sigma")) c.anscombe.family.known_sigma = to_double(*v, "known_sigma");
    bool calibrate_r_bar = false;
    if (auto v = ans.find("r_bar")) {
        if (boost::trim_copy(*v) == "auto") calibrate_r_bar = true;
        else c.anscombe.family.r_bar = to_double(*v, "[anscombe] r_bar");
    }
    ans.read("fraction", c.anscombe.family.fraction);
    ans.read("a_values", c.anscombe.a_values);
    c.anscombe.family.risk_errors = c.errors;

    const Section run(root, "run", {"reps", "seed", "out", "threads"});
    run.read("reps", c.run.reps);
    if (auto v = run.find("seed")) {
        const long long s = to_int(*v, "[run] seed");
        if (s < 0) throw Error(ErrorCode::Configuration, "[run] seed must be >= 0");
        c.run.seed = static_cast<std::uint64_t>(s);
    }
    run.read("out", c.run.out);
    run.read("threads", c.run.threads);

    if (calibrate_r_bar) {
        if (c.anscombe.a_values.empty()) throw Error(ErrorCode::Configuration, "r_bar = auto needs a_values");
        const double a_max = *std::max_element(c.anscombe.a_values.begin(), c.anscombe.a_values.end());
        c.anscombe.family.r_bar =
            calibrate_risk_limit(c.errors, static_cast<int>(std::ceil(a_max - 1e-9)), 200, c.run.seed);
    }

    c.limit.grid.delta = c.model.delta;
    c.limit.grid.gamma = c.gamma();
    c.limit.grid.s0 = c.s0();
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Configuration, "cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace seqcv
