#include "seqcv/change_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqcv/error.hpp"

namespace seqcv {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double tabulated_value(const TabulatedSegment& t, double x) {
    if (x <= t.x.front()) return t.y.front();
    if (x >= t.x.back()) return t.y.back();
    const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - t.x.begin()) - 1;
    const double frac = (x - t.x[k]) / (t.x[k + 1] - t.x[k]);
    return t.y[k] + frac * (t.y[k + 1] - t.y[k]);
}

double shape_value(const SegmentShape& shape, double x) {
    return std::visit(overloaded{
                          [](const ConstantSegment& c) { return c.value; },
                          [x](const LinearSegment& l) { return l.intercept + l.slope * x; },
                          [x](const TabulatedSegment& t) { return tabulated_value(t, x); },
                      },
                      shape);
}

// Knots of the (clamped) piecewise-linear tabulated interpolant inside (a, b), plus a and b.
std::vector<double> tabulated_knots(const TabulatedSegment& t, double a, double b) {
    std::vector<double> knots{a};
    for (double xk : t.x) {
        if (xk > a && xk < b) knots.push_back(xk);
    }
    knots.push_back(b);
    return knots;
}

double shape_integral(const SegmentShape& shape, double a, double b) {
    if (!(b > a)) return 0.0;
    return std::visit(
        overloaded{
            [&](const ConstantSegment& c) { return c.value * (b - a); },
            [&](const LinearSegment& l) {
                return l.intercept * (b - a) + 0.5 * l.slope * (b * b - a * a);
            },
            [&](const TabulatedSegment& t) {
                // Trapezoid over the interpolation knots, exact for the interpolant.
                const auto knots = tabulated_knots(t, a, b);
                double sum = 0.0;
                for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
                    sum += 0.5 * (knots[k + 1] - knots[k]) *
                           (tabulated_value(t, knots[k]) + tabulated_value(t, knots[k + 1]));
                }
                return sum;
            },
        },
        shape);
}

double shape_variation(const SegmentShape& shape, double a, double b) {
    if (!(b > a)) return 0.0;
    return std::visit(overloaded{
                          [](const ConstantSegment&) { return 0.0; },
                          [&](const LinearSegment& l) { return std::abs(l.slope) * (b - a); },
                          [&](const TabulatedSegment& t) {
                              const auto knots = tabulated_knots(t, a, b);
                              double v = 0.0;
                              for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
                                  v += std::abs(tabulated_value(t, knots[k + 1]) -
                                                tabulated_value(t, knots[k]));
                              }
                              return v;
                          },
                      },
                      shape);
}

// Points where a piecewise-linear segment can attain extremes on [a, b].
std::vector<double> shape_probe_points(const SegmentShape& shape, double a, double b) {
    if (const auto* t = std::get_if<TabulatedSegment>(&shape)) return tabulated_knots(*t, a, b);
    return {a, b};
}

double shape_lipschitz(const SegmentShape& shape) {
    return std::visit(overloaded{
                          [](const ConstantSegment&) { return 0.0; },
                          [](const LinearSegment& l) { return std::abs(l.slope); },
                          [](const TabulatedSegment& t) {
                              double L = 0.0;
                              for (std::size_t k = 0; k + 1 < t.x.size(); ++k) {
                                  L = std::max(L, std::abs((t.y[k + 1] - t.y[k]) /
                                                           (t.x[k + 1] - t.x[k])));
                              }
                              return L;
                          },
                      },
                      shape);
}

bool shape_is_zero(const SegmentShape& shape) {
    return std::visit(overloaded{
                          [](const ConstantSegment& c) { return c.value == 0.0; },
                          [](const LinearSegment& l) { return l.slope == 0.0 && l.intercept == 0.0; },
                          [](const TabulatedSegment& t) {
                              return std::all_of(t.y.begin(), t.y.end(),
                                                 [](double y) { return y == 0.0; });
                          },
                      },
                      shape);
}

}  // namespace

PiecewiseFn::PiecewiseFn() : PiecewiseFn(std::vector<Segment>{{0.0, ConstantSegment{0.0}}}) {}

PiecewiseFn::PiecewiseFn(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw Error(ErrorCode::Validation, "piecewise function needs a segment");
    if (segments_.front().start != 0.0) {
        throw Error(ErrorCode::Validation, "first segment must start at 0");
    }
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const double s = segments_[k].start;
        if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::Validation, "breakpoints must lie in [0,1]");
        if (k > 0 && !(s > segments_[k - 1].start)) {
            throw Error(ErrorCode::Validation, "breakpoints must be strictly increasing");
        }
        if (const auto* t = std::get_if<TabulatedSegment>(&segments_[k].shape)) {
            if (t->x.size() != t->y.size() || t->x.size() < 2) {
                throw Error(ErrorCode::Validation, "tabulated segment needs >= 2 (x, y) samples");
            }
            for (std::size_t i = 1; i < t->x.size(); ++i) {
                if (!(t->x[i] > t->x[i - 1])) {
                    throw Error(ErrorCode::Validation, "tabulated x must be strictly increasing");
                }
            }
            if (std::abs(t->x.front() - s) > 1e-12 || t->x.back() > segment_end(k) + 1e-12) {
                throw Error(ErrorCode::Validation, "tabulated samples must lie inside their segment");
            }
            for (double y : t->y) {
                if (!std::isfinite(y)) throw Error(ErrorCode::Validation, "tabulated values must be finite");
            }
        }
    }
}

PiecewiseFn PiecewiseFn::constant(double c) {
    return PiecewiseFn({{0.0, ConstantSegment{c}}});
}

PiecewiseFn PiecewiseFn::linear(double slope, double intercept) {
    return PiecewiseFn({{0.0, LinearSegment{slope, intercept}}});
}

PiecewiseFn PiecewiseFn::step(double at, double before, double after) {
    if (at <= 0.0) return constant(after);
    return PiecewiseFn({{0.0, ConstantSegment{before}}, {at, ConstantSegment{after}}});
}

std::size_t PiecewiseFn::segment_index(double x) const {
    std::size_t k = 0;
    while (k + 1 < segments_.size() && x >= segments_[k + 1].start) ++k;
    return k;
}

double PiecewiseFn::segment_end(std::size_t k) const {
    return k + 1 < segments_.size() ? segments_[k + 1].start : 1.0;
}

double PiecewiseFn::operator()(double x) const {
    if (!(x >= 0.0)) throw Error(ErrorCode::Domain, "piecewise function is defined on [0, inf)");
    return shape_value(segments_[segment_index(x)].shape, x);
}

double PiecewiseFn::integral(double a, double b) const {
    if (!(a >= 0.0) || b < a) throw Error(ErrorCode::Domain, "integral requires 0 <= a <= b");
    double sum = 0.0;
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const double lo = std::max(a, segments_[k].start);
        const double hi = k + 1 < segments_.size() ? std::min(b, segments_[k + 1].start) : b;
        sum += shape_integral(segments_[k].shape, lo, hi);
    }
    return sum;
}

double PiecewiseFn::variation() const {
    double v = 0.0;
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        v += shape_variation(segments_[k].shape, segments_[k].start, segment_end(k));
        if (k > 0) {
            const double left = shape_value(segments_[k - 1].shape, segments_[k].start);
            const double right = shape_value(segments_[k].shape, segments_[k].start);
            v += std::abs(right - left);
        }
    }
    return v;
}

double PiecewiseFn::sup_norm() const {
    double sup = 0.0;
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        for (double x : shape_probe_points(segments_[k].shape, segments_[k].start, segment_end(k))) {
            sup = std::max(sup, std::abs(shape_value(segments_[k].shape, x)));
        }
    }
    return sup;
}

double PiecewiseFn::lipschitz_const() const {
    double L = 0.0;
    for (const auto& seg : segments_) L = std::max(L, shape_lipschitz(seg.shape));
    return L;
}

std::optional<double> PiecewiseFn::first_change_point() const {
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const auto& seg = segments_[k];
        if (shape_is_zero(seg.shape)) continue;
        if (const auto* t = std::get_if<TabulatedSegment>(&seg.shape)) {
            for (std::size_t i = 0; i < t->x.size(); ++i) {
                if (t->y[i] != 0.0) return t->x[i];
                if (i + 1 < t->x.size() && t->y[i + 1] != 0.0) return t->x[i];
            }
            continue;
        }
        // Constant nonzero or linear not identically zero: nonzero right after start.
        return seg.start;
    }
    return std::nullopt;
}

bool PiecewiseFn::sign_consistent() const {
    bool positive = false;
    bool negative = false;
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        for (double x : shape_probe_points(segments_[k].shape, segments_[k].start, segment_end(k))) {
            const double v = shape_value(segments_[k].shape, x);
            positive = positive || v > 0.0;
            negative = negative || v < 0.0;
        }
    }
    return !(positive && negative);
}

bool PiecewiseFn::is_zero() const {
    return std::all_of(segments_.begin(), segments_.end(),
                       [](const Segment& s) { return shape_is_zero(s.shape); });
}

std::vector<double> PiecewiseFn::breakpoints() const {
    std::vector<double> out;
    for (std::size_t k = 1; k < segments_.size(); ++k) out.push_back(segments_[k].start);
    return out;
}

double delta_integral(const PiecewiseFn& delta, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::Domain, "u must lie in [0,1]");
    return delta.integral(0.0, u);
}

double delta_variation(const PiecewiseFn& delta) { return delta.variation(); }

double Design::inverse(double prob) const {
    if (kind == DesignKind::Identity) return prob;
    if (prob <= p.front()) return x.front();
    if (prob >= p.back()) return x.back();
    const auto it = std::upper_bound(p.begin(), p.end(), prob);
    const std::size_t k = static_cast<std::size_t>(it - p.begin()) - 1;
    const double frac = (prob - p[k]) / (p[k + 1] - p[k]);
    return x[k] + frac * (x[k + 1] - x[k]);
}

void Design::validate() const {
    if (kind == DesignKind::Identity) return;
    if (p.size() != x.size() || p.size() < 2) {
        throw Error(ErrorCode::Validation, "quantile table needs >= 2 (p, x) pairs");
    }
    if (p.front() != 0.0 || p.back() != 1.0) {
        throw Error(ErrorCode::Validation, "quantile table must span p in [0,1]");
    }
    for (std::size_t k = 1; k < p.size(); ++k) {
        if (!(p[k] > p[k - 1]) || !(x[k] >= x[k - 1])) {
            throw Error(ErrorCode::Validation, "quantile table must be increasing");
        }
    }
    if (x.front() < 0.0) throw Error(ErrorCode::Validation, "design points must be >= 0");
}

void ChangeModel::validate(double gamma) const {
    if (T < 1) throw Error(ErrorCode::Validation, "T must be >= 1");
    design.validate();
    if (const auto q1 = delta.first_change_point(); q1 && !(*q1 > gamma)) {
        throw Error(ErrorCode::Validation,
                    "first change point q1 = " + std::to_string(*q1) + " must exceed gamma");
    }
    if (enforce_sign && !delta.sign_consistent()) {
        throw Error(ErrorCode::Validation, "delta must be either >= 0 or <= 0 throughout");
    }
}

double ChangeModel::design_point(int n) const {
    return design.inverse(static_cast<double>(n) / T);
}

double mean_at(const ChangeModel& model, int n) {
    if (n < 1 || n > model.T) {
        throw Error(ErrorCode::Index, "index " + std::to_string(n) + " outside 1.." + std::to_string(model.T));
    }
    const double x = model.design_point(n);
    return model.m0(x) + model.delta(x) / std::sqrt(static_cast<double>(model.T));
}

}  // namespace seqcv
