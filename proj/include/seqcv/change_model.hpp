#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace seqcv {

struct ConstantSegment {
    double value = 0.0;
};

/// value(x) = intercept + slope * x, with x the absolute time fraction.
struct LinearSegment {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Linear interpolation through (x_k, y_k); held flat past the last sample.
/// The first sample sits at the segment start.
struct TabulatedSegment {
    std::vector<double> x;
    std::vector<double> y;
};

using SegmentShape = std::variant<ConstantSegment, LinearSegment, TabulatedSegment>;

struct Segment {
    double start = 0.0;
    SegmentShape shape;
};

/// Bounded piecewise-Lipschitz function on [0, 1] with finitely many jumps.
/// Segment k covers [start_k, start_{k+1}); the last one extends to 1 and beyond.
/// At a breakpoint the function takes the value of the right segment.
class PiecewiseFn {
public:
    PiecewiseFn();
    explicit PiecewiseFn(std::vector<Segment> segments);

    static PiecewiseFn constant(double c);
    static PiecewiseFn linear(double slope, double intercept);
    static PiecewiseFn step(double at, double before, double after);

    double operator()(double x) const;

    /// Integral over [a, b] with 0 <= a <= b.
    double integral(double a, double b) const;
    /// Total variation on [0, 1]: within-segment variation plus jump magnitudes.
    double variation() const;
    double sup_norm() const;
    double lipschitz_const() const;
    /// inf{s : f(s) != 0}; empty when f vanishes identically on [0, 1].
    std::optional<double> first_change_point() const;
    /// True when all nonzero values share one sign.
    bool sign_consistent() const;
    bool is_zero() const;

    std::vector<double> breakpoints() const;
    std::span<const Segment> segments() const { return segments_; }

private:
    std::size_t segment_index(double x) const;
    double segment_end(std::size_t k) const;

    std::vector<Segment> segments_;
};

/// int_0^u delta(t) dt for u in [0, 1].
double delta_integral(const PiecewiseFn& delta, double u);
double delta_variation(const PiecewiseFn& delta);

enum class DesignKind { Identity, TabulatedQuantile };

/// Fixed design x_n = G^{-1}(n / T). The tabulated quantile is piecewise linear
/// through (p_k, x_k) with p running from 0 to 1.
struct Design {
    DesignKind kind = DesignKind::Identity;
    std::vector<double> p;
    std::vector<double> x;

    double inverse(double prob) const;
    void validate() const;
};

struct ChangeModel {
    PiecewiseFn m0;
    PiecewiseFn delta;
    Design design;
    int T = 100;
    bool enforce_sign = false;

    /// Checks T, the design, q1 > gamma, and (when enforce_sign) the sign of delta.
    void validate(double gamma) const;
    double design_point(int n) const;
};

/// m0(x_n) + delta(x_n) / sqrt(T) for 1 <= n <= T.
double mean_at(const ChangeModel& model, int n);

}  // namespace seqcv
