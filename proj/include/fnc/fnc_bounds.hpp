#pragma once

namespace fnc {

// Sufficient statistics of a sample of control measurements.
// Invariants: n >= 2, sd > 0, mean finite (checked on construction).
struct SampleSummary {
    SampleSummary(int n, double mean, double sd);

    int n;
    double mean;
    double sd;
};

// Quality-specification window around the assigned true value:
// lsl = true_value*(1 - e_max), usl = true_value*(1 + e_max).
struct QualitySpec {
    double true_value;
    double e_max;
    double lsl;
    double usl;
};

// Expected fraction plus the one-sided confidence bounds for a single
// specification tail. `lower <= expected <= upper` holds for gamma well above
// 0.5; `lower <= upper` always. Bounds that underflow double precision are
// reported as 0.0 with the matching flag set.
struct TailBounds {
    double expected = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double delta_hat_lower = 0.0;
    double delta_hat_upper = 0.0;
    bool expected_underflow = false;
    bool lower_underflow = false;
    bool upper_underflow = false;
};

// Full per-sample report: both specification tails at one confidence level.
struct BoundsReport {
    SampleSummary sample;
    QualitySpec spec;
    double gamma = 0.0;
    TailBounds lower_tail;  // fraction below lsl
    TailBounds upper_tail;  // fraction above usl
};

// Throws std::domain_error unless true_value > 0 and 0 < e_max < 1.
QualitySpec make_quality_spec(double true_value, double e_max);

// Plug-in estimate of the fraction below `limit`.
double expected_fraction_lower(const SampleSummary& sample, double limit);

// Solves F_{nu,delta}(t_stat) = target for the noncentrality delta. The CDF is
// strictly decreasing in delta, so the root is unique; it is bracketed by
// geometric expansion from t_stat and polished to |F - target| <= 1e-11.
// Throws fnc::convergence_error (with the best bracket in the message) if the
// residual tolerance cannot be met.
double solve_delta_hat(int nu, double t_stat, double target);

// Confidence bounds for the fraction nonconforming below `limit`:
// upper bound solves the CDF equation at target 1-gamma, the lower bound at
// target gamma, each mapped through Phi(delta_hat/sqrt(n)).
TailBounds lower_tail_bounds(const SampleSummary& sample, double limit, double gamma);

// Confidence bounds for the fraction nonconforming above `limit`, computed by
// the mirror reduction (negate mean and limit, reuse the lower-tail path).
// Debug builds assert agreement with the complement derivation below.
TailBounds upper_tail_bounds(const SampleSummary& sample, double limit, double gamma);

// Alternative derivation of the upper-tail bounds: bound P(X <= limit), then
// complement. The complement is carried analytically as Phi(-z) so tiny
// results survive. Agrees with the mirror route to ~1e-12; kept public so
// tests can compare the two paths in any build type.
TailBounds upper_tail_bounds_complement(const SampleSummary& sample, double limit, double gamma);

// Both tails of the specification window at confidence gamma.
BoundsReport bounds_report(const SampleSummary& sample, const QualitySpec& spec, double gamma);

}  // namespace fnc
