#pragma once

namespace fnc {

// Parameters of a noncentral t-distribution: integer degrees of freedom
// nu >= 1 and finite noncentrality delta.
struct NctParams {
    int nu;
    double delta;
};

// Standard normal density. Throws std::domain_error on non-finite input.
double norm_pdf(double x);

// Standard normal lower-tail probability P(Z <= x). Keeps relative accuracy
// deep into the left tail (|x| up to ~37, values down to ~1e-300); underflows
// to exactly 0 beyond that.
double norm_cdf(double x);

// Inverse of norm_cdf on (0,1). Throws std::domain_error for p <= 0 or p >= 1.
double norm_quantile(double p);

// ln Gamma(x) for x > 0. Throws std::domain_error otherwise.
double log_gamma(double x);

// Cumulative distribution function of the noncentral t-distribution,
// P(T_{nu,delta} <= t), evaluated as the chi-density-weighted integral of the
// normal CDF by adaptive Gauss-Kronrod quadrature. Accurate in absolute terms
// (~1e-13) for mid-range results and in relative terms for tail results.
// Throws std::domain_error on invalid parameters and fnc::convergence_error
// if the quadrature cannot meet its tolerance.
double nct_cdf(const NctParams& params, double t);

}  // namespace fnc
