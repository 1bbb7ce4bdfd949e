#pragma once

#include <cstdint>
#include <vector>

namespace fnc {

// Which confidence bound a coverage simulation exercises.
enum class BoundKind {
    upper_lower_tail,  // upper bound for the fraction below the limit
    lower_lower_tail,  // lower bound for the fraction below the limit
    upper_upper_tail,  // upper bound for the fraction above the limit
    lower_upper_tail,  // lower bound for the fraction above the limit
};

struct CoverageConfig {
    double mu = 0.0;
    double sigma = 1.0;
    int n = 2;
    double limit = 0.0;
    double gamma = 0.95;
    long trials = 1;
    std::uint64_t seed = 0;
};

struct CoverageResult {
    long hits = 0;
    long trials = 0;
    long solver_failures = 0;  // counted separately, never as hits or misses
    double empirical_coverage = 0.0;
    double standard_error = 0.0;
};

// For each trial: draw n iid normal(mu, sigma) values, form (xbar, s), compute
// the requested bound at confidence gamma, and score a hit when the bound
// covers the true tail fraction. Deterministic given the seed; each trial's
// random stream is derived from (seed, trial index), so results do not depend
// on execution order.
CoverageResult simulate_coverage_serial(const CoverageConfig& config, BoundKind kind);

// OpenMP version of the above; bit-identical to the serial reference.
// jobs <= 0 means use all available threads.
CoverageResult simulate_coverage(const CoverageConfig& config, BoundKind kind, int jobs = 0);

// Draws of (Z + delta)/sqrt(V/nu) with Z standard normal and V chi-square
// with nu degrees of freedom. Draw i uses stream (seed, i).
std::vector<double> simulate_nct_statistic(int nu, double delta, long draws, std::uint64_t seed,
                                           int jobs = 1);

// Draws of the sample statistic sqrt(n)*(limit - xbar)/s from n iid
// normal(mu, sigma) observations per draw; the pivotal counterpart of
// simulate_nct_statistic.
std::vector<double> simulate_t_statistic(double mu, double sigma, int n, double limit, long draws,
                                         std::uint64_t seed, int jobs = 1);

}  // namespace fnc
