#include "fnc/mc_verify.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fnc/errors.hpp"
#include "fnc/fnc_bounds.hpp"
#include "fnc/rng.hpp"
#include "fnc/special_functions.hpp"

namespace fnc {

double RandomStream::next_normal() { return norm_quantile(next_uniform()); }

double RandomStream::next_chi_square(int nu) {
    if (nu < 1) {
        throw std::domain_error("next_chi_square: nu must be >= 1");
    }
    if (nu <= 64) {
        double sum = 0.0;
        for (int i = 0; i < nu; ++i) {
            const double z = next_normal();
            sum += z * z;
        }
        return sum;
    }
    // Marsaglia-Tsang: gamma(a, 1) with a = nu/2 >= 32.5, scaled by 2.
    const double a = 0.5 * static_cast<double>(nu);
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        const double x = next_normal();
        const double w = 1.0 + c * x;
        if (w <= 0.0) continue;
        const double v = w * w * w;
        const double u = next_uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
            return 2.0 * d * v;
        }
    }
}

namespace {

struct TrialOutcome {
    bool hit = false;
    bool failed = false;
};

// One coverage trial: simulate the sample, compute the requested bound, test
// coverage of the true tail fraction. Exceptions from the solver are reported
// as failures, not scored.
TrialOutcome run_trial(const CoverageConfig& cfg, BoundKind kind, long trial) {
    RandomStream rng = RandomStream::for_index(cfg.seed, static_cast<std::uint64_t>(trial));

    // Welford accumulation keeps the trial allocation-free.
    double mean = 0.0;
    double m2 = 0.0;
    for (int i = 0; i < cfg.n; ++i) {
        const double x = cfg.mu + cfg.sigma * rng.next_normal();
        const double d = x - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (x - mean);
    }
    const double sd = std::sqrt(m2 / static_cast<double>(cfg.n - 1));

    TrialOutcome out;
    if (!(sd > 0.0)) {
        out.failed = true;
        return out;
    }

    const bool lower_tail_kind =
        kind == BoundKind::upper_lower_tail || kind == BoundKind::lower_lower_tail;
    const bool upper_bound_kind =
        kind == BoundKind::upper_lower_tail || kind == BoundKind::upper_upper_tail;

    // Mirror reduction folds the upper-tail kinds into the lower-tail solve.
    const double eff_mean = lower_tail_kind ? mean : -mean;
    const double eff_limit = lower_tail_kind ? cfg.limit : -cfg.limit;
    const double root_n = std::sqrt(static_cast<double>(cfg.n));
    const double t_stat = root_n * (eff_limit - eff_mean) / sd;
    const double target = upper_bound_kind ? 1.0 - cfg.gamma : cfg.gamma;

    double bound;
    try {
        const double delta_hat = solve_delta_hat(cfg.n - 1, t_stat, target);
        bound = norm_cdf(delta_hat / root_n);
    } catch (const convergence_error&) {
        out.failed = true;
        return out;
    }

    const double p_true = lower_tail_kind ? norm_cdf((cfg.limit - cfg.mu) / cfg.sigma)
                                          : norm_cdf((cfg.mu - cfg.limit) / cfg.sigma);
    out.hit = upper_bound_kind ? (bound >= p_true) : (bound <= p_true);
    return out;
}

void validate(const CoverageConfig& cfg) {
    if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma)) {
        throw std::domain_error("CoverageConfig: sigma must be positive and finite");
    }
    if (cfg.n < 2) {
        throw std::domain_error("CoverageConfig: n must be >= 2");
    }
    if (cfg.trials < 1) {
        throw std::domain_error("CoverageConfig: trials must be >= 1");
    }
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) {
        throw std::domain_error("CoverageConfig: gamma must be in (0,1)");
    }
    if (!std::isfinite(cfg.mu) || !std::isfinite(cfg.limit)) {
        throw std::domain_error("CoverageConfig: mu and limit must be finite");
    }
}

CoverageResult finalize(long hits, long failures, const CoverageConfig& cfg) {
    CoverageResult res;
    res.hits = hits;
    res.trials = cfg.trials;
    res.solver_failures = failures;
    res.empirical_coverage = static_cast<double>(hits) / static_cast<double>(cfg.trials);
    const double p = res.empirical_coverage;
    res.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.trials));
    return res;
}

}  // namespace

CoverageResult simulate_coverage_serial(const CoverageConfig& config, BoundKind kind) {
    validate(config);
    long hits = 0;
    long failures = 0;
    for (long t = 0; t < config.trials; ++t) {
        const TrialOutcome out = run_trial(config, kind, t);
        hits += out.hit ? 1 : 0;
        failures += out.failed ? 1 : 0;
    }
    return finalize(hits, failures, config);
}

CoverageResult simulate_coverage(const CoverageConfig& config, BoundKind kind, int jobs) {
    validate(config);
#ifdef _OPENMP
    if (jobs != 1) {
        const int threads = jobs <= 0 ? omp_get_max_threads() : jobs;
        long hits = 0;
        long failures = 0;
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads) \
    reduction(+ : hits, failures)
        for (long t = 0; t < config.trials; ++t) {
            const TrialOutcome out = run_trial(config, kind, t);
            hits += out.hit ? 1 : 0;
            failures += out.failed ? 1 : 0;
        }
        return finalize(hits, failures, config);
    }
#else
    (void)jobs;
#endif
    return simulate_coverage_serial(config, kind);
}

std::vector<double> simulate_nct_statistic(int nu, double delta, long draws, std::uint64_t seed,
                                           int jobs) {
    if (nu < 1 || draws < 1 || !std::isfinite(delta)) {
        throw std::domain_error("simulate_nct_statistic: invalid arguments");
    }
    std::vector<double> out(static_cast<std::size_t>(draws));
    const double dnu = static_cast<double>(nu);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(jobs <= 0 ? omp_get_max_threads() : jobs) \
    if (jobs != 1)
#else
    (void)jobs;
#endif
    for (long i = 0; i < draws; ++i) {
        RandomStream rng = RandomStream::for_index(seed, static_cast<std::uint64_t>(i));
        const double z = rng.next_normal();
        const double v = rng.next_chi_square(nu);
        out[static_cast<std::size_t>(i)] = (z + delta) / std::sqrt(v / dnu);
    }
    return out;
}

std::vector<double> simulate_t_statistic(double mu, double sigma, int n, double limit, long draws,
                                         std::uint64_t seed, int jobs) {
    if (n < 2 || draws < 1 || !(sigma > 0.0)) {
        throw std::domain_error("simulate_t_statistic: invalid arguments");
    }
    std::vector<double> out(static_cast<std::size_t>(draws));
    const double root_n = std::sqrt(static_cast<double>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(jobs <= 0 ? omp_get_max_threads() : jobs) \
    if (jobs != 1)
#else
    (void)jobs;
#endif
    for (long i = 0; i < draws; ++i) {
        RandomStream rng = RandomStream::for_index(seed, static_cast<std::uint64_t>(i));
        double mean = 0.0;
        double m2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double x = mu + sigma * rng.next_normal();
            const double d = x - mean;
            mean += d / static_cast<double>(k + 1);
            m2 += d * (x - mean);
        }
        const double sd = std::sqrt(m2 / static_cast<double>(n - 1));
        out[static_cast<std::size_t>(i)] = root_n * (limit - mean) / sd;
    }
    return out;
}

}  // namespace fnc
