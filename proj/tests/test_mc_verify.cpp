#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fnc/fnc_bounds.hpp"
#include "fnc/mc_verify.hpp"
#include "fnc/rng.hpp"
#include "fnc/special_functions.hpp"
#include "support/ks.hpp"

using fnc::BoundKind;
using fnc::CoverageConfig;
using fnc::RandomStream;

namespace {

CoverageConfig base_config() {
    CoverageConfig cfg;
    cfg.mu = 100.0;
    cfg.sigma = 4.0;
    cfg.n = 20;
    cfg.limit = 90.0;
    cfg.gamma = 0.90;
    cfg.trials = 2000;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("RandomStream is deterministic and index-keyed") {
    RandomStream a = RandomStream::for_index(42, 3);
    RandomStream b = RandomStream::for_index(42, 3);
    RandomStream c = RandomStream::for_index(42, 4);
    bool all_equal = true;
    bool any_diff_c = false;
    for (int i = 0; i < 64; ++i) {
        const auto x = a.next_u64();
        all_equal = all_equal && (x == b.next_u64());
        any_diff_c = any_diff_c || (x != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff_c);
}

TEST_CASE("RandomStream uniforms live strictly inside (0,1)") {
    RandomStream rng(1);
    double mean = 0.0;
    const int count = 50000;
    for (int i = 0; i < count; ++i) {
        const double u = rng.next_uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        mean += u;
    }
    mean /= count;
    CHECK(std::fabs(mean - 0.5) < 0.005);
}

TEST_CASE("normal and chi-square draws have the right moments") {
    RandomStream rng(11);
    const int count = 40000;
    double sum = 0.0;
    double sumsq = 0.0;
    for (int i = 0; i < count; ++i) {
        const double z = rng.next_normal();
        sum += z;
        sumsq += z * z;
    }
    CHECK(std::fabs(sum / count) < 0.02);
    CHECK(std::fabs(sumsq / count - 1.0) < 0.03);

    for (int nu : {3, 19, 128}) {  // 128 exercises the gamma-method branch
        RandomStream r2(static_cast<std::uint64_t>(nu));
        double s = 0.0;
        const int m = 20000;
        for (int i = 0; i < m; ++i) s += r2.next_chi_square(nu);
        const double mean_v = s / m;
        CAPTURE(nu);
        // chi-square mean nu, sd sqrt(2 nu); allow ~5 standard errors
        CHECK(std::fabs(mean_v - nu) < 5.0 * std::sqrt(2.0 * nu / m));
    }
}

TEST_CASE("simulate_nct_statistic: determinism and central median") {
    const auto a = fnc::simulate_nct_statistic(19, 2.0, 5000, 99);
    const auto b = fnc::simulate_nct_statistic(19, 2.0, 5000, 99);
    CHECK(a == b);
    const auto c = fnc::simulate_nct_statistic(19, 2.0, 5000, 100);
    CHECK(a != c);

    auto central = fnc::simulate_nct_statistic(19, 0.0, 40000, 5);
    std::nth_element(central.begin(), central.begin() + 20000, central.end());
    const double median = central[20000];
    // median standard error 1.2533/(sqrt(draws) * f(0)), f(0) ~ 0.394 for nu=19
    const double se = 1.2533 / (std::sqrt(40000.0) * 0.394);
    CHECK(std::fabs(median) < 3.0 * se);
}

TEST_CASE("simulate_nct_statistic deciles agree with nct_cdf") {
    for (const auto& [nu, delta] : {std::pair{19, 2.0}, std::pair{39, -3.0}}) {
        const long draws = 1000000;
        auto sample = fnc::simulate_nct_statistic(nu, delta, draws, 2024, 0);
        std::sort(sample.begin(), sample.end());
        for (int d = 1; d <= 9; ++d) {
            const double q = sample[static_cast<std::size_t>(draws * d / 10)];
            const double expected = 0.1 * d;
            const double observed = fnc::nct_cdf({nu, delta}, q);
            const double se = std::sqrt(expected * (1.0 - expected) / draws);
            CAPTURE(nu);
            CAPTURE(d);
            CHECK(std::fabs(observed - expected) <= 3.0 * se + 1.0 / draws);
        }
    }
}

TEST_CASE("pivotal identity: sample statistic matches the nct sampler (KS)") {
    const double mu = 100.0;
    const double sigma = 4.0;
    const int n = 20;
    const double limit = 90.0;
    const double delta_true = std::sqrt(static_cast<double>(n)) * (limit - mu) / sigma;
    const long draws = 10000;
    const auto a = fnc::simulate_t_statistic(mu, sigma, n, limit, draws, 314);
    const auto b = fnc::simulate_nct_statistic(n - 1, delta_true, draws, 2718);
    const double d = testsupport::ks_two_sample(a, b);
    CHECK(d <= testsupport::ks_critical(0.001, a.size(), b.size()));
}

TEST_CASE("simulate_coverage: single trial, determinism, serial == parallel") {
    CoverageConfig cfg = base_config();
    cfg.trials = 1;
    const auto one = fnc::simulate_coverage_serial(cfg, BoundKind::upper_lower_tail);
    CHECK((one.hits == 0 || one.hits == 1));
    CHECK((one.empirical_coverage == 0.0 || one.empirical_coverage == 1.0));

    cfg.trials = 400;
    const auto r1 = fnc::simulate_coverage_serial(cfg, BoundKind::upper_lower_tail);
    const auto r2 = fnc::simulate_coverage_serial(cfg, BoundKind::upper_lower_tail);
    CHECK(r1.hits == r2.hits);
    for (int jobs : {2, 0}) {
        const auto rp = fnc::simulate_coverage(cfg, BoundKind::upper_lower_tail, jobs);
        CAPTURE(jobs);
        CHECK(rp.hits == r1.hits);
        CHECK(rp.solver_failures == r1.solver_failures);
        CHECK(rp.empirical_coverage == r1.empirical_coverage);
    }
}

TEST_CASE("simulate_coverage approaches the nominal level on every kind") {
    CoverageConfig cfg = base_config();
    for (const BoundKind kind : {BoundKind::upper_lower_tail, BoundKind::lower_lower_tail,
                                 BoundKind::upper_upper_tail, BoundKind::lower_upper_tail}) {
        CoverageConfig c = cfg;
        const bool lower_tail =
            kind == BoundKind::upper_lower_tail || kind == BoundKind::lower_lower_tail;
        c.limit = lower_tail ? 90.0 : 110.0;
        const auto res = fnc::simulate_coverage(c, kind, 0);
        CAPTURE(static_cast<int>(kind));
        CHECK(res.solver_failures == 0);
        // 2000 trials: SE ~ 0.0067; 3.5 SE band
        CHECK(std::fabs(res.empirical_coverage - c.gamma) < 0.0235);
    }
}

TEST_CASE("coverage config validation") {
    CoverageConfig cfg = base_config();
    cfg.trials = 0;
    CHECK_THROWS_AS(fnc::simulate_coverage_serial(cfg, BoundKind::upper_lower_tail),
                    std::domain_error);
    cfg = base_config();
    cfg.sigma = 0.0;
    CHECK_THROWS_AS(fnc::simulate_coverage_serial(cfg, BoundKind::upper_lower_tail),
                    std::domain_error);
    cfg = base_config();
    cfg.n = 1;
    CHECK_THROWS_AS(fnc::simulate_coverage_serial(cfg, BoundKind::upper_lower_tail),
                    std::domain_error);
    cfg = base_config();
    cfg.gamma = 1.0;
    CHECK_THROWS_AS(fnc::simulate_coverage_serial(cfg, BoundKind::upper_lower_tail),
                    std::domain_error);
    CHECK_THROWS_AS(fnc::simulate_nct_statistic(0, 0.0, 10, 1), std::domain_error);
    CHECK_THROWS_AS(fnc::simulate_t_statistic(0.0, 1.0, 1, 0.0, 10, 1), std::domain_error);
}
