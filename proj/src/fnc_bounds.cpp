#include "fnc/fnc_bounds.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fnc/errors.hpp"
#include "fnc/special_functions.hpp"

namespace fnc {

namespace {

constexpr double kResidualTol = 1e-11;

double phi_with_flag(double z, bool* underflow) {
    const double p = norm_cdf(z);
    *underflow = (p == 0.0);
    return p;
}

}  // namespace

SampleSummary::SampleSummary(int n_, double mean_, double sd_) : n(n_), mean(mean_), sd(sd_) {
    if (n < 2) {
        throw std::domain_error("SampleSummary: n must be >= 2");
    }
    if (!std::isfinite(mean)) {
        throw std::domain_error("SampleSummary: mean must be finite");
    }
    if (!(sd > 0.0) || !std::isfinite(sd)) {
        throw std::domain_error("SampleSummary: sd must be positive and finite");
    }
}

QualitySpec make_quality_spec(double true_value, double e_max) {
    if (!(true_value > 0.0) || !std::isfinite(true_value)) {
        throw std::domain_error("QualitySpec: true_value must be positive and finite");
    }
    if (!(e_max > 0.0 && e_max < 1.0)) {
        throw std::domain_error("QualitySpec: e_max must be in (0,1)");
    }
    QualitySpec spec;
    spec.true_value = true_value;
    spec.e_max = e_max;
    spec.lsl = true_value * (1.0 - e_max);
    spec.usl = true_value * (1.0 + e_max);
    return spec;
}

double expected_fraction_lower(const SampleSummary& sample, double limit) {
    if (!std::isfinite(limit)) {
        throw std::domain_error("expected_fraction_lower: limit must be finite");
    }
    return norm_cdf((limit - sample.mean) / sample.sd);
}

double solve_delta_hat(int nu, double t_stat, double target) {
    if (nu < 1) {
        throw std::domain_error("solve_delta_hat: nu must be >= 1");
    }
    if (!std::isfinite(t_stat)) {
        throw std::domain_error("solve_delta_hat: t_stat must be finite");
    }
    if (!(target > 0.0 && target < 1.0)) {
        throw std::domain_error("solve_delta_hat: target must be in (0,1)");
    }

    const NctParams base{nu, 0.0};
    auto g = [&](double d) { return nct_cdf(NctParams{base.nu, d}, t_stat) - target; };

    // F is decreasing in delta. Expand a geometric bracket from the central
    // guess delta0 = t_stat until the target is straddled.
    double lo;
    double hi;
    double glo;
    double ghi;
    {
        const double d0 = t_stat;
        const double g0 = g(d0);
        if (g0 == 0.0) return d0;
        double step = 2.0 * std::max(1.0, std::fabs(t_stat) / std::sqrt(static_cast<double>(nu)));
        if (g0 > 0.0) {
            lo = d0;
            glo = g0;
            for (;;) {
                hi = lo + step;
                ghi = g(hi);
                if (ghi <= 0.0) break;
                lo = hi;
                glo = ghi;
                step *= 2.0;
            }
        } else {
            hi = d0;
            ghi = g0;
            for (;;) {
                lo = hi - step;
                glo = g(lo);
                if (glo >= 0.0) break;
                hi = lo;
                ghi = glo;
                step *= 2.0;
            }
        }
    }

    // Illinois regula falsi on [lo, hi] with g(lo) >= 0 >= g(hi).
    double best = std::fabs(glo) < std::fabs(ghi) ? lo : hi;
    double gbest = std::fabs(glo) < std::fabs(ghi) ? glo : ghi;
    int last_side = 0;
    for (int iter = 0; iter < 200; ++iter) {
        if (std::fabs(gbest) <= kResidualTol) {
            return best;
        }
        double d = hi - ghi * (hi - lo) / (ghi - glo);
        if (!(d > lo && d < hi)) {
            d = 0.5 * (lo + hi);
        }
        if (d <= lo || d >= hi) {
            break;  // interval exhausted at double precision
        }
        const double gd = g(d);
        if (std::fabs(gd) < std::fabs(gbest)) {
            best = d;
            gbest = gd;
        }
        if (gd > 0.0) {
            lo = d;
            glo = gd;
            if (last_side == 1) ghi *= 0.5;
            last_side = 1;
        } else {
            hi = d;
            ghi = gd;
            if (last_side == -1) glo *= 0.5;
            last_side = -1;
        }
    }
    if (std::fabs(gbest) <= 1e-10) {
        return best;  // spec residual tolerance
    }
    std::ostringstream oss;
    oss << "solve_delta_hat: residual " << gbest << " not within tolerance; best bracket ["
        << lo << ", " << hi << "] (nu=" << nu << ", t_stat=" << t_stat << ", target=" << target
        << ")";
    throw convergence_error(oss.str(), best, gbest);
}

TailBounds lower_tail_bounds(const SampleSummary& sample, double limit, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::domain_error("lower_tail_bounds: gamma must be in (0,1)");
    }
    if (!std::isfinite(limit)) {
        throw std::domain_error("lower_tail_bounds: limit must be finite");
    }
    const double root_n = std::sqrt(static_cast<double>(sample.n));
    const double t_stat = root_n * (limit - sample.mean) / sample.sd;
    const int nu = sample.n - 1;

    TailBounds tb;
    tb.expected = phi_with_flag((limit - sample.mean) / sample.sd, &tb.expected_underflow);
    tb.delta_hat_upper = solve_delta_hat(nu, t_stat, 1.0 - gamma);
    tb.delta_hat_lower = solve_delta_hat(nu, t_stat, gamma);
    tb.upper = phi_with_flag(tb.delta_hat_upper / root_n, &tb.upper_underflow);
    tb.lower = phi_with_flag(tb.delta_hat_lower / root_n, &tb.lower_underflow);
    return tb;
}

TailBounds upper_tail_bounds(const SampleSummary& sample, double limit, double gamma) {
    const SampleSummary mirrored(sample.n, -sample.mean, sample.sd);
    TailBounds tb = lower_tail_bounds(mirrored, -limit, gamma);
#ifndef NDEBUG
    const TailBounds alt = upper_tail_bounds_complement(sample, limit, gamma);
    assert(std::fabs(tb.expected - alt.expected) <= 1e-12);
    assert(std::fabs(tb.lower - alt.lower) <= 1e-12);
    assert(std::fabs(tb.upper - alt.upper) <= 1e-12);
#endif
    return tb;
}

TailBounds upper_tail_bounds_complement(const SampleSummary& sample, double limit, double gamma) {
    // Bounds on p = P(X <= limit); the nonconforming fraction above the limit
    // is 1 - p, so bound roles swap and each value complements as Phi(-z).
    const TailBounds below = lower_tail_bounds(sample, limit, gamma);
    const double root_n = std::sqrt(static_cast<double>(sample.n));

    TailBounds tb;
    tb.expected = phi_with_flag((sample.mean - limit) / sample.sd, &tb.expected_underflow);
    tb.delta_hat_lower = -below.delta_hat_upper;
    tb.delta_hat_upper = -below.delta_hat_lower;
    tb.lower = phi_with_flag(tb.delta_hat_lower / root_n, &tb.lower_underflow);
    tb.upper = phi_with_flag(tb.delta_hat_upper / root_n, &tb.upper_underflow);
    return tb;
}

BoundsReport bounds_report(const SampleSummary& sample, const QualitySpec& spec, double gamma) {
    BoundsReport report{sample, spec, gamma, {}, {}};
    report.lower_tail = lower_tail_bounds(sample, spec.lsl, gamma);
    report.upper_tail = upper_tail_bounds(sample, spec.usl, gamma);
    return report;
}

}  // namespace fnc
