#include "fnc/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnc/errors.hpp"
#include "fnc/gauss_kronrod.hpp"

namespace fnc {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw std::domain_error(std::string(what) + " must be finite");
    }
}

// exp(-x^2/2) with the argument split so the squared high part is exact.
// Plain x*x rounding costs ~|x^2|*eps in the exponent, which is fatal for
// relative tail accuracy at |x| ~ 30.
double exp_neg_half_square(double x) {
    const double hi = std::floor(x * 65536.0 + 0.5) / 65536.0;
    const double lo = x - hi;
    return std::exp(-0.5 * hi * hi) * std::exp(-lo * (hi + 0.5 * lo));
}

// Mills-ratio continued fraction for the far left tail:
//   Phi(x) = phi(x) / (|x| + 1/(|x| + 2/(|x| + 3/(...))))   for x <= -8.
double norm_cdf_cf(double x) {
    const double t = -x;
    const double tiny = 1e-300;
    double f = t;
    double c = f;
    double d = 0.0;
    for (int n = 1; n <= 400; ++n) {
        const double an = static_cast<double>(n);
        d = t + an * d;
        if (d == 0.0) d = tiny;
        c = t + an / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) {
            const double pdf = kInvSqrt2Pi * exp_neg_half_square(x);
            return pdf / f;
        }
    }
    throw convergence_error("norm_cdf: tail continued fraction did not converge", f, 1.0);
}

}  // namespace

double norm_pdf(double x) {
    require_finite(x, "norm_pdf: x");
    return kInvSqrt2Pi * exp_neg_half_square(x);
}

double norm_cdf(double x) {
    require_finite(x, "norm_cdf: x");
    if (x == 0.0) {
        return 0.5;
    }
    if (x > 0.0) {
        return 1.0 - norm_cdf(-x);
    }
    if (x > -8.0) {
        return 0.5 * std::erfc(-x * kInvSqrt2);
    }
    if (x < -38.6) {
        return 0.0;  // below the smallest subnormal
    }
    return norm_cdf_cf(x);
}

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("norm_quantile: p must be in (0,1)");
    }

    // Wichura's algorithm AS 241 (PPND16), then Halley refinement against
    // this library's own norm_cdf/norm_pdf so the round-trip closes.
    const double q = p - 0.5;
    double x;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        x = q *
            (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                  6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
              1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
            (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                  3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
              4.2313330701600911252e+1) * r + 1.0);
    } else {
        double r = q < 0.0 ? p : 1.0 - p;
        r = std::sqrt(-std::log(r));
        if (r <= 5.0) {
            r -= 1.6;
            x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                    3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                  4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                  2.05319162663775882187e+0) * r + 1.0);
        } else {
            r -= 5.0;
            x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                  5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
        }
        if (q < 0.0) x = -x;
    }

    for (int i = 0; i < 2; ++i) {
        const double d = norm_pdf(x);
        if (d < std::numeric_limits<double>::min()) break;
        const double r = (norm_cdf(x) - p) / d;
        x -= r / (1.0 + 0.5 * x * r);
    }
    return x;
}

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error("log_gamma: x must be positive and finite");
    }
    // Lanczos approximation, g = 7, 9 coefficients.
    static constexpr double kCoef[9] = {
        0.99999999999980993,   676.5203681218851,     -1259.1392167224028,
        771.32342877765313,    -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,  9.9843695780195716e-6, 1.5056327351493116e-7};

    if (x < 0.5) {
        // Reflection keeps the series argument >= 0.5.
        const double pi = 3.141592653589793238462643383279503;
        return std::log(pi / std::sin(pi * x)) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double a = kCoef[0];
    for (int i = 1; i < 9; ++i) {
        a += kCoef[i] / (z + static_cast<double>(i));
    }
    const double t = z + 7.5;
    return kLogSqrt2Pi + (z + 0.5) * std::log(t) - t + std::log(a);
}

double nct_cdf(const NctParams& params, double t) {
    if (params.nu < 1) {
        throw std::domain_error("nct_cdf: nu must be a positive integer");
    }
    require_finite(params.delta, "nct_cdf: delta");
    require_finite(t, "nct_cdf: t");

    const double nu = static_cast<double>(params.nu);
    const double delta = params.delta;
    const double root_nu = std::sqrt(nu);
    const double slope = t / root_nu;
    const double log_norm = (0.5 * nu - 1.0) * std::log(2.0) + log_gamma(0.5 * nu);

    // Integrand of Phi(t*x/sqrt(nu) - delta) against the chi_nu density,
    // with the weight evaluated in log space so large nu cannot underflow it.
    auto integrand = [&](double x) -> double {
        if (x <= 0.0) return 0.0;
        const double phi_factor = norm_cdf(slope * x - delta);
        if (phi_factor == 0.0) return 0.0;
        const double lw = (nu - 1.0) * std::log(x) - 0.5 * x * x - log_norm;
        if (lw < -745.0) return 0.0;
        return phi_factor * std::exp(lw);
    };

    // The weight mass beyond sqrt(nu)+12 is below 1e-17; start panels at the
    // weight peak and at the transition layer of the Phi factor so the
    // adaptive refinement cannot miss narrow structure.
    const double hi = root_nu + 12.0;
    std::vector<double> pts;
    pts.push_back(0.0);
    pts.push_back(hi);
    const double peak = std::sqrt(std::max(nu - 1.0, 0.5));
    for (double off : {-6.0, -3.0, 0.0, 3.0, 6.0}) {
        const double s = peak + off;
        if (s > 0.0 && s < hi) pts.push_back(s);
    }
    if (slope != 0.0) {
        for (double c : {-30.0, -8.0, -2.0, 0.0, 2.0, 8.0, 30.0}) {
            const double s = (delta + c) / slope;
            if (s > 0.0 && s < hi) pts.push_back(s);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    const quad::Outcome out = quad::integrate(integrand, pts);
    if (!out.converged) {
        throw convergence_error(
            "nct_cdf: quadrature did not converge (nu=" + std::to_string(params.nu) +
                ", delta=" + std::to_string(delta) + ", t=" + std::to_string(t) + ")",
            out.integral, out.error);
    }
    return std::clamp(out.integral, 0.0, 1.0);
}

}  // namespace fnc
