#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace fnc::quad {

// 21-point Kronrod rule with embedded 10-point Gauss rule. Node and weight
// constants from QUADPACK dqk21 (evaluated with 80-digit arithmetic by
// L. W. Fullerton, Bell Labs, 1981). Only the nonnegative abscissae are
// stored; the rule is symmetric.
inline constexpr double kXgk21[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double kWgk21[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg10[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a = 0.0;
    double b = 0.0;
    double integral = 0.0;
    double error = 0.0;
};

// Single GK21 panel with the QUADPACK practical error estimate.
template <typename F>
Panel gk21(F&& f, double a, double b) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double uflow = std::numeric_limits<double>::min();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    double fv[21];
    const double fc = f(c);
    fv[10] = fc;
    double resk = kWgk21[10] * fc;
    double resg = 0.0;
    double resabs = std::fabs(resk);
    for (int j = 0; j < 10; ++j) {
        const double dx = h * kXgk21[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        fv[j] = f1;
        fv[20 - j] = f2;
        resk += kWgk21[j] * (f1 + f2);
        resabs += kWgk21[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) resg += kWg10[j / 2] * (f1 + f2);
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk21[10] * std::fabs(fc - reskh);
    for (int j = 0; j < 10; ++j) {
        resasc += kWgk21[j] * (std::fabs(fv[j] - reskh) + std::fabs(fv[20 - j] - reskh));
    }
    resabs *= std::fabs(h);
    resasc *= std::fabs(h);

    Panel p;
    p.a = a;
    p.b = b;
    p.integral = resk * h;
    p.error = std::fabs((resk - resg) * h);
    if (resasc != 0.0 && p.error != 0.0) {
        p.error = resasc * std::min(1.0, std::pow(200.0 * p.error / resasc, 1.5));
    }
    if (resabs > uflow / (50.0 * eps)) {
        p.error = std::max(50.0 * eps * resabs, p.error);
    }
    return p;
}

struct Options {
    double rel_tol = 1e-13;
    // Convergence floor for integrals that are identically ~0.
    double abs_tol = 1e-290;
    int max_panels = 400;
};

struct Outcome {
    double integral = 0.0;
    double error = 0.0;
    int panels = 0;
    bool converged = false;
};

// Adaptive integration starting from the panels delimited by `breakpoints`
// (ascending). The worst panel is bisected until the summed error estimate
// meets max(rel_tol*|I|, abs_tol) or the panel budget runs out.
template <typename F>
Outcome integrate(F&& f, const std::vector<double>& breakpoints, const Options& opt = {}) {
    std::vector<Panel> panels;
    panels.reserve(static_cast<std::size_t>(opt.max_panels));
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (breakpoints[i + 1] > breakpoints[i]) {
            panels.push_back(gk21(f, breakpoints[i], breakpoints[i + 1]));
        }
    }

    Outcome out;
    for (;;) {
        double total = 0.0;
        double toterr = 0.0;
        for (const Panel& p : panels) {
            total += p.integral;
            toterr += p.error;
        }
        out.integral = total;
        out.error = toterr;
        out.panels = static_cast<int>(panels.size());
        if (toterr <= std::max(opt.rel_tol * std::fabs(total), opt.abs_tol)) {
            out.converged = true;
            return out;
        }
        if (out.panels >= opt.max_panels) {
            return out;
        }
        auto worst = std::max_element(
            panels.begin(), panels.end(),
            [](const Panel& x, const Panel& y) { return x.error < y.error; });
        const double a = worst->a;
        const double b = worst->b;
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) {
            // Interval no longer splittable at double precision.
            return out;
        }
        *worst = gk21(f, a, mid);
        panels.push_back(gk21(f, mid, b));
    }
}

}  // namespace fnc::quad
