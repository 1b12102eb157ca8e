#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "prw/profile_norms.hpp"

namespace prw {

/// Inviscid Burgers rarefaction between speeds w_- < w_+, smoothed initially by
/// w0(x) = m + d tanh(x) with m the midpoint and d the half-gap.
class BurgersWave
{
public:
    BurgersWave(double w_minus, double w_plus) : w_minus_(w_minus), w_plus_(w_plus)
    {
        if (!(w_plus > w_minus)) {
            throw std::domain_error("BurgersWave: requires w_minus < w_plus");
        }
    }

    double w_minus() const { return w_minus_; }
    double w_plus() const { return w_plus_; }
    double midpoint() const { return 0.5 * (w_plus_ + w_minus_); }
    double half_gap() const { return 0.5 * (w_plus_ - w_minus_); }
    double gap() const { return w_plus_ - w_minus_; }

    /// w0(x). Written through the logistic function so that w0 - w_- and
    /// w_+ - w0 keep full relative accuracy deep in either tail.
    double initial(double x) const
    {
        const double d = half_gap();
        if (x < 0.0) {
            return w_minus_ + 2.0 * d * logistic(2.0 * x);
        }
        return w_plus_ - 2.0 * d * logistic(-2.0 * x);
    }

    struct InitialDerivatives
    {
        double d1, d2, d3;
    };

    InitialDerivatives initial_derivatives(double x) const
    {
        const double d = half_gap();
        const double th = std::tanh(x);
        const double ch = std::cosh(x);
        const double s = std::isfinite(ch) ? 1.0 / (ch * ch) : 0.0; // sech^2
        return {d * s, -2.0 * d * s * th, 2.0 * d * s * (2.0 * th * th - s)};
    }

    /// Rarefaction fan of the Riemann problem, w^r(x/t).
    double fan(double t, double x) const
    {
        if (!(t > 0.0)) {
            throw std::domain_error("BurgersWave::fan: requires t > 0");
        }
        if (x < w_minus_ * t) {
            return w_minus_;
        }
        if (x > w_plus_ * t) {
            return w_plus_;
        }
        return x / t;
    }

private:
    static double logistic(double z)
    {
        if (z >= 0.0) {
            return 1.0 / (1.0 + std::exp(-z));
        }
        const double e = std::exp(z);
        return e / (1.0 + e);
    }

    double w_minus_;
    double w_plus_;
};

/// w and its first three x-derivatives at one point.
struct BurgersSample
{
    double w;
    double w_x;
    double w_xx;
    double w_xxx;
    double foot; ///< characteristic foot point x0
};

inline constexpr double kDefaultRootTolerance = 1e-15;

/// Solves x0 + t w0(x0) = x. The map is strictly increasing, so the root is
/// unique and lies in [x - t w_+, x - t w_-]. Newton iterates are accepted only
/// while they stay inside the shrinking bracket; otherwise the step bisects.
inline double characteristic_foot(const BurgersWave& wave, double t, double x, double tol = kDefaultRootTolerance)
{
    if (!(tol > 0.0)) {
        throw std::domain_error("characteristic_foot: tolerance must be positive");
    }
    if (!(t >= 0.0)) {
        throw std::domain_error("characteristic_foot: requires t >= 0");
    }
    if (t == 0.0) {
        return x;
    }

    double lo = x - t * wave.w_plus();
    double hi = x - t * wave.w_minus();
    auto g = [&](double x0) { return x0 + t * wave.initial(x0) - x; };

    double x0;
    const double xi = x / t;
    if (xi > wave.w_minus() && xi < wave.w_plus()) {
        const double r = std::clamp((xi - wave.midpoint()) / wave.half_gap(), -1.0 + 1e-15, 1.0 - 1e-15);
        x0 = std::clamp(std::atanh(r), lo, hi);
    } else {
        x0 = std::clamp(x - t * wave.fan(t, x), lo, hi);
    }

    for (int it = 0; it < 400; ++it) {
        const double gv = g(x0);
        if (gv == 0.0) {
            return x0;
        }
        if (gv < 0.0) {
            lo = x0;
        } else {
            hi = x0;
        }
        const double slope = 1.0 + t * wave.initial_derivatives(x0).d1;
        double next = x0 - gv / slope;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        const double step = std::abs(next - x0);
        x0 = next;
        if (step <= tol * std::max(1.0, std::abs(x0)) || hi - lo <= tol * std::max(1.0, std::abs(x0))) {
            // one more Newton correction from the converged iterate
            const double gv2 = g(x0);
            const double corrected = x0 - gv2 / (1.0 + t * wave.initial_derivatives(x0).d1);
            if (corrected >= lo && corrected <= hi) {
                x0 = corrected;
            }
            return x0;
        }
    }
    throw std::runtime_error("characteristic_foot: root bracketing failed to converge");
}

/// Smooth solution of w_t + w w_x = 0 with data w0, by characteristics.
/// Derivatives follow from implicit differentiation of x = x0 + t w0(x0):
/// with D = 1 + t w0'(x0), w_x = w0'/D, w_xx = w0''/D^3,
/// w_xxx = w0'''/D^4 - 3 t (w0'')^2 / D^5.
inline BurgersSample evaluate(const BurgersWave& wave, double t, double x, double tol = kDefaultRootTolerance)
{
    if (!(tol > 0.0)) {
        throw std::domain_error("evaluate: tolerance must be positive");
    }
    if (!(t >= 0.0)) {
        throw std::domain_error("evaluate: requires t >= 0");
    }
    const double x0 = characteristic_foot(wave, t, x, tol);
    const auto d0 = wave.initial_derivatives(x0);
    const double D = 1.0 + t * d0.d1;
    const double D2 = D * D;
    const double D4 = D2 * D2;
    return {wave.initial(x0), d0.d1 / D, d0.d2 / (D2 * D), d0.d3 / D4 - 3.0 * t * d0.d2 * d0.d2 / (D4 * D), x0};
}

/// Truncated integration domain: the fan at time `t_fan` widened by `margin`
/// on both sides, with break points around both fan edges.
inline ProfileDomain fan_domain(double w_minus, double w_plus, double t_fan, double margin = 40.0)
{
    const double left = w_minus * t_fan;
    const double right = w_plus * t_fan;
    ProfileDomain dom{left - margin, right + margin, {}, {}};
    dom.breaks = {left - 20.0, left + 20.0, right - 20.0, right + 20.0, 0.5 * (left + right)};
    dom.focus = {{left - 25.0, left + 25.0}, {right - 25.0, right + 25.0}};
    return dom;
}

/// || d^order w(t, .) / dx^order ||_{L^p}, p = infinity allowed.
inline double lp_norm_of_derivative(const BurgersWave& wave, double t, int order, double p)
{
    if (!(t >= 0.0)) {
        throw std::domain_error("lp_norm_of_derivative: requires t >= 0");
    }
    if (order < 1 || order > 3) {
        throw std::domain_error("lp_norm_of_derivative: order must be 1, 2 or 3");
    }
    if (!(p >= 1.0)) {
        throw std::domain_error("lp_norm_of_derivative: exponent must be >= 1");
    }
    auto deriv = [&](double x) {
        const auto s = evaluate(wave, t, x);
        return order == 1 ? s.w_x : (order == 2 ? s.w_xx : s.w_xxx);
    };
    // w_-(1+t) and w_+(1+t) bound the fan at both Burgers times used in the
    // project (t for the Burgers study, 1+t for the approximate wave).
    const auto dom = fan_domain(wave.w_minus(), wave.w_plus(), 1.0 + t);
    if (std::isinf(p)) {
        return sup_abs(deriv, dom);
    }
    return lp_norm(deriv, dom, p);
}

/// sup_x |w(t, x) - w^r(x/t)|.
inline double sup_distance_to_fan(const BurgersWave& wave, double t)
{
    if (!(t > 0.0)) {
        throw std::domain_error("sup_distance_to_fan: requires t > 0");
    }
    auto diff = [&](double x) { return evaluate(wave, t, x).w - wave.fan(t, x); };
    auto dom = fan_domain(wave.w_minus(), wave.w_plus(), t);
    dom.focus.push_back({-25.0, 25.0});
    return sup_abs(diff, dom);
}

} // namespace prw
