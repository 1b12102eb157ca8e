#pragma once

// Norms of smooth 1D profiles on a truncated real line: adaptive L^p quadrature
// and a refined grid search for the supremum.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace prw {

/// Interval [lo, hi] with interior break points where the integrand changes
/// character (fan edges). Break points outside (lo, hi) are ignored.
struct ProfileDomain
{
    double lo;
    double hi;
    std::vector<double> breaks;
    /// Sub-intervals that need dense sampling when searching for a maximum.
    std::vector<std::pair<double, double>> focus;

    std::vector<double> nodes() const
    {
        std::vector<double> pts{lo, hi};
        for (double b : breaks) {
            if (b > lo && b < hi) {
                pts.push_back(b);
            }
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return pts;
    }
};

/// (integral of |f|^p)^(1/p) over the domain, p in [1, inf).
template <typename F>
double lp_norm(F&& f, const ProfileDomain& domain, double p, double rel_tol = 1e-12)
{
    if (!(p >= 1.0)) {
        throw std::domain_error("lp_norm: exponent must be >= 1");
    }
    using Integrator = boost::math::quadrature::gauss_kronrod<double, 31>;
    const auto pts = domain.nodes();
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        auto integrand = [&](double x) { return std::pow(std::abs(f(x)), p); };
        total += Integrator::integrate(integrand, pts[k], pts[k + 1], 12, rel_tol);
    }
    return std::pow(total, 1.0 / p);
}

/// sup |f| over the domain. A coarse sweep (uniform over the whole interval,
/// denser on the focus windows) locates candidate peaks; each candidate is then
/// resampled on a shrinking bracket until the peak value changes by less than tol.
template <typename F>
double sup_abs(F&& f, const ProfileDomain& domain, double tol = 1e-10)
{
    std::vector<double> xs;
    constexpr int kCoarse = 4001;
    for (int k = 0; k < kCoarse; ++k) {
        xs.push_back(domain.lo + (domain.hi - domain.lo) * k / (kCoarse - 1));
    }
    for (auto [a, b] : domain.focus) {
        a = std::max(a, domain.lo);
        b = std::min(b, domain.hi);
        if (b <= a) {
            continue;
        }
        const int n = static_cast<int>(std::ceil((b - a) / 0.02)) + 1;
        for (int k = 0; k < n; ++k) {
            xs.push_back(a + (b - a) * k / (n - 1));
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<double> vs(xs.size());
    double coarse_max = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        vs[k] = std::abs(f(xs[k]));
        coarse_max = std::max(coarse_max, vs[k]);
    }
    if (coarse_max == 0.0) {
        return 0.0;
    }

    double best = coarse_max;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const bool left_ok = k == 0 || vs[k] >= vs[k - 1];
        const bool right_ok = k + 1 == xs.size() || vs[k] >= vs[k + 1];
        if (!(left_ok && right_ok) || vs[k] < 0.5 * coarse_max) {
            continue;
        }
        double a = xs[k == 0 ? 0 : k - 1];
        double b = xs[k + 1 == xs.size() ? k : k + 1];
        double peak = vs[k];
        for (int level = 0; level < 200; ++level) {
            constexpr int kSub = 21;
            double new_peak = 0.0;
            double arg = a;
            for (int s = 0; s < kSub; ++s) {
                const double x = a + (b - a) * s / (kSub - 1);
                const double v = std::abs(f(x));
                if (v > new_peak) {
                    new_peak = v;
                    arg = x;
                }
            }
            const double h = (b - a) / (kSub - 1);
            a = std::max(domain.lo, arg - h);
            b = std::min(domain.hi, arg + h);
            const bool settled = std::abs(new_peak - peak) < tol * std::max(1.0, new_peak) && level > 2;
            peak = std::max(peak, new_peak);
            if (settled || b - a < 1e-13 * std::max(1.0, std::abs(arg))) {
                break;
            }
        }
        best = std::max(best, peak);
    }
    return best;
}

} // namespace prw
