#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "prw/burgers.hpp"
#include "prw/euler_waves.hpp"

namespace prw {

/// Approximate-wave fields and their x-derivatives at one point.
struct WaveSample
{
    double rho, u;
    double rho_x, u_x;
    double rho_xx, u_xx;
    double rho_xxx, u_xxx;
};

namespace detail {

inline void require_wave_data(const GasModel& gas, const RiemannData& data, const char* where)
{
    if (!(data.valid || data.degenerate())) {
        throw ContractError(std::string(where) + ": end states are not a valid 2-rarefaction");
    }
    if (gas.gamma() != data.gamma) {
        throw ContractError(std::string(where) + ": gas model does not match the Riemann data");
    }
}

} // namespace detail

/// Maps a Burgers sample w = lambda_2(rho, u) through the z_2-inversion.
/// For gamma > 1 the sound speed c = (gamma-1)/(gamma+1)(w - z_2) is linear in
/// w, u = w - c and rho = c^m with m = 2/(gamma-1); for gamma = 1,
/// u = w - 1 and rho = exp(w - 1 - z_2).
inline WaveSample wave_from_burgers(const GasModel& gas, double z2, const BurgersSample& b)
{
    WaveSample s{};
    if (gas.isothermal()) {
        s.u = b.w - 1.0;
        s.rho = std::exp(s.u - z2);
        s.u_x = b.w_x;
        s.u_xx = b.w_xx;
        s.u_xxx = b.w_xxx;
        s.rho_x = s.rho * b.w_x;
        s.rho_xx = s.rho * (b.w_x * b.w_x + b.w_xx);
        s.rho_xxx = s.rho * (b.w_x * b.w_x * b.w_x + 3.0 * b.w_x * b.w_xx + b.w_xxx);
        return s;
    }

    const double g = gas.gamma();
    const double k = (g - 1.0) / (g + 1.0);
    const double m = 2.0 / (g - 1.0);
    const double c = k * (b.w - z2);
    if (!(c > 0.0)) {
        throw std::domain_error("wave_from_burgers: speed below the vacuum limit");
    }
    const double c1 = k * b.w_x;
    const double c2 = k * b.w_xx;
    const double c3 = k * b.w_xxx;

    s.rho = std::pow(c, m);
    s.u = b.w - c;
    s.u_x = b.w_x - c1;
    s.u_xx = b.w_xx - c2;
    s.u_xxx = b.w_xxx - c3;

    // rho = c^m: successive derivatives through r1 = rho/c, r2 = rho/c^2, r3 = rho/c^3
    const double r1 = s.rho / c;
    const double r2 = r1 / c;
    const double r3 = r2 / c;
    s.rho_x = m * r1 * c1;
    s.rho_xx = m * (m - 1.0) * r2 * c1 * c1 + m * r1 * c2;
    s.rho_xxx = m * (m - 1.0) * (m - 2.0) * r3 * c1 * c1 * c1 + 3.0 * m * (m - 1.0) * r2 * c1 * c2 + m * r1 * c3;
    return s;
}

/// Burgers profile that drives the approximate wave of `data`.
inline BurgersWave driving_burgers(const RiemannData& data)
{
    return BurgersWave(data.w_minus, data.w_plus);
}

/// (rho_bar, u_bar) and derivatives at (t, x): lambda_2(rho_bar, u_bar) equals the
/// Burgers solution at time 1 + t and z_2 stays at its end-state value.
inline WaveSample evaluate_wave(const GasModel& gas, const RiemannData& data, double t, double x)
{
    detail::require_wave_data(gas, data, "evaluate_wave");
    if (!(t >= 0.0)) {
        throw std::domain_error("evaluate_wave: requires t >= 0");
    }
    if (data.degenerate()) {
        return {data.rho_minus, data.u_minus, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    }
    const auto b = evaluate(driving_burgers(data), 1.0 + t, x);
    return wave_from_burgers(gas, data.z2, b);
}

/// Approximate wave sampled on a 1D grid.
struct WaveProfile
{
    double time = 0.0;
    std::vector<double> grid_x;
    std::vector<double> rho_bar, u_bar;
    std::vector<double> rho_bar_x, u_bar_x;
    std::vector<double> rho_bar_xx, u_bar_xx;
    std::vector<double> rho_bar_xxx, u_bar_xxx;

    std::size_t size() const { return grid_x.size(); }
};

inline WaveProfile sample_profile(const GasModel& gas, const RiemannData& data, double t,
                                  const std::vector<double>& grid_x)
{
    for (std::size_t i = 1; i < grid_x.size(); ++i) {
        if (!(grid_x[i] > grid_x[i - 1])) {
            throw std::domain_error("sample_profile: grid must be strictly increasing");
        }
    }
    WaveProfile p;
    p.time = t;
    p.grid_x = grid_x;
    const std::size_t n = grid_x.size();
    for (auto* v : {&p.rho_bar, &p.u_bar, &p.rho_bar_x, &p.u_bar_x, &p.rho_bar_xx, &p.u_bar_xx, &p.rho_bar_xxx,
                    &p.u_bar_xxx}) {
        v->resize(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = evaluate_wave(gas, data, t, grid_x[i]);
        p.rho_bar[i] = s.rho;
        p.u_bar[i] = s.u;
        p.rho_bar_x[i] = s.rho_x;
        p.u_bar_x[i] = s.u_x;
        p.rho_bar_xx[i] = s.rho_xx;
        p.u_bar_xx[i] = s.u_xx;
        p.rho_bar_xxx[i] = s.rho_xxx;
        p.u_bar_xxx[i] = s.u_xxx;
    }
    return p;
}

struct EulerResidual
{
    double mass;
    double momentum;
};

/// Max-norm residuals of the 1D Euler system on the approximate wave. Time
/// derivatives are centered differences over dt_probe; x-derivatives are exact.
inline EulerResidual euler_residual(const GasModel& gas, const RiemannData& data, double t,
                                    const std::vector<double>& grid_x, double dt_probe)
{
    detail::require_wave_data(gas, data, "euler_residual");
    if (!(dt_probe > 0.0) || !(dt_probe < t)) {
        throw std::domain_error("euler_residual: requires 0 < dt_probe < t");
    }
    EulerResidual r{0.0, 0.0};
    for (double x : grid_x) {
        const auto a = evaluate_wave(gas, data, t + dt_probe, x);
        const auto b = evaluate_wave(gas, data, t - dt_probe, x);
        const auto s = evaluate_wave(gas, data, t, x);

        const double rho_t = (a.rho - b.rho) / (2.0 * dt_probe);
        const double m_t = (a.rho * a.u - b.rho * b.u) / (2.0 * dt_probe);
        const double mass_flux_x = s.rho_x * s.u + s.rho * s.u_x;
        const double mom_flux_x = s.rho_x * s.u * s.u + 2.0 * s.rho * s.u * s.u_x +
                                  gas.pressure_derivative(s.rho) * s.rho_x;

        r.mass = std::max(r.mass, std::abs(rho_t + mass_flux_x));
        r.momentum = std::max(r.momentum, std::abs(m_t + mom_flux_x));
    }
    return r;
}

enum class WaveComponent { rho, u, both };

/// L^p norm of the order-th x-derivative of rho_bar, u_bar, or their sum
/// ||rho_bar^(k)||_p + ||u_bar^(k)||_p.
inline double lemma22_norms(const GasModel& gas, const RiemannData& data, double t, int order, double p,
                            WaveComponent component = WaveComponent::both)
{
    detail::require_wave_data(gas, data, "lemma22_norms");
    if (!(t >= 0.0)) {
        throw std::domain_error("lemma22_norms: requires t >= 0");
    }
    if (order < 1 || order > 3) {
        throw std::domain_error("lemma22_norms: order must be 1, 2 or 3");
    }
    if (!(p >= 1.0)) {
        throw std::domain_error("lemma22_norms: exponent must be >= 1");
    }
    if (data.degenerate()) {
        return 0.0;
    }
    auto pick = [&](bool want_rho) {
        return [&, want_rho](double x) {
            const auto s = evaluate_wave(gas, data, t, x);
            if (want_rho) {
                return order == 1 ? s.rho_x : (order == 2 ? s.rho_xx : s.rho_xxx);
            }
            return order == 1 ? s.u_x : (order == 2 ? s.u_xx : s.u_xxx);
        };
    };
    const auto dom = fan_domain(data.w_minus, data.w_plus, 1.0 + t);
    auto norm_of = [&](bool want_rho) {
        return std::isinf(p) ? sup_abs(pick(want_rho), dom) : lp_norm(pick(want_rho), dom, p);
    };
    switch (component) {
    case WaveComponent::rho:
        return norm_of(true);
    case WaveComponent::u:
        return norm_of(false);
    case WaveComponent::both:
        break;
    }
    return norm_of(true) + norm_of(false);
}

/// sup_x (|rho_bar - rho^r| + |u_bar - u^r|)(t, x) against the exact fan at x/t.
inline double wave_sup_distance_to_fan(const GasModel& gas, const RiemannData& data, double t)
{
    detail::require_wave_data(gas, data, "wave_sup_distance_to_fan");
    if (!(t > 0.0)) {
        throw std::domain_error("wave_sup_distance_to_fan: requires t > 0");
    }
    if (data.degenerate()) {
        return 0.0;
    }
    auto diff = [&](double x) {
        const auto s = evaluate_wave(gas, data, t, x);
        const auto f = rarefaction_fan(gas, data, x / t);
        return std::abs(s.rho - f.rho) + std::abs(s.u - f.u);
    };
    auto dom = fan_domain(data.w_minus, data.w_plus, 1.0 + t);
    dom.focus.push_back({-25.0, 25.0});
    return sup_abs(diff, dom);
}

} // namespace prw
