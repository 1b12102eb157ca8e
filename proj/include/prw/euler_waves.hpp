#pragma once

#include <cmath>
#include <stdexcept>

#include "prw/gas.hpp"

namespace prw {

/// Raised when an operation is handed data that violates its documented contract
/// (e.g. a fan requested for states that are not joined by a 2-rarefaction).
struct ContractError : std::logic_error
{
    using std::logic_error::logic_error;
};

enum class Family { first = 1, second = 2 };

struct State1D
{
    double rho;
    double u;
};

namespace detail {

inline void require_positive_density(double rho, const char* where)
{
    if (!(rho > 0.0)) {
        throw std::domain_error(std::string(where) + ": density must be positive");
    }
}

} // namespace detail

/// Eigenvalues of the 1D isentropic Euler system, lambda_{1,2} = u -/+ sqrt(p'(rho)).
inline double characteristic_speed(const GasModel& gas, Family family, double rho, double u)
{
    detail::require_positive_density(rho, "characteristic_speed");
    const double c = gas.sound_speed(rho);
    return family == Family::first ? u - c : u + c;
}

/// Antiderivative of sqrt(p'(s))/s. The additive constant is fixed so that
/// A(rho) = 2/(gamma-1) rho^((gamma-1)/2) for gamma > 1 and A(rho) = ln(rho) for
/// gamma = 1. Only differences of A enter the wave curves.
inline double invariant_antiderivative(const GasModel& gas, double rho)
{
    detail::require_positive_density(rho, "invariant_antiderivative");
    if (gas.isothermal()) {
        return std::log(rho);
    }
    return 2.0 / (gas.gamma() - 1.0) * gas.sound_speed(rho);
}

/// z_i = u + (-1)^(i+1) A(rho); z_2 is constant across a 2-rarefaction.
inline double riemann_invariant(const GasModel& gas, Family family, double rho, double u)
{
    const double a = invariant_antiderivative(gas, rho);
    return family == Family::first ? u + a : u - a;
}

/// Velocity u_+ placing (rho_+, u_+) on the 2-wave curve through (rho_-, u_-).
inline double connect_end_states(const GasModel& gas, double rho_minus, double u_minus, double rho_plus)
{
    detail::require_positive_density(rho_minus, "connect_end_states");
    detail::require_positive_density(rho_plus, "connect_end_states");
    if (rho_plus == rho_minus) {
        return u_minus;
    }
    return u_minus + invariant_antiderivative(gas, rho_plus) - invariant_antiderivative(gas, rho_minus);
}

/// End states of a candidate 2-rarefaction together with derived wave quantities.
struct RiemannData
{
    double gamma = 1.0;
    double rho_minus = 1.0;
    double u_minus = 0.0;
    double rho_plus = 1.0;
    double u_plus = 0.0;
    double alpha = 0.0;   ///< |rho_+ - rho_-| + |u_+ - u_-|
    double w_minus = 0.0; ///< lambda_2 at the left state
    double w_plus = 0.0;  ///< lambda_2 at the right state
    double z2 = 0.0;      ///< z_2 at the left state
    bool valid = false;   ///< true iff the states are joined by an expanding 2-wave

    State1D left() const { return {rho_minus, u_minus}; }
    State1D right() const { return {rho_plus, u_plus}; }
    bool degenerate() const { return alpha == 0.0; }
};

inline constexpr double kInvariantMatchTolerance = 1e-12;

inline RiemannData make_riemann_data(const GasModel& gas, double rho_minus, double u_minus, double rho_plus,
                                     double u_plus)
{
    detail::require_positive_density(rho_minus, "make_riemann_data");
    detail::require_positive_density(rho_plus, "make_riemann_data");

    RiemannData d;
    d.gamma = gas.gamma();
    d.rho_minus = rho_minus;
    d.u_minus = u_minus;
    d.rho_plus = rho_plus;
    d.u_plus = u_plus;
    d.alpha = std::abs(rho_plus - rho_minus) + std::abs(u_plus - u_minus);
    d.w_minus = characteristic_speed(gas, Family::second, rho_minus, u_minus);
    d.w_plus = characteristic_speed(gas, Family::second, rho_plus, u_plus);
    d.z2 = riemann_invariant(gas, Family::second, rho_minus, u_minus);

    const double z2_plus = riemann_invariant(gas, Family::second, rho_plus, u_plus);
    const bool on_curve = std::abs(z2_plus - d.z2) <= kInvariantMatchTolerance * (1.0 + std::abs(d.z2));
    d.valid = on_curve && d.w_plus > d.w_minus;
    return d;
}

/// Convenience: build the 2-rarefaction with u_+ chosen by connect_end_states.
inline RiemannData make_rarefaction(const GasModel& gas, double rho_minus, double u_minus, double rho_plus)
{
    return make_riemann_data(gas, rho_minus, u_minus, rho_plus,
                             connect_end_states(gas, rho_minus, u_minus, rho_plus));
}

/// The state with lambda_2 = w and z_2 = z2. Shared by the exact fan and the
/// smooth approximate wave; w must exceed the invariant's vacuum speed.
inline State1D state_on_wave_curve(const GasModel& gas, double z2, double w)
{
    if (gas.isothermal()) {
        // lambda_2 = u + 1, z_2 = u - ln(rho)
        const double u = w - 1.0;
        return {std::exp(u - z2), u};
    }
    const double g = gas.gamma();
    const double c = (g - 1.0) / (g + 1.0) * (w - z2);
    if (!(c > 0.0)) {
        throw std::domain_error("state_on_wave_curve: speed below the vacuum limit of the wave curve");
    }
    return {std::pow(c, 2.0 / (g - 1.0)), w - c};
}

/// Self-similar centered 2-rarefaction (rho^r, u^r)(xi), xi = x/t.
inline State1D rarefaction_fan(const GasModel& gas, const RiemannData& data, double xi)
{
    if (!data.valid) {
        throw ContractError("rarefaction_fan: end states are not a valid 2-rarefaction");
    }
    if (xi <= data.w_minus) {
        return data.left();
    }
    if (xi >= data.w_plus) {
        return data.right();
    }
    return state_on_wave_curve(gas, data.z2, xi);
}

/// Fan that also accepts the zero-strength wave (constant state everywhere).
inline State1D fan_or_constant(const GasModel& gas, const RiemannData& data, double xi)
{
    if (data.degenerate()) {
        return data.left();
    }
    return rarefaction_fan(gas, data, xi);
}

} // namespace prw
