#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace prw {

/// Isentropic gamma-law gas, p(rho) = rho^gamma / gamma.
class GasModel
{
public:
    explicit GasModel(double gamma = 1.4) : gamma_(gamma)
    {
        if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
            throw std::domain_error("GasModel: adiabatic exponent must satisfy gamma >= 1, got " +
                                    std::to_string(gamma));
        }
    }

    double gamma() const { return gamma_; }
    bool isothermal() const { return gamma_ == 1.0; }

    double pressure(double rho) const
    {
        if (rho < 0.0) {
            throw std::domain_error("pressure: negative density");
        }
        return std::pow(rho, gamma_) / gamma_;
    }

    /// p'(rho) = rho^(gamma-1)
    double pressure_derivative(double rho) const
    {
        if (rho < 0.0) {
            throw std::domain_error("pressure_derivative: negative density");
        }
        return isothermal() ? 1.0 : std::pow(rho, gamma_ - 1.0);
    }

    /// c = sqrt(p'(rho)) = rho^((gamma-1)/2)
    double sound_speed(double rho) const
    {
        if (rho < 0.0) {
            throw std::domain_error("sound_speed: negative density");
        }
        return isothermal() ? 1.0 : std::pow(rho, 0.5 * (gamma_ - 1.0));
    }

    bool operator==(const GasModel&) const = default;

private:
    double gamma_;
};

} // namespace prw
