#pragma once

// Perturbation fields relative to the approximate wave and the functionals
// monitored along a run: Sobolev norms, the u_bar_x-weighted norm, potential
// energy, dissipation terms, sup distances, and log-log rate fits.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "prw/approx_wave.hpp"
#include "prw/grid.hpp"

namespace prw {

using Field = std::vector<double>;

struct PerturbationFields
{
    Grid grid;
    Field phi;    // rho - rho_bar
    Field varphi; // u - u_bar
    Field psi;    // v
};

inline PerturbationFields perturbation_fields(const FlowState& s, const GasModel& gas, const RiemannData& data)
{
    const Grid& g = s.grid;
    PerturbationFields f{g, Field(g.size()), Field(g.size()), Field(g.size())};
    for (int i = 0; i < g.nx; ++i) {
        const auto bar = evaluate_wave(gas, data, s.time, g.x(i));
        for (int j = 0; j < g.ny; ++j) {
            const auto k = g.index(i, j);
            f.phi[k] = s.rho[k] - bar.rho;
            f.varphi[k] = s.u(k) - bar.u;
            f.psi[k] = s.v(k);
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Difference operators. Second order throughout: centered in the interior,
// periodic in y, one-sided at the two x edges.

namespace detail {

inline void require_field(const Field& f, const Grid& g)
{
    if (f.size() != g.size()) {
        throw std::domain_error("field size does not match grid");
    }
    if (g.nx < 3 || g.ny < 3) {
        throw std::domain_error("grid needs at least 3 cells in each direction");
    }
}

} // namespace detail

inline Field diff_x(const Field& f, const Grid& g)
{
    detail::require_field(f, g);
    Field out(f.size());
    const double h = g.dx();
    const int nx = g.nx, ny = g.ny;
    auto at = [&](int i, int j) { return f[g.index(i, j)]; };
    for (int j = 0; j < ny; ++j) {
        out[g.index(0, j)] = (-3.0 * at(0, j) + 4.0 * at(1, j) - at(2, j)) / (2.0 * h);
        out[g.index(nx - 1, j)] = (3.0 * at(nx - 1, j) - 4.0 * at(nx - 2, j) + at(nx - 3, j)) / (2.0 * h);
        for (int i = 1; i < nx - 1; ++i) {
            out[g.index(i, j)] = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
        }
    }
    return out;
}

inline Field diff_y(const Field& f, const Grid& g)
{
    detail::require_field(f, g);
    Field out(f.size());
    const double h = g.dy();
    const int ny = g.ny;
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            out[g.index(i, j)] = (f[g.index(i, (j + 1) % ny)] - f[g.index(i, (j + ny - 1) % ny)]) / (2.0 * h);
        }
    }
    return out;
}

inline Field diff_xx(const Field& f, const Grid& g)
{
    detail::require_field(f, g);
    Field out(f.size());
    const double h2 = g.dx() * g.dx();
    const int nx = g.nx, ny = g.ny;
    auto at = [&](int i, int j) { return f[g.index(i, j)]; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx - 1; ++i) {
            out[g.index(i, j)] = (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / h2;
        }
        if (nx >= 4) {
            out[g.index(0, j)] = (2.0 * at(0, j) - 5.0 * at(1, j) + 4.0 * at(2, j) - at(3, j)) / h2;
            out[g.index(nx - 1, j)] =
                (2.0 * at(nx - 1, j) - 5.0 * at(nx - 2, j) + 4.0 * at(nx - 3, j) - at(nx - 4, j)) / h2;
        } else {
            out[g.index(0, j)] = out[g.index(1, j)];
            out[g.index(nx - 1, j)] = out[g.index(nx - 2, j)];
        }
    }
    return out;
}

inline Field diff_yy(const Field& f, const Grid& g)
{
    detail::require_field(f, g);
    Field out(f.size());
    const double h2 = g.dy() * g.dy();
    const int ny = g.ny;
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            out[g.index(i, j)] =
                (f[g.index(i, (j + 1) % ny)] - 2.0 * f[g.index(i, j)] + f[g.index(i, (j + ny - 1) % ny)]) / h2;
        }
    }
    return out;
}

/// Midpoint-rule squared L^2 norm.
inline double l2_squared(const Field& f, const Grid& g)
{
    double s = 0.0;
    for (double v : f) s += v * v;
    return s * g.cell_area();
}

/// Squared L^2 norms of all derivatives of one field up to third order.
struct DerivativeNorms
{
    double f = 0, x = 0, y = 0;
    double xx = 0, xy = 0, yy = 0;
    double xxx = 0, xxy = 0, xyy = 0, yyy = 0;

    /// multi-index H^k, squared
    double h0() const { return f; }
    double h1() const { return f + x + y; }
    double h2() const { return h1() + xx + xy + yy; }
    /// |grad^k f|^2 with the tensor (Frobenius) count of mixed partials
    double grad1() const { return x + y; }
    double grad2() const { return xx + 2.0 * xy + yy; }
    double grad3() const { return xxx + 3.0 * xxy + 3.0 * xyy + yyy; }
};

inline DerivativeNorms derivative_norms(const Field& f, const Grid& g, bool third_order = true)
{
    detail::require_field(f, g);
    DerivativeNorms n;
    const Field fx = diff_x(f, g), fy = diff_y(f, g);
    const Field fxx = diff_xx(f, g), fyy = diff_yy(f, g), fxy = diff_y(fx, g);
    n.f = l2_squared(f, g);
    n.x = l2_squared(fx, g);
    n.y = l2_squared(fy, g);
    n.xx = l2_squared(fxx, g);
    n.xy = l2_squared(fxy, g);
    n.yy = l2_squared(fyy, g);
    if (third_order) {
        n.xxx = l2_squared(diff_x(fxx, g), g);
        n.xxy = l2_squared(diff_y(fxx, g), g);
        n.xyy = l2_squared(diff_x(fyy, g), g);
        n.yyy = l2_squared(diff_y(fyy, g), g);
    }
    return n;
}

struct SobolevNorms
{
    double l2 = 0;
    double h1 = 0;
    double h2 = 0;
};

/// L^2, H^1, H^2 norms of a field tuple (squares summed over components).
inline SobolevNorms sobolev_norms(const std::vector<const Field*>& fields, const Grid& g)
{
    double s0 = 0, s1 = 0, s2 = 0;
    for (const Field* f : fields) {
        const auto n = derivative_norms(*f, g, false);
        s0 += n.h0();
        s1 += n.h1();
        s2 += n.h2();
    }
    return {std::sqrt(s0), std::sqrt(s1), std::sqrt(s2)};
}

inline SobolevNorms sobolev_norms(const Field& f, const Grid& g) { return sobolev_norms({&f}, g); }

/// Right side of the strip Sobolev product bound for one scalar field:
/// sqrt(2) (|f|^(1/2) |f_y|^(1/2) + |f_x|^(1/2) |f_xy|^(1/2)).
/// Holds for fields with zero mean in y; y-independent fields make the
/// right side vanish.
inline double sobolev_sup_bound(const Field& f, const Grid& g)
{
    const auto n = derivative_norms(f, g, false);
    return std::sqrt(2.0) * (std::pow(n.f * n.y, 0.25) + std::pow(n.x * n.xy, 0.25));
}

// ---------------------------------------------------------------------------

/// Phi(rho, rho_bar) such that rho * Phi is the potential-energy density.
inline double potential_density(const GasModel& gas, double rho, double rho_bar)
{
    if (!(rho > 0.0) || !(rho_bar > 0.0)) {
        throw std::domain_error("potential energy needs positive densities");
    }
    if (gas.isothermal()) {
        return std::log(rho / rho_bar) + rho_bar / rho - 1.0;
    }
    const double phi = rho - rho_bar;
    const double num = gas.pressure(rho) - gas.pressure(rho_bar) - gas.pressure_derivative(rho_bar) * phi;
    return num / ((gas.gamma() - 1.0) * rho);
}

inline double potential_energy(const FlowState& s, const GasModel& gas, const RiemannData& data)
{
    const Grid& g = s.grid;
    double sum = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double rho_bar = evaluate_wave(gas, data, s.time, g.x(i)).rho;
        for (int j = 0; j < g.ny; ++j) {
            const double r = s.rho[g.index(i, j)];
            sum += r * potential_density(gas, r, rho_bar);
        }
    }
    return sum * g.cell_area();
}

/// integral of u_bar_x (phi^2 + varphi^2) over the strip.
inline double weighted_norm(const PerturbationFields& f, const WaveProfile& profile)
{
    const Grid& g = f.grid;
    if (profile.size() != static_cast<std::size_t>(g.nx)) {
        throw std::domain_error("weighted_norm: profile and field grids differ");
    }
    for (int i = 0; i < g.nx; ++i) {
        if (std::abs(profile.grid_x[i] - g.x(i)) > 1e-12 * std::max(1.0, std::abs(g.x(i)))) {
            throw std::domain_error("weighted_norm: profile and field grids differ");
        }
    }
    double sum = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double w = profile.u_bar_x[i];
        for (int j = 0; j < g.ny; ++j) {
            const auto k = g.index(i, j);
            sum += w * (f.phi[k] * f.phi[k] + f.varphi[k] * f.varphi[k]);
        }
    }
    return sum * g.cell_area();
}

/// max over cells of |rho - rho_r| + |u - u_r| + |v| against the exact fan at x/t.
inline double sup_error_vs_fan(const FlowState& s, const GasModel& gas, const RiemannData& data)
{
    if (!(s.time > 0.0)) {
        throw std::domain_error("sup_error_vs_fan: the fan is defined for t > 0 only");
    }
    const Grid& g = s.grid;
    double m = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const auto r = fan_or_constant(gas, data, g.x(i) / s.time);
        for (int j = 0; j < g.ny; ++j) {
            const auto k = g.index(i, j);
            m = std::max(m, std::abs(s.rho[k] - r.rho) + std::abs(s.u(k) - r.u) + std::abs(s.v(k)));
        }
    }
    return m;
}

/// Same distance measured against the Riemann step data (the t -> 0 limit of the fan).
inline double sup_error_vs_step(const FlowState& s, const RiemannData& data)
{
    const Grid& g = s.grid;
    double m = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        const double rr = x < 0.0 ? data.rho_minus : data.rho_plus;
        const double ur = x < 0.0 ? data.u_minus : data.u_plus;
        for (int j = 0; j < g.ny; ++j) {
            const auto k = g.index(i, j);
            m = std::max(m, std::abs(s.rho[k] - rr) + std::abs(s.u(k) - ur) + std::abs(s.v(k)));
        }
    }
    return m;
}

/// max over cells of the pointwise Euclidean norm of (phi, varphi, psi).
inline double sup_perturbation(const PerturbationFields& f)
{
    double m = 0.0;
    for (std::size_t k = 0; k < f.phi.size(); ++k) {
        m = std::max(m, std::sqrt(f.phi[k] * f.phi[k] + f.varphi[k] * f.varphi[k] + f.psi[k] * f.psi[k]));
    }
    return m;
}

// ---------------------------------------------------------------------------

struct DiagnosticsRecord
{
    double t = 0;
    double l2_pert = 0;
    double h1_pert = 0;
    double h2_pert = 0;
    double wgt = 0;
    double grad_diss = 0;
    double d3 = 0;
    double pot = 0;
    double sup_fan = 0;
    double sup_pert = 0;
    double cum_wgt = 0;
    double cum_grad = 0;
};

inline constexpr const char* kDiagnosticsHeader =
    "t,l2_pert,h1_pert,h2_pert,wgt,grad_diss,d3,pot,sup_fan,sup_pert,cum_wgt,cum_grad";

/// Snapshot functionals; cum_* are left at zero (see DiagnosticsTracker).
inline DiagnosticsRecord measure(const FlowState& s, const GasModel& gas, const RiemannData& data)
{
    const auto f = perturbation_fields(s, gas, data);
    const Grid& g = s.grid;
    DiagnosticsRecord r;
    r.t = s.time;

    double s0 = 0, s1 = 0, s2 = 0, grad = 0, d3 = 0;
    const Field* comps[3] = {&f.phi, &f.varphi, &f.psi};
    for (int c = 0; c < 3; ++c) {
        const auto n = derivative_norms(*comps[c], g, c > 0);
        s0 += n.h0();
        s1 += n.h1();
        s2 += n.h2();
        grad += n.grad1() + n.grad2();
        if (c > 0) d3 += n.grad3();
    }
    r.l2_pert = std::sqrt(s0);
    r.h1_pert = std::sqrt(s1);
    r.h2_pert = std::sqrt(s2);
    r.grad_diss = grad;
    r.d3 = d3;
    r.wgt = weighted_norm(f, sample_profile(gas, data, s.time, g.x_centers()));
    r.pot = potential_energy(s, gas, data);
    r.sup_fan = s.time > 0.0 ? sup_error_vs_fan(s, gas, data) : sup_error_vs_step(s, data);
    r.sup_pert = sup_perturbation(f);
    return r;
}

/// Running trapezoid integrals of wgt and grad_diss over the recorded times.
class DiagnosticsTracker
{
public:
    DiagnosticsTracker() = default;
    explicit DiagnosticsTracker(const DiagnosticsRecord& last) : last_(last) {}

    DiagnosticsRecord add(DiagnosticsRecord r)
    {
        if (last_) {
            const double dt = r.t - last_->t;
            if (dt < 0.0) {
                throw std::domain_error("diagnostics times must be nondecreasing");
            }
            r.cum_wgt = last_->cum_wgt + 0.5 * dt * (last_->wgt + r.wgt);
            r.cum_grad = last_->cum_grad + 0.5 * dt * (last_->grad_diss + r.grad_diss);
        } else {
            r.cum_wgt = 0.0;
            r.cum_grad = 0.0;
        }
        last_ = r;
        return r;
    }

    const std::optional<DiagnosticsRecord>& last() const { return last_; }

private:
    std::optional<DiagnosticsRecord> last_;
};

// ---------------------------------------------------------------------------

struct RateFit
{
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    std::size_t points = 0;
};

/// Least-squares fit of log(value) against log(t) over t in [t_lo, t_hi].
inline RateFit decay_rate_fit(const std::vector<double>& t, const std::vector<double>& value, double t_lo,
                              double t_hi)
{
    if (t.size() != value.size()) {
        throw std::invalid_argument("decay_rate_fit: series lengths differ");
    }
    std::vector<double> X, Y;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t_lo || t[k] > t_hi) continue;
        if (!(value[k] > 0.0) || !(t[k] > 0.0)) {
            throw std::domain_error("decay_rate_fit: nonpositive value or time inside the window");
        }
        X.push_back(std::log(t[k]));
        Y.push_back(std::log(value[k]));
    }
    const std::size_t n = X.size();
    if (n < 5) {
        throw std::domain_error("decay_rate_fit: need at least 5 points inside the window");
    }
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += X[k];
        my += Y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (X[k] - mx) * (X[k] - mx);
        sxy += (X[k] - mx) * (Y[k] - my);
        syy += (Y[k] - my) * (Y[k] - my);
    }
    if (sxx == 0.0) {
        throw std::domain_error("decay_rate_fit: window holds a single time");
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.points = n;
    double sse = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double e = Y[k] - (fit.intercept + fit.slope * X[k]);
        sse += e * e;
    }
    fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return fit;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv_header(std::ostream& os) { os << kDiagnosticsHeader << '\n'; }

inline void write_csv_row(std::ostream& os, const DiagnosticsRecord& r)
{
    const double v[] = {r.t,  r.l2_pert, r.h1_pert, r.h2_pert,  r.wgt,     r.grad_diss,
                        r.d3, r.pot,     r.sup_fan, r.sup_pert, r.cum_wgt, r.cum_grad};
    for (std::size_t k = 0; k < std::size(v); ++k) {
        if (k) os << ',';
        os << format_double(v[k]);
    }
    os << '\n';
}

/// Columns of a CSV with a header line, keyed by name.
struct CsvTable
{
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    const std::vector<double>& column(const std::string& name) const
    {
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (names[k] == name) return columns[k];
        }
        throw std::invalid_argument("no column named '" + name + "'");
    }
};

inline CsvTable read_csv(std::istream& in)
{
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty CSV");
    }
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.names.push_back(cell);
    }
    t.columns.resize(t.names.size());
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (c >= t.names.size()) {
                throw std::runtime_error("CSV row " + std::to_string(row) + " has too many cells");
            }
            t.columns[c++].push_back(std::stod(cell));
        }
        if (c != t.names.size()) {
            throw std::runtime_error("CSV row " + std::to_string(row) + " has too few cells");
        }
    }
    return t;
}

inline DiagnosticsRecord record_from_row(const CsvTable& t, std::size_t row)
{
    DiagnosticsRecord r;
    double* dst[] = {&r.t,  &r.l2_pert, &r.h1_pert, &r.h2_pert,  &r.wgt,     &r.grad_diss,
                     &r.d3, &r.pot,     &r.sup_fan, &r.sup_pert, &r.cum_wgt, &r.cum_grad};
    static const char* names[] = {"t",  "l2_pert", "h1_pert", "h2_pert",  "wgt",     "grad_diss",
                                  "d3", "pot",     "sup_fan", "sup_pert", "cum_wgt", "cum_grad"};
    for (std::size_t k = 0; k < std::size(names); ++k) *dst[k] = t.column(names[k]).at(row);
    return r;
}

} // namespace prw
