#pragma once

// Method-of-lines finite-volume integrator for the 2D isentropic compressible
// Navier-Stokes system on [-L_x, L_x] x T:
//
//   rho_t + div(rho u) = 0
//   (rho u)_t + div(rho u (x) u) + grad p = mu Lap u + (mu + lambda) grad div u
//
// Convective fluxes: second-order central-upwind (Kurganov-Noelle-Petrova) with
// limited linear reconstruction of (rho, u, v). Viscous terms: centered second
// differences of the primitive velocities. Time stepping: SSP-RK2 (Heun).
// y wraps periodically; x uses two ghost layers.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "prw/approx_wave.hpp"
#include "prw/grid.hpp"

namespace prw {

struct ConfigError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

/// Density lost positivity (or a field became non-finite) during a solve.
struct PositivityError : std::runtime_error
{
    PositivityError(int i_, int j_, double t_, double value_)
        : std::runtime_error(describe(i_, j_, t_, value_)), i(i_), j(j_), time(t_), value(value_)
    {
    }

    int i;
    int j;
    double time;
    double value;

private:
    static std::string describe(int i, int j, double t, double v)
    {
        std::ostringstream os;
        os.precision(17);
        os << "non-positive or non-finite density " << v << " at cell (" << i << ", " << j << "), t = " << t;
        return os.str();
    }
};

enum class BoundaryMode { wave_dirichlet, extrapolation };
enum class Limiter { minmod, none };

struct PerturbationSpec
{
    enum class Shape { gaussian_sine, zero, custom_file };

    Shape shape = Shape::gaussian_sine;
    double amplitude = 0.0;
    double sigma = 1.0;
    int k = 1;
    /// custom-file: whitespace-separated triples (phi, varphi, psi), one per
    /// cell in storage order (i major, j minor); scaled by amplitude.
    std::string file;
};

struct SolverConfig
{
    GasModel gas{1.4};
    double mu = 0.1;
    double lam = 0.0;
    RiemannData wave = make_rarefaction(GasModel(1.4), 1.0, 0.0, 1.2);
    double L_x = 10.0;
    int Nx = 64;
    int Ny = 8;
    double cfl = 0.5;
    double t_end = 1.0;
    BoundaryMode bc = BoundaryMode::wave_dirichlet;
    Limiter limiter = Limiter::minmod;
    PerturbationSpec perturbation;

    Grid grid() const { return Grid{Nx, Ny, L_x}; }

    void validate() const
    {
        if (!(mu > 0.0) || !(mu + lam >= 0.0)) {
            throw ConfigError("viscosity constraint violated: requires mu > 0 and mu + lambda >= 0 (got mu = " +
                              std::to_string(mu) + ", lambda = " + std::to_string(lam) + ")");
        }
        if (Nx < 4 || Ny < 4) {
            throw ConfigError("grid: Nx and Ny must be at least 4");
        }
        if (!(L_x > 0.0)) {
            throw ConfigError("grid: L_x must be positive");
        }
        if (!(cfl > 0.0 && cfl < 1.0)) {
            throw ConfigError("run: cfl must lie in (0, 1)");
        }
        if (!(t_end >= 0.0)) {
            throw ConfigError("run: t_end must be non-negative");
        }
        if (!(wave.valid || wave.degenerate())) {
            throw ConfigError("wave: end states are not connected by a 2-rarefaction");
        }
        if (wave.gamma != gas.gamma()) {
            throw ConfigError("wave: end states were built for a different gamma");
        }
        if (perturbation.shape == PerturbationSpec::Shape::gaussian_sine) {
            if (!(perturbation.sigma > 0.0)) {
                throw ConfigError("perturbation: sigma must be positive");
            }
            if (perturbation.k < 0) {
                throw ConfigError("perturbation: k must be non-negative");
            }
        }
    }
};

namespace detail {

inline std::vector<double> read_custom_perturbation(const std::string& path, std::size_t cells)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("perturbation: cannot open custom file '" + path + "'");
    }
    std::vector<double> values;
    values.reserve(3 * cells);
    double v;
    while (in >> v) values.push_back(v);
    if (values.size() != 3 * cells) {
        throw ConfigError("perturbation: custom file '" + path + "' must hold " + std::to_string(3 * cells) +
                          " values, found " + std::to_string(values.size()));
    }
    return values;
}

} // namespace detail

/// Initial state: approximate wave at t = 0 plus the configured perturbation.
inline FlowState initialize(const SolverConfig& cfg)
{
    cfg.validate();
    const Grid g = cfg.grid();
    FlowState s(g, 0.0);

    std::vector<double> custom;
    if (cfg.perturbation.shape == PerturbationSpec::Shape::custom_file) {
        custom = detail::read_custom_perturbation(cfg.perturbation.file, g.size());
    }

    const double a = cfg.perturbation.amplitude;
    const double two_pi_k = 2.0 * std::numbers::pi * cfg.perturbation.k;
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        const auto bar = evaluate_wave(cfg.gas, cfg.wave, 0.0, x);
        const double envelope =
            cfg.perturbation.shape == PerturbationSpec::Shape::gaussian_sine
                ? a * std::exp(-(x * x) / (cfg.perturbation.sigma * cfg.perturbation.sigma))
                : 0.0;
        for (int j = 0; j < g.ny; ++j) {
            const std::size_t k = g.index(i, j);
            double phi = 0.0, dphi_u = 0.0, psi = 0.0;
            switch (cfg.perturbation.shape) {
            case PerturbationSpec::Shape::gaussian_sine: {
                const double y = g.y(j);
                phi = envelope * std::cos(two_pi_k * y);
                dphi_u = phi;
                psi = envelope * std::sin(two_pi_k * y);
                break;
            }
            case PerturbationSpec::Shape::zero:
                break;
            case PerturbationSpec::Shape::custom_file:
                phi = a * custom[3 * k];
                dphi_u = a * custom[3 * k + 1];
                psi = a * custom[3 * k + 2];
                break;
            }
            const double rho = bar.rho + phi;
            if (!(rho > 0.0)) {
                throw ConfigError("perturbation: initial density not positive at cell (" + std::to_string(i) + ", " +
                                  std::to_string(j) + "); reduce the amplitude");
            }
            s.rho[k] = rho;
            s.mx[k] = rho * (bar.u + dphi_u);
            s.my[k] = rho * psi;
        }
    }
    return s;
}

/// Time derivative of the conserved fields plus the net convective inflow
/// through the two x-boundaries (rates, already multiplied by dy).
struct Tendency
{
    std::vector<double> drho, dmx, dmy;
    double mass_inflow = 0.0;
    double xmom_inflow = 0.0;
    double ymom_inflow = 0.0;
};

struct StepReport
{
    double dt = 0.0;
    double time = 0.0;
    double mass_before = 0.0;
    double mass_after = 0.0;
    double expected_mass_change = 0.0;
    /// |mass change - time-integrated boundary inflow| / mass_before
    double mass_audit = 0.0;
    /// y-momentum change over the step; only boundary terms should move it
    double ymom_change = 0.0;
    double ymom_convective_inflow = 0.0;
};

class NavierStokes2D
{
public:
    explicit NavierStokes2D(SolverConfig cfg) : cfg_(std::move(cfg)), grid_(cfg_.grid())
    {
        cfg_.validate();
        const std::size_t padded = static_cast<std::size_t>(grid_.nx + 2 * kGhost) * (grid_.ny + 2 * kGhost);
        r_.resize(padded);
        u_.resize(padded);
        v_.resize(padded);
        const std::size_t xf = static_cast<std::size_t>(grid_.nx + 1) * grid_.ny;
        const std::size_t yf = static_cast<std::size_t>(grid_.nx) * (grid_.ny + 1);
        for (auto* f : {&fx_[0], &fx_[1], &fx_[2]}) f->resize(xf);
        for (auto* f : {&fy_[0], &fy_[1], &fy_[2]}) f->resize(yf);
        k1_ = make_tendency();
        k2_ = make_tendency();
    }

    const SolverConfig& config() const { return cfg_; }
    const Grid& grid() const { return grid_; }

    Tendency make_tendency() const
    {
        Tendency t;
        t.drho.assign(grid_.size(), 0.0);
        t.dmx.assign(grid_.size(), 0.0);
        t.dmy.assign(grid_.size(), 0.0);
        return t;
    }

    /// Semi-discrete right-hand side at boundary time t.
    void rhs(const FlowState& s, double t, Tendency& out)
    {
        check_state(s, t);
        fill_primitives(s, t);
        x_fluxes();
        y_fluxes();
        assemble(out);
    }

    Tendency rhs(const FlowState& s, double t)
    {
        Tendency out = make_tendency();
        rhs(s, t, out);
        return out;
    }

    double stable_dt(const FlowState& s) const
    {
        double ax = 0.0, ay = 0.0, rho_min = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < s.rho.size(); ++k) {
            const double r = s.rho[k];
            const double c = sound(r);
            ax = std::max(ax, std::abs(s.mx[k] / r) + c);
            ay = std::max(ay, std::abs(s.my[k] / r) + c);
            rho_min = std::min(rho_min, r);
        }
        const double dx = grid_.dx(), dy = grid_.dy();
        const double h = std::min(dx, dy);
        const double visc = 0.25 * rho_min * h * h / (2.0 * cfg_.mu + cfg_.lam);
        return cfg_.cfl * std::min({dx / ax, dy / ay, visc});
    }

    /// One SSP-RK2 step of size min(stable_dt, t_target - t). When the step
    /// reaches t_target the new time is set to t_target exactly.
    StepReport step(FlowState& s, double t_target = std::numeric_limits<double>::infinity())
    {
        const double t0 = s.time;
        const double dt_stable = stable_dt(s);
        const bool lands = t_target - t0 <= dt_stable;
        const double dt = lands ? t_target - t0 : dt_stable;

        StepReport rep;
        rep.dt = dt;
        rep.mass_before = s.total_mass();
        const double ymom_before = sum(s.my) * grid_.cell_area();

        rhs(s, t0, k1_);
        stage_ = s;
        axpy(stage_, dt, k1_);
        stage_.time = t0 + dt;
        check_state(stage_, stage_.time);

        rhs(stage_, t0 + dt, k2_);
        const std::size_t n = s.rho.size();
        for (std::size_t k = 0; k < n; ++k) {
            s.rho[k] = 0.5 * s.rho[k] + 0.5 * (stage_.rho[k] + dt * k2_.drho[k]);
            s.mx[k] = 0.5 * s.mx[k] + 0.5 * (stage_.mx[k] + dt * k2_.dmx[k]);
            s.my[k] = 0.5 * s.my[k] + 0.5 * (stage_.my[k] + dt * k2_.dmy[k]);
        }
        s.time = lands ? t_target : t0 + dt;
        check_state(s, s.time);

        rep.time = s.time;
        rep.mass_after = s.total_mass();
        rep.expected_mass_change = 0.5 * dt * (k1_.mass_inflow + k2_.mass_inflow);
        rep.mass_audit =
            std::abs(rep.mass_after - rep.mass_before - rep.expected_mass_change) / std::abs(rep.mass_before);
        rep.ymom_change = sum(s.my) * grid_.cell_area() - ymom_before;
        rep.ymom_convective_inflow = 0.5 * dt * (k1_.ymom_inflow + k2_.ymom_inflow);
        return rep;
    }

    /// Sound speed sqrt(p'(rho)) without the domain check (callers guarantee rho > 0).
    double sound(double r) const { return isothermal_ ? 1.0 : std::pow(r, half_gm1_); }

private:
    static constexpr int kGhost = 2;

    std::size_t pidx(int ip, int jp) const { return static_cast<std::size_t>(ip) * (grid_.ny + 2 * kGhost) + jp; }

    static double sum(const std::vector<double>& v)
    {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }

    static void axpy(FlowState& s, double dt, const Tendency& k)
    {
        for (std::size_t q = 0; q < s.rho.size(); ++q) {
            s.rho[q] += dt * k.drho[q];
            s.mx[q] += dt * k.dmx[q];
            s.my[q] += dt * k.dmy[q];
        }
    }

    void check_state(const FlowState& s, double t) const
    {
        for (int i = 0; i < grid_.nx; ++i) {
            for (int j = 0; j < grid_.ny; ++j) {
                const std::size_t k = grid_.index(i, j);
                const double r = s.rho[k];
                if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(s.mx[k]) || !std::isfinite(s.my[k])) {
                    throw PositivityError(i, j, t, r);
                }
            }
        }
    }

    double limited_slope(double qm, double q0, double qp) const
    {
        const double a = q0 - qm, b = qp - q0;
        if (cfg_.limiter == Limiter::none) {
            return 0.5 * (a + b);
        }
        if (a * b <= 0.0) {
            return 0.0;
        }
        return std::abs(a) < std::abs(b) ? a : b;
    }

    double pressure_from(double r, double c) const { return isothermal_ ? r : r * c * c / gamma_; }

    void fill_primitives(const FlowState& s, double t)
    {
        const int nx = grid_.nx, ny = grid_.ny;
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const std::size_t k = grid_.index(i, j);
                const std::size_t p = pidx(i + kGhost, j + kGhost);
                r_[p] = s.rho[k];
                u_[p] = s.mx[k] / s.rho[k];
                v_[p] = s.my[k] / s.rho[k];
            }
        }
        for (int g : {-2, -1, nx, nx + 1}) {
            const int ip = g + kGhost;
            if (cfg_.bc == BoundaryMode::wave_dirichlet) {
                const auto bar = evaluate_wave(cfg_.gas, cfg_.wave, t, grid_.x(g));
                for (int jp = kGhost; jp < ny + kGhost; ++jp) {
                    r_[pidx(ip, jp)] = bar.rho;
                    u_[pidx(ip, jp)] = bar.u;
                    v_[pidx(ip, jp)] = 0.0;
                }
            } else {
                const int src = (g < 0 ? 0 : nx - 1) + kGhost;
                for (int jp = kGhost; jp < ny + kGhost; ++jp) {
                    r_[pidx(ip, jp)] = r_[pidx(src, jp)];
                    u_[pidx(ip, jp)] = u_[pidx(src, jp)];
                    v_[pidx(ip, jp)] = v_[pidx(src, jp)];
                }
            }
        }
        for (int ip = 0; ip < nx + 2 * kGhost; ++ip) {
            for (auto* q : {&r_, &u_, &v_}) {
                auto& f = *q;
                f[pidx(ip, 0)] = f[pidx(ip, ny)];
                f[pidx(ip, 1)] = f[pidx(ip, ny + 1)];
                f[pidx(ip, ny + 2)] = f[pidx(ip, 2)];
                f[pidx(ip, ny + 3)] = f[pidx(ip, 3)];
            }
        }
    }

    struct FaceFlux
    {
        double mass, mom_n, mom_t;
    };

    /// Central-upwind flux across a face with normal velocity un and tangential ut.
    FaceFlux central_upwind(double rl, double unl, double utl, double rr, double unr, double utr) const
    {
        const double cl = sound(rl), cr = sound(rr);
        const double pl = pressure_from(rl, cl), pr = pressure_from(rr, cr);
        const double ap = std::max({unl + cl, unr + cr, 0.0});
        const double am = std::min({unl - cl, unr - cr, 0.0});
        const double inv = 1.0 / (ap - am);
        const double apam = ap * am;

        const double ml = rl * unl, mr = rr * unr;
        const double tl = rl * utl, tr = rr * utr;
        FaceFlux f;
        f.mass = (ap * ml - am * mr + apam * (rr - rl)) * inv;
        f.mom_n = (ap * (ml * unl + pl) - am * (mr * unr + pr) + apam * (mr - ml)) * inv;
        f.mom_t = (ap * (ml * utl) - am * (mr * utr) + apam * (tr - tl)) * inv;
        return f;
    }

    void x_fluxes()
    {
        const int nx = grid_.nx, ny = grid_.ny;
        const std::size_t stride = ny + 2 * kGhost;
#pragma omp parallel for schedule(static)
        for (int f = 0; f <= nx; ++f) {
            const int L = f + kGhost - 1, R = f + kGhost;
            for (int j = 0; j < ny; ++j) {
                const int jp = j + kGhost;
                const std::size_t pl = pidx(L, jp), pr = pidx(R, jp);
                const double rl = r_[pl] + 0.5 * limited_slope(r_[pl - stride], r_[pl], r_[pl + stride]);
                const double ul = u_[pl] + 0.5 * limited_slope(u_[pl - stride], u_[pl], u_[pl + stride]);
                const double vl = v_[pl] + 0.5 * limited_slope(v_[pl - stride], v_[pl], v_[pl + stride]);
                const double rr = r_[pr] - 0.5 * limited_slope(r_[pr - stride], r_[pr], r_[pr + stride]);
                const double ur = u_[pr] - 0.5 * limited_slope(u_[pr - stride], u_[pr], u_[pr + stride]);
                const double vr = v_[pr] - 0.5 * limited_slope(v_[pr - stride], v_[pr], v_[pr + stride]);
                const auto F = central_upwind(rl, ul, vl, rr, ur, vr);
                const std::size_t q = static_cast<std::size_t>(f) * ny + j;
                fx_[0][q] = F.mass;
                fx_[1][q] = F.mom_n;
                fx_[2][q] = F.mom_t;
            }
        }
    }

    void y_fluxes()
    {
        const int nx = grid_.nx, ny = grid_.ny;
#pragma omp parallel for schedule(static)
        for (int i = 0; i < nx; ++i) {
            const int ip = i + kGhost;
            for (int g = 0; g <= ny; ++g) {
                const std::size_t pb = pidx(ip, g + kGhost - 1), pt = pidx(ip, g + kGhost);
                const double rb = r_[pb] + 0.5 * limited_slope(r_[pb - 1], r_[pb], r_[pb + 1]);
                const double ub = u_[pb] + 0.5 * limited_slope(u_[pb - 1], u_[pb], u_[pb + 1]);
                const double vb = v_[pb] + 0.5 * limited_slope(v_[pb - 1], v_[pb], v_[pb + 1]);
                const double rt = r_[pt] - 0.5 * limited_slope(r_[pt - 1], r_[pt], r_[pt + 1]);
                const double ut = u_[pt] - 0.5 * limited_slope(u_[pt - 1], u_[pt], u_[pt + 1]);
                const double vt = v_[pt] - 0.5 * limited_slope(v_[pt - 1], v_[pt], v_[pt + 1]);
                const auto G = central_upwind(rb, vb, ub, rt, vt, ut);
                const std::size_t q = static_cast<std::size_t>(i) * (ny + 1) + g;
                fy_[0][q] = G.mass;
                fy_[1][q] = G.mom_t; // x-momentum carried in y
                fy_[2][q] = G.mom_n;
            }
        }
    }

    void assemble(Tendency& out) const
    {
        const int nx = grid_.nx, ny = grid_.ny;
        const double dx = grid_.dx(), dy = grid_.dy();
        const double idx = 1.0 / dx, idy = 1.0 / dy;
        const double idx2 = idx * idx, idy2 = idy * idy, idxy = 0.25 * idx * idy;
        const double mu = cfg_.mu, mu_lam = cfg_.mu + cfg_.lam;
        const std::size_t stride = ny + 2 * kGhost;

#pragma omp parallel for schedule(static)
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const std::size_t k = grid_.index(i, j);
                const std::size_t xl = static_cast<std::size_t>(i) * ny + j, xr = xl + ny;
                const std::size_t yb = static_cast<std::size_t>(i) * (ny + 1) + j, yt = yb + 1;

                const std::size_t p = pidx(i + kGhost, j + kGhost);
                const std::size_t pe = p + stride, pw = p - stride, pn = p + 1, ps = p - 1;
                const double uxx = (u_[pe] - 2.0 * u_[p] + u_[pw]) * idx2;
                const double uyy = (u_[pn] - 2.0 * u_[p] + u_[ps]) * idy2;
                const double vxx = (v_[pe] - 2.0 * v_[p] + v_[pw]) * idx2;
                const double vyy = (v_[pn] - 2.0 * v_[p] + v_[ps]) * idy2;
                const double uxy = (u_[pe + 1] - u_[pe - 1] - u_[pw + 1] + u_[pw - 1]) * idxy;
                const double vxy = (v_[pe + 1] - v_[pe - 1] - v_[pw + 1] + v_[pw - 1]) * idxy;

                out.drho[k] = -(fx_[0][xr] - fx_[0][xl]) * idx - (fy_[0][yt] - fy_[0][yb]) * idy;
                out.dmx[k] = -(fx_[1][xr] - fx_[1][xl]) * idx - (fy_[1][yt] - fy_[1][yb]) * idy +
                             mu * (uxx + uyy) + mu_lam * (uxx + vxy);
                out.dmy[k] = -(fx_[2][xr] - fx_[2][xl]) * idx - (fy_[2][yt] - fy_[2][yb]) * idy +
                             mu * (vxx + vyy) + mu_lam * (uxy + vyy);
            }
        }

        double mass = 0.0, xm = 0.0, ym = 0.0;
        const std::size_t right = static_cast<std::size_t>(nx) * ny;
        for (int j = 0; j < ny; ++j) {
            mass += fx_[0][j] - fx_[0][right + j];
            xm += fx_[1][j] - fx_[1][right + j];
            ym += fx_[2][j] - fx_[2][right + j];
        }
        out.mass_inflow = mass * dy;
        out.xmom_inflow = xm * dy;
        out.ymom_inflow = ym * dy;
    }

    SolverConfig cfg_;
    Grid grid_;
    double gamma_ = cfg_.gas.gamma();
    bool isothermal_ = cfg_.gas.isothermal();
    double half_gm1_ = 0.5 * (cfg_.gas.gamma() - 1.0);

    std::vector<double> r_, u_, v_;
    std::vector<double> fx_[3], fy_[3];
    Tendency k1_, k2_;
    FlowState stage_;
};

} // namespace prw
