#pragma once

// The preset studies behind `prw run`: each measures a set of properties,
// judges them against fixed thresholds, and returns tables for the artifacts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "prw/checkpoint.hpp"
#include "prw/config.hpp"
#include "prw/diagnostics.hpp"
#include "prw/run.hpp"

namespace prw {

struct Check
{
    std::string name;
    /// the analytic property the measurement is compared with
    std::string claim;
    bool passed = false;
    std::string measured;
};

struct Table
{
    std::string file;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string csv() const
    {
        std::string out;
        for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
        out += '\n';
        for (const auto& r : rows) {
            for (std::size_t c = 0; c < r.size(); ++c) out += (c ? "," : "") + format_double(r[c]);
            out += '\n';
        }
        return out;
    }
};

struct StudyReport
{
    std::string preset;
    std::vector<Check> checks;
    std::vector<Table> tables;
    std::vector<std::string> notes;
    /// false when the study could not finish (e.g. a positivity failure)
    bool completed = true;
    std::string error;
    double seconds = 0.0;

    bool passed() const
    {
        return completed && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }

    void add(std::string name, std::string claim, bool ok, std::string measured)
    {
        checks.push_back({std::move(name), std::move(claim), ok, std::move(measured)});
    }
};

inline std::string render_report(const StudyReport& r)
{
    std::ostringstream os;
    os << "preset: " << r.preset << '\n';
    for (const auto& c : r.checks) {
        os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << "\n       claim: " << c.claim
           << "\n       measured: " << c.measured << '\n';
    }
    for (const auto& n : r.notes) os << "note: " << n << '\n';
    if (!r.completed) os << "error: " << r.error << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", r.seconds);
    os << "runtime_s: " << buf << '\n';
    os << "result: " << (r.passed() ? "PASS" : "FAIL") << '\n';
    return os.str();
}

namespace detail {

inline std::string fmt(double v, const char* spec = "%.6g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::vector<double> geometric_times(double lo, double hi, int n)
{
    std::vector<double> t(n);
    for (int k = 0; k < n; ++k) t[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
    return t;
}

inline std::vector<double> doubling_times(double hi)
{
    std::vector<double> t;
    for (double x = 1.0; x <= hi * (1 + 1e-12); x *= 2.0) t.push_back(x);
    return t;
}

/// Nonincreasing check for a sequence; returns the first violating index or -1.
inline int first_increase(const std::vector<double>& v)
{
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] > v[k - 1]) return static_cast<int>(k);
    }
    return -1;
}

class Stopwatch
{
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace detail

// ---------------------------------------------------------------------------

/// Derivative decay of the Burgers wave and its approach to the fan.
inline StudyReport lemma21_study(const ExperimentConfig& cfg)
{
    detail::Stopwatch clock;
    StudyReport rep;
    rep.preset = cfg.preset;
    const Json& s = cfg.study();
    const BurgersWave wave(s.at("w_minus").get<double>(), s.at("w_plus").get<double>());
    const auto times = detail::geometric_times(s.at("t_min").get<double>(), s.at("t_max").get<double>(),
                                               s.at("fit_points").get<int>());
    const double ps[3] = {2.0, 4.0, INFINITY};

    Table norms{"lemma21_norms.csv", {"t"}, {}};
    for (int order = 1; order <= 3; ++order)
        for (double p : ps)
            norms.columns.push_back("d" + std::to_string(order) + "_L" + (std::isinf(p) ? "inf" : detail::fmt(p)));
    for (double t : times) {
        std::vector<double> row{t};
        for (int order = 1; order <= 3; ++order)
            for (double p : ps) row.push_back(lp_norm_of_derivative(wave, t, order, p));
        norms.rows.push_back(row);
    }

    Table slopes{"lemma21_slopes.csv", {"order", "p", "slope", "r2", "expected"}, {}};
    for (int order = 1; order <= 3; ++order) {
        for (int q = 0; q < 3; ++q) {
            std::vector<double> col;
            for (const auto& row : norms.rows) col.push_back(row[1 + 3 * (order - 1) + q]);
            const auto fit = decay_rate_fit(times, col, times.front(), times.back());
            const double p = ps[q];
            const double expected = order == 1 ? -1.0 + (std::isinf(p) ? 0.0 : 1.0 / p) : -1.0;
            slopes.rows.push_back({double(order), p, fit.slope, fit.r2, expected});
            const std::string label = "|d^" + std::to_string(order) + " w/dx^" + std::to_string(order) + "|_L" +
                                      (std::isinf(p) ? "inf" : detail::fmt(p));
            if (order == 1) {
                rep.add("slope of " + label, "Burgers derivative decay: |w_x|_Lp ~ t^(-1+1/p)",
                        std::abs(fit.slope - expected) <= 0.10,
                        "slope " + detail::fmt(fit.slope, "%.4f") + " vs " + detail::fmt(expected, "%.4f") +
                            " +- 0.10 (r2 " + detail::fmt(fit.r2, "%.6f") + ")");
            } else if (std::isinf(p)) {
                rep.add("slope of " + label, "higher Burgers derivatives decay like t^(-1) in sup norm",
                        std::abs(fit.slope - expected) <= 0.15,
                        "slope " + detail::fmt(fit.slope, "%.4f") + " vs -1 +- 0.15 (r2 " +
                            detail::fmt(fit.r2, "%.6f") + ")");
            }
        }
    }

    Table sup{"lemma21_sup.csv", {"t", "sup_distance"}, {}};
    std::vector<double> dist;
    for (double t : detail::doubling_times(s.at("sup_t_max").get<double>())) {
        dist.push_back(sup_distance_to_fan(wave, t));
        sup.rows.push_back({t, dist.back()});
    }
    const int bad = detail::first_increase(dist);
    rep.add("Burgers sup distance to fan nonincreasing", "smooth Burgers wave converges to the fan in sup norm",
            bad < 0, bad < 0 ? "nonincreasing over " + std::to_string(dist.size()) + " doubling times"
                             : "increase at t = " + detail::fmt(sup.rows[bad][0]));
    rep.add("Burgers sup distance at final time", "sup distance <= 0.05 (w_+ - w_-)",
            dist.back() <= 0.05 * wave.gap(),
            detail::fmt(dist.back()) + " vs " + detail::fmt(0.05 * wave.gap()) + " at t = " +
                detail::fmt(sup.rows.back()[0]));

    rep.tables = {norms, slopes, sup};
    rep.seconds = clock.seconds();
    return rep;
}

/// Pointwise identities of the approximate wave and its approach to the fan.
inline StudyReport lemma22_study(const ExperimentConfig& cfg)
{
    detail::Stopwatch clock;
    StudyReport rep;
    rep.preset = cfg.preset;
    const Json& s = cfg.study();
    const GasModel gas = *cfg.gas;
    const RiemannData data = *cfg.wave;
    const auto& w = cfg.effective.at("wave");
    const double rho_minus = w.at("rho_minus").get<double>(), u_minus = w.at("u_minus").get<double>();
    const double rho_plus = w.at("rho_plus").get<double>();

    std::mt19937_64 rng(s.at("seed").get<std::uint64_t>());
    const long long samples = s.at("identity_samples").get<long long>();
    const double t_max = s.at("t_max").get<double>();

    Table ident{"lemma22_identities.csv", {"gamma", "samples", "max_rel_ux", "max_rel_rhox"}, {}};
    for (const auto& gj : s.at("identity_gammas")) {
        const double g = gj.get<double>();
        const GasModel gg(g);
        const auto d = make_rarefaction(gg, rho_minus, u_minus, rho_plus);
        if (!d.valid) {
            rep.add("identities at gamma = " + detail::fmt(g), "wave data valid", false,
                    "end states do not form a 2-rarefaction");
            continue;
        }
        const BurgersWave burgers = driving_burgers(d);
        std::uniform_real_distribution<double> T(0.0, t_max), S(-0.25, 1.25), X(-5.0, 5.0);
        double worst_u = 0.0, worst_r = 0.0;
        bool ok = true;
        for (long long k = 0; k < samples; ++k) {
            const double t = T(rng);
            const double x = (d.w_minus + (d.w_plus - d.w_minus) * S(rng)) * (1.0 + t) + X(rng);
            const auto a = evaluate_wave(gg, d, t, x);
            const auto b = evaluate(burgers, 1.0 + t, x);
            const double eu = std::abs(a.u_x - 2.0 / (g + 1.0) * b.w_x);
            const double er = std::abs(a.rho_x - std::pow(a.rho, 0.5 * (3.0 - g)) * a.u_x);
            ok = ok && eu <= 1e-10 * std::abs(b.w_x) && er <= 1e-10 * std::abs(a.u_x);
            if (b.w_x != 0.0) worst_u = std::max(worst_u, eu / std::abs(b.w_x));
            if (a.u_x != 0.0) worst_r = std::max(worst_r, er / std::abs(a.u_x));
        }
        ident.rows.push_back({g, double(samples), worst_u, worst_r});
        rep.add("wave identities at gamma = " + detail::fmt(g),
                "u_bar_x = 2/(gamma+1) w_x and rho_bar_x = rho_bar^((3-gamma)/2) u_bar_x", ok,
                std::to_string(samples) + " samples; max relative errors " + detail::fmt(worst_u, "%.3g") + ", " +
                    detail::fmt(worst_r, "%.3g") + " (bound 1e-10)");
    }

    Table sup{"lemma22_sup.csv", {"t", "sup_distance"}, {}};
    std::vector<double> dist;
    for (double t : detail::doubling_times(s.at("sup_t_max").get<double>())) {
        dist.push_back(wave_sup_distance_to_fan(gas, data, t));
        sup.rows.push_back({t, dist.back()});
    }
    const int bad = detail::first_increase(dist);
    rep.add("wave sup distance to fan nonincreasing", "approximate wave converges to the fan in sup norm", bad < 0,
            bad < 0 ? "nonincreasing over " + std::to_string(dist.size()) + " doubling times"
                    : "increase at t = " + detail::fmt(sup.rows[bad][0]));
    rep.add("wave sup distance at final time", "sup distance <= 0.05 alpha", dist.back() <= 0.05 * data.alpha,
            detail::fmt(dist.back()) + " vs " + detail::fmt(0.05 * data.alpha) + " at t = " +
                detail::fmt(sup.rows.back()[0]));

    // decay of the wave derivatives, reported without a threshold
    Table decay{"lemma22_decay.csv", {"order", "p", "slope", "r2"}, {}};
    if (data.valid) {
        const auto times = detail::geometric_times(100.0, 1e4, 9);
        for (int order = 1; order <= 3; ++order) {
            for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
                std::vector<double> v;
                for (double t : times) v.push_back(lemma22_norms(gas, data, t, order, p));
                const auto fit = decay_rate_fit(times, v, times.front(), times.back());
                decay.rows.push_back({double(order), p, fit.slope, fit.r2});
            }
        }
    }
    rep.tables = {ident, sup, decay};
    rep.seconds = clock.seconds();
    return rep;
}

/// Second-order convergence of the smooth-wave Euler residual under probe refinement.
inline StudyReport residual_study(const ExperimentConfig& cfg)
{
    detail::Stopwatch clock;
    StudyReport rep;
    rep.preset = cfg.preset;
    const Json& s = cfg.study();
    const GasModel gas = *cfg.gas;
    const RiemannData data = *cfg.wave;
    const int n = s.at("points").get<int>();
    const double a = s.at("x_min").get<double>(), b = s.at("x_max").get<double>();
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = a + (b - a) * i / (n - 1);
    const double t = s.at("t").get<double>();

    Table tab{"residual.csv", {"dt_probe", "mass", "momentum", "order_mass", "order_momentum"}, {}};
    double dt = s.at("dt_probe").get<double>();
    EulerResidual prev{};
    bool orders_ok = true;
    std::string orders;
    for (int level = 0; level < s.at("levels").get<int>(); ++level, dt *= 0.5) {
        const auto r = euler_residual(gas, data, t, grid, dt);
        double om = NAN, op = NAN;
        if (level > 0) {
            om = std::log2(prev.mass / r.mass);
            op = std::log2(prev.momentum / r.momentum);
            orders_ok = orders_ok && std::abs(om - 2.0) <= 0.2 && std::abs(op - 2.0) <= 0.2;
            orders += (orders.empty() ? "" : ", ") + detail::fmt(om, "%.3f") + "/" + detail::fmt(op, "%.3f");
        }
        tab.rows.push_back({dt, r.mass, r.momentum, om, op});
        prev = r;
    }
    rep.add("residual order under probe halving", "approximate wave solves the Euler system up to O(dt^2) probes",
            orders_ok, "mass/momentum orders " + orders + " (target 2.0 +- 0.2)");
    const double bound = 1e-6 * data.alpha;
    rep.add("final residual", "residual <= 1e-6 alpha", prev.mass <= bound && prev.momentum <= bound,
            "mass " + detail::fmt(prev.mass, "%.3e") + ", momentum " + detail::fmt(prev.momentum, "%.3e") +
                " vs " + detail::fmt(bound, "%.3e"));
    rep.tables = {tab};
    rep.seconds = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> restrict_by_two(const FlowState& f)
{
    const Grid c{f.grid.nx / 2, f.grid.ny / 2, f.grid.L_x};
    std::vector<double> out(c.size());
    for (int i = 0; i < c.nx; ++i) {
        for (int j = 0; j < c.ny; ++j) {
            out[c.index(i, j)] = 0.25 * (f.rho[f.grid.index(2 * i, 2 * j)] + f.rho[f.grid.index(2 * i + 1, 2 * j)] +
                                         f.rho[f.grid.index(2 * i, 2 * j + 1)] +
                                         f.rho[f.grid.index(2 * i + 1, 2 * j + 1)]);
        }
    }
    return out;
}

inline FlowState shift_y(const FlowState& in)
{
    FlowState out = in;
    const Grid& g = in.grid;
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const auto dst = g.index(i, (j + 1) % g.ny), src = g.index(i, j);
            out.rho[dst] = in.rho[src];
            out.mx[dst] = in.mx[src];
            out.my[dst] = in.my[src];
        }
    }
    return out;
}

} // namespace detail

/// Self-convergence of the solver on smooth perturbed data.
inline StudyReport convergence_study(const ExperimentConfig& cfg)
{
    detail::Stopwatch clock;
    StudyReport rep;
    rep.preset = cfg.preset;
    const int refinements = cfg.study().at("refinements").get<int>();

    std::vector<FlowState> sols;
    double audit = 0.0;
    for (int r = 0; r <= refinements; ++r) {
        SolverConfig c = *cfg.solver;
        c.Nx <<= r;
        c.Ny <<= r;
        NavierStokes2D solver(c);
        FlowState s = initialize(c);
        try {
            while (s.time < c.t_end) audit = std::max(audit, solver.step(s, c.t_end).mass_audit);
        } catch (const PositivityError& e) {
            rep.completed = false;
            rep.error = e.what();
            rep.seconds = clock.seconds();
            return rep;
        }
        sols.push_back(std::move(s));
    }

    Table tab{"convergence.csv", {"Nx", "Ny", "l1_diff_to_next", "order"}, {}};
    std::vector<double> errs;
    for (int r = 0; r < refinements; ++r) {
        const auto fine = detail::restrict_by_two(sols[r + 1]);
        double e = 0.0;
        for (std::size_t k = 0; k < fine.size(); ++k) e += std::abs(sols[r].rho[k] - fine[k]);
        errs.push_back(e * sols[r].grid.cell_area());
    }
    bool ok = true;
    std::string orders;
    for (int r = 0; r <= refinements; ++r) {
        double order = NAN;
        if (r + 1 < refinements) {
            order = std::log2(errs[r] / errs[r + 1]);
            ok = ok && order >= 1.5;
            orders += (orders.empty() ? "" : ", ") + detail::fmt(order, "%.3f");
        }
        tab.rows.push_back({double(sols[r].grid.nx), double(sols[r].grid.ny), r < refinements ? errs[r] : NAN, order});
    }
    rep.add("self-convergence order in L1(rho)", "second-order scheme on smooth data: observed order >= 1.5", ok,
            "orders " + orders + " for Nx = " + std::to_string(sols.front().grid.nx) + " .. " +
                std::to_string(sols.back().grid.nx));
    rep.add("mass audit during convergence runs", "mass changes only through x-boundary fluxes (<= 1e-12 rel)",
            audit <= 1e-12, "max per-step residual " + detail::fmt(audit, "%.3e"));
    rep.tables = {tab};
    rep.seconds = clock.seconds();
    return rep;
}

/// Planarity, equilibrium, conservation and y-shift equivariance of the solver.
inline StudyReport planarity_study(const ExperimentConfig& cfg)
{
    detail::Stopwatch clock;
    StudyReport rep;
    rep.preset = cfg.preset;
    const int steps = cfg.study().at("steps").get<int>();
    const int constant_steps = cfg.study().at("constant_steps").get<int>();
    const SolverConfig base = *cfg.solver;

    Table tab{"planarity.csv", {"step", "t", "max_abs_v", "max_y_variation", "mass_audit"}, {}};
    try {
        NavierStokes2D solver(base);
        FlowState s = initialize(base);
        const Grid& g = s.grid;
        auto y_variation = [&](const FlowState& st) {
            double m = 0.0;
            for (int i = 0; i < g.nx; ++i) {
                for (int j = 1; j < g.ny; ++j) {
                    m = std::max({m, std::abs(st.rho[g.index(i, j)] - st.rho[g.index(i, 0)]),
                                  std::abs(st.mx[g.index(i, j)] - st.mx[g.index(i, 0)])});
                }
            }
            return m;
        };
        auto max_v = [&](const FlowState& st) {
            double m = 0.0;
            for (std::size_t k = 0; k < st.rho.size(); ++k) m = std::max(m, std::abs(st.v(k)));
            return m;
        };
        const bool planar_start = y_variation(s) == 0.0 && max_v(s) == 0.0;
        double vmax = 0.0, var = 0.0, audit = 0.0;
        for (int n = 1; n <= steps; ++n) {
            const auto r = solver.step(s);
            audit = std::max(audit, r.mass_audit);
            vmax = std::max(vmax, max_v(s));
            var = std::max(var, y_variation(s));
            if (n % 50 == 0 || n == steps) tab.rows.push_back({double(n), s.time, vmax, var, r.mass_audit});
        }
        rep.add("planarity preserved", "y-independent data with v = 0 stays planar: max|v| <= 1e-10",
                planar_start && vmax <= 1e-10 && var <= 1e-10,
                planar_start ? "max|v| " + detail::fmt(vmax, "%.3e") + ", max y-variation " +
                                   detail::fmt(var, "%.3e") + " over " + std::to_string(steps) + " steps (t = " +
                                   detail::fmt(s.time) + ")"
                             : "initial data is not planar (use perturbation.shape = zero)");
        rep.add("mass audit", "mass changes only through x-boundary fluxes (<= 1e-12 rel per step)",
                audit <= 1e-12, "max per-step residual " + detail::fmt(audit, "%.3e"));

        SolverConfig flat = base;
        flat.wave = make_riemann_data(base.gas, base.wave.rho_minus, base.wave.u_minus, base.wave.rho_minus,
                                      base.wave.u_minus);
        flat.perturbation.shape = PerturbationSpec::Shape::zero;
        NavierStokes2D flat_solver(flat);
        FlowState c = initialize(flat);
        double drift = 0.0;
        for (int n = 0; n < constant_steps; ++n) {
            const FlowState before = c;
            flat_solver.step(c);
            for (std::size_t k = 0; k < c.rho.size(); ++k) {
                drift = std::max({drift, std::abs(c.rho[k] - before.rho[k]), std::abs(c.mx[k] - before.mx[k]),
                                  std::abs(c.my[k] - before.my[k])});
            }
        }
        rep.add("constant state is a fixed point", "constant states are exact equilibria (<= 1e-14 per step)",
                drift <= 1e-14,
                "max per-step change " + detail::fmt(drift, "%.3e") + " over " + std::to_string(constant_steps) +
                    " steps");

        SolverConfig wavy = base;
        wavy.perturbation = {PerturbationSpec::Shape::gaussian_sine, 0.02, 1.0, 1, ""};
        NavierStokes2D wavy_solver(wavy);
        FlowState a = initialize(wavy);
        FlowState b = detail::shift_y(a);
        for (int n = 0; n < 20; ++n) {
            wavy_solver.step(a);
            wavy_solver.step(b);
        }
        const FlowState sa = detail::shift_y(a);
        const bool same = sa.rho == b.rho && sa.mx == b.mx && sa.my == b.my;
        rep.add("y-shift equivariance", "periodic y-shift commutes with time stepping", same,
                same ? "bit-identical after 20 steps" : "shifted runs differ");
    } catch (const PositivityError& e) {
        rep.completed = false;
        rep.error = e.what();
    }
    rep.tables = {tab};
    rep.seconds = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------

struct StabilityOptions
{
    /// artifacts go here when set: diagnostics.csv and checkpoints/
    std::optional<std::filesystem::path> out_dir;
    /// resume from this state; `prior` holds the records before its time
    std::optional<FlowState> start;
    std::vector<DiagnosticsRecord> prior;
    std::optional<DiagnosticsRecord> seed;
};

inline std::string checkpoint_name(double t)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "checkpoint_t%013.6f.bin", t);
    return buf;
}

namespace detail {

inline const DiagnosticsRecord* record_at(const std::vector<DiagnosticsRecord>& rs, double t)
{
    for (const auto& r : rs) {
        if (std::abs(r.t - t) <= 1e-9 * std::max(1.0, t)) return &r;
    }
    return nullptr;
}

} // namespace detail

/// Long-time run from a perturbed wave with the monitored functionals.
inline StudyReport stability_study(const ExperimentConfig& cfg, StabilityOptions opts = {})
{
    detail::Stopwatch clock;
    StudyReport rep;
    rep.preset = cfg.preset;
    const SolverConfig sc = *cfg.solver;

    std::ofstream csv;
    std::filesystem::path ckpt_dir;
    if (opts.out_dir) {
        ckpt_dir = *opts.out_dir / "checkpoints";
        std::filesystem::create_directories(ckpt_dir);
        csv.open(*opts.out_dir / "diagnostics.csv", std::ios::trunc);
        if (!csv) throw std::runtime_error("cannot write diagnostics.csv");
        write_csv_header(csv);
        for (const auto& r : opts.prior) write_csv_row(csv, r);
        csv.flush();
    }
    RunObserver obs;
    if (opts.out_dir) {
        obs.on_record = [&](const DiagnosticsRecord& r) {
            write_csv_row(csv, r);
            csv.flush();
        };
        obs.on_checkpoint = [&](const FlowState& s) { write_checkpoint(ckpt_dir / checkpoint_name(s.time), s); };
    }

    auto result = run(sc, cfg.schedule, obs, std::move(opts.start), opts.seed);
    std::vector<DiagnosticsRecord> records = opts.prior;
    records.insert(records.end(), result.records.begin(), result.records.end());

    rep.completed = result.ok;
    rep.error = result.error;
    rep.add("run reaches t_end without positivity failure", "density stays positive along the run",
            result.ok && result.final_state.time >= sc.t_end,
            result.ok ? std::to_string(result.steps) + " steps to t = " + detail::fmt(result.final_state.time)
                      : result.error);
    rep.add("mass audit", "mass changes only through x-boundary fluxes (<= 1e-12 rel per step)",
            result.max_mass_audit <= 1e-12, "max per-step residual " + detail::fmt(result.max_mass_audit, "%.3e"));

    const double T = sc.t_end;
    const bool trivial = sc.wave.degenerate() &&
                         (sc.perturbation.shape == PerturbationSpec::Shape::zero || sc.perturbation.amplitude == 0.0);

    // sup distance to the fan at T/8, T/4, T/2, T
    {
        std::vector<double> ts{T / 8, T / 4, T / 2, T}, vals;
        std::string m;
        bool found = T > 0.0;
        for (double t : ts) {
            const auto* r = detail::record_at(records, t);
            if (!r) {
                found = false;
                break;
            }
            vals.push_back(r->sup_fan);
            m += (m.empty() ? "" : ", ") + ("t=" + detail::fmt(t) + ": " + detail::fmt(r->sup_fan, "%.6e"));
        }
        bool ok = found;
        if (found) {
            bool decreasing = true;
            for (std::size_t k = 1; k < vals.size(); ++k) decreasing = decreasing && vals[k] < vals[k - 1];
            const bool all_zero = std::all_of(vals.begin(), vals.end(), [](double v) { return v == 0.0; });
            ok = decreasing || (trivial && all_zero);
        }
        rep.add("sup distance to fan strictly decreasing", "solution approaches the planar rarefaction fan", ok,
                found ? m : "diagnostics missing at T/8, T/4, T/2, T (need diag_interval dividing them)");
    }

    // H2 norm of the perturbation stays within twice its initial value
    if (!records.empty()) {
        const double h0 = records.front().h2_pert;
        double worst = 0.0, at = 0.0;
        for (const auto& r : records) {
            if (r.h2_pert > worst) {
                worst = r.h2_pert;
                at = r.t;
            }
        }
        rep.add("perturbation H2 norm bounded", "|(phi, Psi)|_2 <= 2 |(phi0, Psi0)|_2 for all t", worst <= 2.0 * h0,
                "max " + detail::fmt(worst, "%.6e") + " at t = " + detail::fmt(at) + " vs initial " +
                    detail::fmt(h0, "%.6e"));
    }

    // dissipation integrals: increments over [3T/4, T] are a small part of the total
    {
        const auto* r_end = detail::record_at(records, T);
        const auto* r_tail = detail::record_at(records, 0.75 * T);
        if (r_end && r_tail) {
            auto tail = [](double total, double at_tail) { return total - at_tail; };
            const double tw = tail(r_end->cum_wgt, r_tail->cum_wgt), tg = tail(r_end->cum_grad, r_tail->cum_grad);
            rep.add("weighted dissipation integral converges", "time integral of |u_bar_x^(1/2)(phi, varphi)|^2 is finite",
                    tw <= 0.1 * r_end->cum_wgt,
                    "increment over [" + detail::fmt(0.75 * T) + ", " + detail::fmt(T) + "] = " +
                        detail::fmt(tw, "%.6e") + " vs 10% of total " + detail::fmt(0.1 * r_end->cum_wgt, "%.6e"));
            rep.add("gradient dissipation integral converges", "time integral of |(grad phi, grad Psi)|_1^2 is finite",
                    tg <= 0.1 * r_end->cum_grad,
                    "increment over [" + detail::fmt(0.75 * T) + ", " + detail::fmt(T) + "] = " +
                        detail::fmt(tg, "%.6e") + " vs 10% of total " + detail::fmt(0.1 * r_end->cum_grad, "%.6e"));
        } else {
            rep.add("dissipation integrals converge", "time integrals of the dissipation terms are finite", false,
                    "diagnostics missing at 3T/4 or T");
        }
    }

    // decay rate of the sup distance, reported without a threshold
    {
        std::vector<double> t, v;
        for (const auto& r : records) {
            if (r.t >= T / 8 && r.sup_fan > 0.0) {
                t.push_back(r.t);
                v.push_back(r.sup_fan);
            }
        }
        if (t.size() >= 5 && t.back() > t.front()) {
            const auto fit = decay_rate_fit(t, v, t.front(), t.back());
            rep.notes.push_back("sup_fan log-log slope over [" + detail::fmt(t.front()) + ", " +
                                detail::fmt(t.back()) + "] = " + detail::fmt(fit.slope, "%.4f") + " (r2 " +
                                detail::fmt(fit.r2, "%.4f") + ")");
        }
    }
    if (opts.start || !opts.prior.empty()) {
        rep.notes.push_back("resumed run: " + std::to_string(opts.prior.size()) + " earlier records reused");
    }
    rep.seconds = clock.seconds();
    return rep;
}

/// Dispatches to the study of the configured preset (stability without artifacts).
inline StudyReport run_study(const ExperimentConfig& cfg)
{
    if (cfg.preset == "lemma21") return lemma21_study(cfg);
    if (cfg.preset == "lemma22") return lemma22_study(cfg);
    if (cfg.preset == "residual") return residual_study(cfg);
    if (cfg.preset == "convergence") return convergence_study(cfg);
    if (cfg.preset == "planarity") return planarity_study(cfg);
    return stability_study(cfg);
}

} // namespace prw
