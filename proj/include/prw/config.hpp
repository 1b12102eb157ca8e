#pragma once

// JSON experiment configuration. Each preset owns a schema given by its
// default document; user files may override any default but may not add keys.
// The effective document (defaults merged, "auto" values resolved) is what
// manifests record, and parsing it again yields the same configuration.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prw/run.hpp"
#include "prw/solver.hpp"

namespace prw {

using Json = nlohmann::ordered_json;

inline const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"lemma21", "lemma22", "residual", "convergence", "planarity",
                                                "stability"};
    return names;
}

namespace detail {

inline Json solver_sections(double t_end, double cfl)
{
    Json j;
    j["gas"] = {{"gamma", 1.4}};
    j["viscosity"] = {{"mu", 0.1}, {"lambda", 0.0}};
    j["wave"] = {{"rho_minus", 1.0}, {"u_minus", 0.0}, {"rho_plus", 1.2}, {"u_plus", "auto"}};
    j["grid"] = {{"Nx", 512}, {"Ny", 32}, {"L_x", "auto"}};
    j["perturbation"] = {
        {"shape", "gaussian-sine"}, {"amplitude", 0.02}, {"sigma", 1.0}, {"k", 1}, {"file", ""}};
    j["run"] = {{"t_end", t_end},
                {"cfl", cfl},
                {"bc_mode", "wave-dirichlet"},
                {"limiter", "minmod"},
                {"diag_interval", 0.0},
                {"checkpoint_interval", 0.0}};
    return j;
}

} // namespace detail

/// Default document of a preset; throws ConfigError for unknown names.
inline Json preset_defaults(const std::string& name)
{
    Json j;
    j["preset"] = name;
    if (name == "lemma21") {
        j["study"] = {{"w_minus", -1.0}, {"w_plus", 1.0},      {"t_min", 100.0},
                      {"t_max", 1e4},    {"fit_points", 9},    {"sup_t_max", 1024.0}};
    } else if (name == "lemma22") {
        j["gas"] = {{"gamma", 1.4}};
        j["wave"] = {{"rho_minus", 1.0}, {"u_minus", 0.0}, {"rho_plus", 1.2}, {"u_plus", "auto"}};
        j["study"] = {{"identity_gammas", {1.4, 2.0, 3.0}},
                      {"identity_samples", 100000},
                      {"t_max", 1000.0},
                      {"seed", 20240601},
                      {"sup_t_max", 1024.0}};
    } else if (name == "residual") {
        j["gas"] = {{"gamma", 2.0}};
        j["wave"] = {{"rho_minus", 1.0}, {"u_minus", 0.0}, {"rho_plus", 4.0}, {"u_plus", "auto"}};
        j["study"] = {{"t", 1.0},        {"x_min", -5.0}, {"x_max", 15.0},
                      {"points", 2001}, {"dt_probe", 4e-3}, {"levels", 4}};
    } else if (name == "convergence") {
        j.update(detail::solver_sections(0.5, 0.5));
        j["grid"] = {{"Nx", 64}, {"Ny", 8}, {"L_x", 8.0}};
        j["perturbation"]["amplitude"] = 0.05;
        j["study"] = {{"refinements", 2}};
    } else if (name == "planarity") {
        j.update(detail::solver_sections(0.0, 0.8));
        j["grid"] = {{"Nx", 128}, {"Ny", 8}, {"L_x", 40.0}};
        j["perturbation"]["shape"] = "zero";
        j["perturbation"]["amplitude"] = 0.0;
        j["study"] = {{"steps", 1000}, {"constant_steps", 100}};
    } else if (name == "stability") {
        j.update(detail::solver_sections(200.0, 0.8));
        j["run"]["diag_interval"] = 0.1;
        j["run"]["checkpoint_interval"] = 50.0;
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return j;
}

inline bool preset_uses_solver(const std::string& name)
{
    return name == "convergence" || name == "planarity" || name == "stability";
}

struct ExperimentConfig
{
    std::string preset;
    /// every effective value, "auto" resolved
    Json effective;
    /// present for presets that run the Navier-Stokes solver
    std::optional<SolverConfig> solver;
    Schedule schedule;
    /// gas and end states for the wave-only presets
    std::optional<GasModel> gas;
    std::optional<RiemannData> wave;

    const Json& study() const { return effective.at("study"); }
};

namespace detail {

inline std::string json_type(const Json& j)
{
    if (j.is_number()) return "number";
    return j.type_name();
}

inline void merge_checked(Json& base, const Json& user, const std::string& path)
{
    if (!user.is_object()) {
        throw ConfigError("'" + path + "' must be an object");
    }
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) {
            throw ConfigError("unknown key '" + key + "'");
        }
        Json& slot = base[it.key()];
        const Json& v = it.value();
        if (slot.is_object()) {
            merge_checked(slot, v, key);
            continue;
        }
        const bool auto_slot = slot.is_string() && slot.get<std::string>() == "auto";
        const bool numeric_ok = auto_slot ? (v.is_number() || (v.is_string() && v.get<std::string>() == "auto"))
                                          : json_type(slot) == json_type(v);
        if (!numeric_ok) {
            throw ConfigError("'" + key + "' must be " + (auto_slot ? "a number or \"auto\"" : json_type(slot)) +
                              ", got " + json_type(v));
        }
        if (slot.is_number_integer() && !v.is_number_integer()) {
            throw ConfigError("'" + key + "' must be an integer");
        }
        slot = v;
    }
}

inline double num(const Json& j, const char* section, const char* key)
{
    return j.at(section).at(key).get<double>();
}

inline std::string str(const Json& j, const char* section, const char* key)
{
    return j.at(section).at(key).get<std::string>();
}

/// Resolves the gas and the end states (u_plus "auto" -> on the 2-rarefaction curve).
inline std::pair<GasModel, RiemannData> resolve_wave(Json& eff)
{
    try {
        GasModel gas(num(eff, "gas", "gamma"));
        Json& w = eff["wave"];
        const double rm = w.at("rho_minus").get<double>(), um = w.at("u_minus").get<double>();
        const double rp = w.at("rho_plus").get<double>();
        if (w.at("u_plus").is_string()) {
            w["u_plus"] = connect_end_states(gas, rm, um, rp);
        }
        const auto data = make_riemann_data(gas, rm, um, rp, w.at("u_plus").get<double>());
        if (!data.valid && !data.degenerate()) {
            throw ConfigError("wave: end states are not joined by a 2-rarefaction (need rho_plus > rho_minus and "
                              "u_plus on the wave curve; set u_plus to \"auto\")");
        }
        return {gas, data};
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("gas/wave: ") + e.what());
    }
}

inline SolverConfig build_solver(Json& eff, const GasModel& gas, const RiemannData& data)
{
    SolverConfig c;
    c.gas = gas;
    c.wave = data;
    c.mu = num(eff, "viscosity", "mu");
    c.lam = num(eff, "viscosity", "lambda");
    c.Nx = eff.at("grid").at("Nx").get<int>();
    c.Ny = eff.at("grid").at("Ny").get<int>();
    c.cfl = num(eff, "run", "cfl");
    c.t_end = num(eff, "run", "t_end");

    const std::string bc = str(eff, "run", "bc_mode");
    if (bc == "wave-dirichlet") {
        c.bc = BoundaryMode::wave_dirichlet;
    } else if (bc == "extrapolation") {
        c.bc = BoundaryMode::extrapolation;
    } else {
        throw ConfigError("run.bc_mode must be \"wave-dirichlet\" or \"extrapolation\"");
    }
    const std::string lim = str(eff, "run", "limiter");
    if (lim == "minmod") {
        c.limiter = Limiter::minmod;
    } else if (lim == "none") {
        c.limiter = Limiter::none;
    } else {
        throw ConfigError("run.limiter must be \"minmod\" or \"none\"");
    }

    auto& p = eff.at("perturbation");
    const std::string shape = p.at("shape").get<std::string>();
    if (shape == "gaussian-sine") {
        c.perturbation.shape = PerturbationSpec::Shape::gaussian_sine;
    } else if (shape == "zero") {
        c.perturbation.shape = PerturbationSpec::Shape::zero;
    } else if (shape == "custom-file") {
        c.perturbation.shape = PerturbationSpec::Shape::custom_file;
    } else {
        throw ConfigError("perturbation.shape must be \"gaussian-sine\", \"zero\" or \"custom-file\"");
    }
    c.perturbation.amplitude = p.at("amplitude").get<double>();
    c.perturbation.sigma = p.at("sigma").get<double>();
    c.perturbation.k = p.at("k").get<int>();
    c.perturbation.file = p.at("file").get<std::string>();

    Json& lx = eff["grid"]["L_x"];
    if (lx.is_string()) {
        // fan plus perturbation support stays inside the inner 80% of the strip
        const double speed = std::max(std::abs(data.w_minus), std::abs(data.w_plus));
        lx = (speed * (1.0 + c.t_end) + 10.0 * c.perturbation.sigma) / 0.8;
    }
    c.L_x = lx.get<double>();
    c.validate();
    return c;
}

inline void require_positive(const Json& study, const char* key)
{
    if (!(study.at(key).get<double>() > 0.0)) {
        throw ConfigError(std::string("study.") + key + " must be positive");
    }
}

} // namespace detail

/// Builds a validated configuration from a preset and a user document whose
/// keys must all exist in that preset's defaults.
inline ExperimentConfig make_config(const std::string& preset, const Json& user = Json::object())
{
    ExperimentConfig cfg;
    cfg.preset = preset;
    Json eff = preset_defaults(preset);
    Json overrides = user;
    if (overrides.is_object()) overrides.erase("preset");
    detail::merge_checked(eff, overrides, "");

    if (eff.contains("gas")) {
        auto [gas, data] = detail::resolve_wave(eff);
        cfg.gas = gas;
        cfg.wave = data;
    }
    if (preset_uses_solver(preset)) {
        cfg.solver = detail::build_solver(eff, *cfg.gas, *cfg.wave);
        cfg.schedule.diag_interval = detail::num(eff, "run", "diag_interval");
        cfg.schedule.checkpoint_interval = detail::num(eff, "run", "checkpoint_interval");
        if (cfg.schedule.diag_interval < 0.0 || cfg.schedule.checkpoint_interval < 0.0) {
            throw ConfigError("run: diag_interval and checkpoint_interval must be >= 0 (0 disables)");
        }
    }

    if (eff.contains("study")) {
        const Json& s = eff["study"];
        if (preset == "lemma21") {
            if (!(s.at("w_plus").get<double>() > s.at("w_minus").get<double>())) {
                throw ConfigError("study: w_plus must exceed w_minus");
            }
            detail::require_positive(s, "t_min");
            detail::require_positive(s, "sup_t_max");
            if (!(s.at("t_max").get<double>() > s.at("t_min").get<double>()) || s.at("fit_points").get<int>() < 5) {
                throw ConfigError("study: need t_max > t_min and fit_points >= 5");
            }
        } else if (preset == "lemma22") {
            if (s.at("identity_samples").get<long long>() < 1) {
                throw ConfigError("study.identity_samples must be >= 1");
            }
            detail::require_positive(s, "t_max");
            detail::require_positive(s, "sup_t_max");
            for (const auto& g : s.at("identity_gammas")) {
                if (!g.is_number() || g.get<double>() < 1.0) {
                    throw ConfigError("study.identity_gammas must hold numbers >= 1");
                }
            }
        } else if (preset == "residual") {
            detail::require_positive(s, "t");
            detail::require_positive(s, "dt_probe");
            if (s.at("levels").get<int>() < 2 || s.at("points").get<int>() < 2 ||
                !(s.at("x_max").get<double>() > s.at("x_min").get<double>()) ||
                !(s.at("dt_probe").get<double>() < s.at("t").get<double>())) {
                throw ConfigError("study: need levels >= 2, points >= 2, x_max > x_min, dt_probe < t");
            }
        } else if (preset == "convergence") {
            if (s.at("refinements").get<int>() < 2) {
                throw ConfigError("study.refinements must be >= 2");
            }
        } else if (preset == "planarity") {
            if (s.at("steps").get<int>() < 1 || s.at("constant_steps").get<int>() < 1) {
                throw ConfigError("study: steps and constant_steps must be >= 1");
            }
        }
    }
    cfg.effective = std::move(eff);
    return cfg;
}

/// Parses a JSON config. `preset` (e.g. from the command line) must agree with
/// the document's "preset" key when both are given.
inline ExperimentConfig parse_config(const std::string& text, const std::string& preset = "")
{
    Json user;
    try {
        user = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!user.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    std::string name = preset;
    if (user.contains("preset")) {
        if (!user["preset"].is_string()) {
            throw ConfigError("'preset' must be a string");
        }
        const auto in_file = user["preset"].get<std::string>();
        if (!name.empty() && name != in_file) {
            throw ConfigError("preset '" + name + "' conflicts with config preset '" + in_file + "'");
        }
        name = in_file;
    }
    if (name.empty()) {
        throw ConfigError("no preset given (set \"preset\" in the config or pass --preset)");
    }
    return make_config(name, user);
}

} // namespace prw
