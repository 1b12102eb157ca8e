#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "prw/prw.hpp"

namespace fs = std::filesystem;
using namespace prw;

namespace {

std::string read_file(const fs::path& p)
{
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read '" + p.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << text;
}

ExperimentConfig load_config(const std::string& config_path, const std::string& preset)
{
    if (!config_path.empty()) return parse_config(read_file(config_path), preset);
    if (preset.empty()) throw ConfigError("give --config or --preset");
    return make_config(preset);
}

Json thread_info()
{
    Json j;
    const char* env = std::getenv("OMP_NUM_THREADS");
    j["OMP_NUM_THREADS"] = env ? Json(env) : Json(nullptr);
#ifdef _OPENMP
    j["openmp"] = true;
    j["max_threads"] = omp_get_max_threads();
#else
    j["openmp"] = false;
    j["max_threads"] = 1;
#endif
    return j;
}

struct RunArgs
{
    std::string config;
    std::string preset;
    std::string out;
    std::string restart;
};

/// Records before the checkpoint time and the record at it, from the
/// diagnostics.csv of the run that wrote the checkpoint (if present).
void load_prior_records(const fs::path& checkpoint, double t, StabilityOptions& opts)
{
    const fs::path csv = checkpoint.parent_path().parent_path() / "diagnostics.csv";
    if (!fs::exists(csv)) return;
    std::ifstream in(csv);
    const auto table = read_csv(in);
    const auto& ts = table.column("t");
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const auto r = record_from_row(table, k);
        if (r.t < t) {
            opts.prior.push_back(r);
        } else if (r.t == t) {
            opts.seed = r;
        }
    }
}

int cmd_run(const RunArgs& a)
{
    const auto cfg = load_config(a.config, a.preset);
    const fs::path out(a.out);
    fs::create_directories(out);

    Json manifest;
    manifest["tool"] = "prw";
    manifest["preset"] = cfg.preset;
    manifest["config"] = cfg.effective;
    manifest["threads"] = thread_info();
    manifest["restart_from"] = a.restart.empty() ? Json(nullptr) : Json(a.restart);
    manifest["status"] = "running";
    write_file(out / "manifest.json", manifest.dump(2) + "\n");

    StudyReport rep;
    try {
        if (cfg.preset == "stability") {
            StabilityOptions opts;
            opts.out_dir = out;
            if (!a.restart.empty()) {
                auto state = read_checkpoint(fs::path(a.restart));
                load_prior_records(a.restart, state.time, opts);
                opts.start = std::move(state);
            }
            rep = stability_study(cfg, std::move(opts));
        } else {
            if (!a.restart.empty()) throw ConfigError("--restart applies to the stability preset only");
            rep = run_study(cfg);
        }
    } catch (const std::exception& e) {
        manifest["status"] = "error";
        manifest["error"] = e.what();
        write_file(out / "manifest.json", manifest.dump(2) + "\n");
        std::cerr << "prw: " << e.what() << '\n';
        return 2;
    }

    for (const auto& t : rep.tables) write_file(out / t.file, t.csv());
    const std::string report = render_report(rep);
    write_file(out / "report.txt", report);

    manifest["status"] = !rep.completed ? "error" : (rep.passed() ? "passed" : "checks_failed");
    if (!rep.completed) manifest["error"] = rep.error;
    Json checks = Json::array();
    for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}});
    manifest["checks"] = checks;
    manifest["runtime_s"] = rep.seconds;
    write_file(out / "manifest.json", manifest.dump(2) + "\n");

    std::cout << report;
    if (!rep.completed) return 2;
    return rep.passed() ? 0 : 1;
}

int cmd_describe(const std::string& preset)
{
    if (!preset.empty()) {
        std::cout << preset_defaults(preset).dump(2) << '\n';
        return 0;
    }
    for (const auto& name : preset_names()) {
        std::cout << preset_defaults(name).dump(2) << "\n\n";
    }
    return 0;
}

int cmd_fit(const std::string& path, const std::string& column, const std::vector<double>& window)
{
    fs::path csv(path);
    if (fs::is_directory(csv)) csv /= "diagnostics.csv";
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("cannot read '" + csv.string() + "'");
    const auto table = read_csv(in);
    const double lo = window.size() > 0 ? window[0] : 0.0;
    const double hi = window.size() > 1 ? window[1] : INFINITY;
    const auto fit = decay_rate_fit(table.column("t"), table.column(column), lo, hi);
    std::cout << "column: " << column << "\nwindow: [" << lo << ", " << hi << "]\npoints: " << fit.points
              << "\nslope: " << format_double(fit.slope) << "\nr2: " << format_double(fit.r2) << '\n';
    return 0;
}

int cmd_profile(const std::string& config, const std::string& preset, double t, double x_min, double x_max,
                int points, const std::string& out)
{
    const auto cfg = load_config(config, preset.empty() && config.empty() ? "stability" : preset);
    if (!cfg.gas || !cfg.wave) throw ConfigError("preset '" + cfg.preset + "' has no gas/wave section");
    if (points < 2 || !(x_max > x_min)) throw ConfigError("need points >= 2 and x_max > x_min");
    std::vector<double> xs(points);
    for (int i = 0; i < points; ++i) xs[i] = x_min + (x_max - x_min) * i / (points - 1);
    const auto p = sample_profile(*cfg.gas, *cfg.wave, t, xs);
    std::ostringstream os;
    os << "x,rho_bar,u_bar,rho_bar_x,u_bar_x,rho_bar_xx,u_bar_xx,rho_bar_xxx,u_bar_xxx\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double v[] = {p.grid_x[i],     p.rho_bar[i],    p.u_bar[i],       p.rho_bar_x[i],
                            p.u_bar_x[i],    p.rho_bar_xx[i], p.u_bar_xx[i],    p.rho_bar_xxx[i],
                            p.u_bar_xxx[i]};
        for (std::size_t k = 0; k < std::size(v); ++k) os << (k ? "," : "") << format_double(v[k]);
        os << '\n';
    }
    if (out.empty() || out == "-") {
        std::cout << os.str();
    } else {
        write_file(out, os.str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"planar rarefaction wave experiments"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "run a preset study and write its artifacts");
    run->add_option("--config", run_args.config, "JSON config file");
    run->add_option("--preset", run_args.preset, "preset name")->check(CLI::IsMember(preset_names()));
    run->add_option("--out", run_args.out, "output directory")->required();
    run->add_option("--restart", run_args.restart, "checkpoint to resume from (stability)");

    std::string describe_preset;
    auto* describe = app.add_subcommand("describe", "print preset defaults as JSON");
    describe->add_option("--preset", describe_preset, "preset name")->check(CLI::IsMember(preset_names()));

    std::string fit_path = "diagnostics.csv", fit_column;
    std::vector<double> fit_window;
    auto* fit = app.add_subcommand("fit", "log-log decay fit of a diagnostics column");
    fit->add_option("path", fit_path, "diagnostics.csv or a run directory");
    fit->add_option("--column", fit_column, "column name")->required();
    fit->add_option("--window", fit_window, "time window: LO HI")->expected(2);

    std::string prof_config, prof_preset, prof_out;
    double prof_t = 0.0, prof_xmin = -20.0, prof_xmax = 20.0;
    int prof_points = 401;
    auto* profile = app.add_subcommand("profile", "sample the approximate wave and its derivatives");
    profile->add_option("--config", prof_config, "JSON config file");
    profile->add_option("--preset", prof_preset, "preset name")->check(CLI::IsMember(preset_names()));
    profile->add_option("--t", prof_t, "time");
    profile->add_option("--x-min", prof_xmin, "left end");
    profile->add_option("--x-max", prof_xmax, "right end");
    profile->add_option("--points", prof_points, "sample count");
    profile->add_option("--out", prof_out, "output CSV (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_args);
        if (*describe) return cmd_describe(describe_preset);
        if (*fit) return cmd_fit(fit_path, fit_column, fit_window);
        if (*profile)
            return cmd_profile(prof_config, prof_preset, prof_t, prof_xmin, prof_xmax, prof_points, prof_out);
    } catch (const std::exception& e) {
        std::cerr << "prw: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
