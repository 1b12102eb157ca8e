// Acceptance gate: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; otherwise only the listed numbers (e.g. `prw_acceptance 1 7 8`).
// The stability criterion writes its artifacts under PRW_ACCEPTANCE_OUT
// (default ./acceptance_out).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "prw/prw.hpp"

using namespace prw;

namespace {

struct Outcome
{
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        passed = passed && ok;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Fold the named study checks into the outcome.
void take_checks(Outcome& o, const StudyReport& rep, const std::function<bool(const std::string&)>& wanted)
{
    if (!rep.completed) o.require(false, rep.preset + " did not complete: " + rep.error);
    int n = 0;
    for (const auto& c : rep.checks) {
        if (!wanted(c.name)) continue;
        ++n;
        o.require(c.passed, c.name + " [" + c.measured + "]");
    }
    if (n == 0) o.require(false, "no matching checks in " + rep.preset);
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

// The lemma21 study is shared by criteria 1 and 2; run it once.
const StudyReport& lemma21_report(double* seconds = nullptr)
{
    static double secs = 0.0;
    static const StudyReport rep = [] {
        const auto t0 = std::chrono::steady_clock::now();
        auto r = lemma21_study(make_config("lemma21"));
        secs = seconds_since(t0);
        return r;
    }();
    if (seconds) *seconds = secs;
    return rep;
}

const StudyReport& lemma22_report()
{
    static const StudyReport rep = lemma22_study(make_config("lemma22"));
    return rep;
}

Outcome criterion1()
{
    Outcome o;
    double secs = 0.0;
    const auto& rep = lemma21_report(&secs);
    take_checks(o, rep, [](const std::string& n) { return starts_with(n, "slope of"); });
    o.require(secs <= 60.0, "runtime " + detail::fmt(secs, "%.1f") + " s <= 60 s");
    return o;
}

Outcome criterion2()
{
    Outcome o;
    take_checks(o, lemma21_report(), [](const std::string& n) { return starts_with(n, "Burgers sup distance"); });
    take_checks(o, lemma22_report(), [](const std::string& n) { return starts_with(n, "wave sup distance"); });
    return o;
}

Outcome criterion3()
{
    Outcome o;
    take_checks(o, lemma22_report(), [](const std::string& n) { return starts_with(n, "wave identities"); });
    return o;
}

Outcome criterion4()
{
    Outcome o;
    take_checks(o, residual_study(make_config("residual")), [](const std::string&) { return true; });
    return o;
}

Outcome criterion5()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto conv = convergence_study(make_config("convergence"));
    const auto plan = planarity_study(make_config("planarity"));
    const double secs = seconds_since(t0);
    take_checks(o, conv, [](const std::string&) { return true; });
    take_checks(o, plan, [](const std::string&) { return true; });
    o.require(secs <= 300.0, "runtime " + detail::fmt(secs, "%.1f") + " s <= 300 s");
    return o;
}

Outcome criterion6()
{
    Outcome o;
    const char* env = std::getenv("PRW_ACCEPTANCE_OUT");
    StabilityOptions opts;
    const auto out = std::filesystem::path(env ? env : "acceptance_out") / "stability";
    std::filesystem::remove_all(out);
    opts.out_dir = out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = stability_study(make_config("stability"), opts);
    const double secs = seconds_since(t0);
    take_checks(o, rep, [](const std::string& n) { return n != "mass audit"; });
    o.require(secs <= 1800.0, "runtime " + detail::fmt(secs, "%.0f") + " s <= 1800 s");
    return o;
}

Outcome criterion7()
{
    Outcome o;
    // closed forms
    double worst = 0.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> R(0.2, 5.0);
    for (int k = 0; k < 1000; ++k) {
        const double rho = R(rng), bar = R(rng), phi = rho - bar;
        worst = std::max(worst, std::abs(potential_density(GasModel(2.0), rho, bar) - phi * phi / (2.0 * rho)));
        worst = std::max(worst, std::abs(potential_density(GasModel(1.0), rho, bar) -
                                         (std::log(rho / bar) + bar / rho - 1.0)));
    }
    o.require(worst <= 1e-12, "potential closed forms max err " + detail::fmt(worst, "%.2e"));

    // planted exponents with mild multiplicative noise
    double fit_err = 0.0;
    std::normal_distribution<double> noise(0.0, 0.01);
    for (double e : {-1.0, -0.75, -0.5, -0.25, 0.0}) {
        std::vector<double> t, v;
        for (int k = 0; k <= 40; ++k) {
            t.push_back(std::pow(10.0, 1.0 + 0.075 * k));
            v.push_back(3.0 * std::pow(t.back(), e) * std::exp(noise(rng)));
        }
        fit_err = std::max(fit_err, std::abs(decay_rate_fit(t, v, 10.0, 1e4).slope - e));
    }
    o.require(fit_err <= 0.01, "planted exponents max err " + detail::fmt(fit_err, "%.2e"));

    // Sobolev sup bound on random smooth fields with zero mean in y
    const Grid g{160, 48, 8.0};
    std::uniform_real_distribution<double> U(-1.0, 1.0), C(-4.0, 4.0), S(0.4, 2.0);
    double ratio = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        double amp[4], cx[4], sx[4], ph[4];
        int kk[4];
        for (int m = 0; m < 4; ++m) {
            amp[m] = U(rng);
            cx[m] = C(rng);
            sx[m] = S(rng);
            kk[m] = 1 + static_cast<int>(3 * std::abs(U(rng)));
            ph[m] = 2.0 * std::numbers::pi * U(rng);
        }
        Field f(g.size());
        double sup = 0.0;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                double v = 0.0;
                for (int m = 0; m < 4; ++m) {
                    const double r = (g.x(i) - cx[m]) / sx[m];
                    v += amp[m] * std::exp(-r * r) * std::cos(2.0 * std::numbers::pi * kk[m] * g.y(j) + ph[m]);
                }
                f[g.index(i, j)] = v;
                sup = std::max(sup, std::abs(v));
            }
        ratio = std::max(ratio, sup / sobolev_sup_bound(f, g));
    }
    o.require(ratio <= 1.05, "sup/bound over 100 fields max " + detail::fmt(ratio, "%.3f"));
    return o;
}

Outcome criterion8()
{
    Outcome o;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> G(1.0, 3.0), R(0.1, 10.0), U(-2.0, 2.0), F(0.0, 1.0);

    double fan_err = 0.0;
    for (int k = 0; k < 2000; ++k) {
        const GasModel gas(k % 10 == 0 ? 1.0 : G(rng));
        double rm = R(rng), rp = R(rng);
        if (rp < rm) std::swap(rm, rp);
        if (rp == rm) continue;
        const auto data = make_rarefaction(gas, rm, U(rng), rp);
        // a state strictly inside the fan, on the same 2-wave curve
        const double rho = rm + F(rng) * (rp - rm);
        const double u = connect_end_states(gas, rm, data.u_minus, rho);
        const double lam = characteristic_speed(gas, Family::second, rho, u);
        const auto back = rarefaction_fan(gas, data, lam);
        fan_err = std::max(fan_err, std::max(std::abs(back.rho - rho), std::abs(back.u - u)) /
                                        std::max(1.0, std::max(std::abs(rho), std::abs(u))));
    }
    o.require(fan_err <= 1e-10, "fan round-trip max err " + detail::fmt(fan_err, "%.2e"));

    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double quad_err = 0.0;
    for (int k = 0; k < 500; ++k) {
        const double g = k % 10 == 0 ? 1.0 : G(rng);
        const double rm = R(rng), rp = R(rng), um = U(rng);
        const double integral =
            GK::integrate([g](double s) { return std::sqrt(std::pow(s, g - 1.0)) / s; }, rm, rp, 8, 1e-14);
        quad_err = std::max(quad_err, std::abs(connect_end_states(GasModel(g), rm, um, rp) - (um + integral)));
    }
    o.require(quad_err <= 1e-10, "connect_end_states vs quadrature max err " + detail::fmt(quad_err, "%.2e"));
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
        {"Burgers derivative decay exponents", criterion1},
        {"smooth profiles converge to their fans", criterion2},
        {"approximate wave derivative identities", criterion3},
        {"Euler residual order and size", criterion4},
        {"solver verification", criterion5},
        {"desk-scale stability run", criterion6},
        {"diagnostics unit suite", criterion7},
        {"cross-module oracle equivalence", criterion8},
    };
    std::set<int> selected;
    for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        failures += o.passed ? 0 : 1;
        std::printf("criterion %d %s: %s | %s\n", id, o.passed ? "PASS" : "FAIL", criteria[k].first,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
