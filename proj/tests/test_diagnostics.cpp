#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "prw/diagnostics.hpp"

using namespace prw;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

FlowState wave_state(const GasModel& gas, const RiemannData& d, const Grid& g, double t)
{
    FlowState s(g, t);
    for (int i = 0; i < g.nx; ++i) {
        const auto bar = evaluate_wave(gas, d, t, g.x(i));
        for (int j = 0; j < g.ny; ++j) {
            s.rho[g.index(i, j)] = bar.rho;
            s.mx[g.index(i, j)] = bar.rho * bar.u;
        }
    }
    return s;
}

template <typename F>
Field sample(const Grid& g, F&& f)
{
    Field out(g.size());
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) out[g.index(i, j)] = f(g.x(i), g.y(j));
    return out;
}

double grid_max_abs(const Field& f)
{
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST(PerturbationFields, Examples)
{
    GasModel gas(1.4);
    const auto d = make_rarefaction(gas, 1.0, 0.0, 1.3);
    const Grid g{40, 6, 12.0};
    const auto s = wave_state(gas, d, g, 2.5);
    const auto f = perturbation_fields(s, gas, d);
    EXPECT_EQ(grid_max_abs(f.phi), 0.0);
    EXPECT_LE(grid_max_abs(f.varphi), 1e-15);
    EXPECT_EQ(grid_max_abs(f.psi), 0.0);

    const auto flat = make_riemann_data(gas, 1.1, 0.4, 1.1, 0.4);
    FlowState c(g, 3.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        c.rho[k] = 1.0 + 0.01 * k;
        c.mx[k] = c.rho[k] * (0.1 * std::sin(1.0 * k));
        c.my[k] = c.rho[k] * 0.2;
    }
    const auto fc = perturbation_fields(c, gas, flat);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_DOUBLE_EQ(fc.phi[k], c.rho[k] - 1.1);
        EXPECT_NEAR(fc.varphi[k], 0.1 * std::sin(1.0 * k) - 0.4, 1e-15);
        EXPECT_NEAR(fc.psi[k], 0.2, 1e-15);
    }

    // rho = rho_bar + x y
    FlowState xy = s;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const auto k = g.index(i, j);
            const double u = xy.u(k);
            xy.rho[k] += g.x(i) * g.y(j);
            xy.mx[k] = xy.rho[k] * u;
        }
    const auto fxy = perturbation_fields(xy, gas, d);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) EXPECT_NEAR(fxy.phi[g.index(i, j)], g.x(i) * g.y(j), 1e-14);
}

TEST(SobolevNorms, Examples)
{
    const Grid g{32, 16, 3.0};
    const Field zero(g.size(), 0.0);
    const auto z = sobolev_norms(zero, g);
    EXPECT_EQ(z.l2, 0.0);
    EXPECT_EQ(z.h1, 0.0);
    EXPECT_EQ(z.h2, 0.0);

    const Field c(g.size(), -2.5);
    const auto cn = sobolev_norms(c, g);
    const double measure = 2.0 * g.L_x;
    EXPECT_NEAR(cn.l2, 2.5 * std::sqrt(measure), 1e-13);
    EXPECT_NEAR(cn.h1, cn.l2, 1e-13);
    EXPECT_NEAR(cn.h2, cn.l2, 1e-13);

    EXPECT_THROW(sobolev_norms(Field(2 * 16, 0.0), Grid{2, 16, 1.0}), std::domain_error);
    EXPECT_THROW(sobolev_norms(Field(10), g), std::domain_error);
}

TEST(SobolevNorms, SineInYConvergesAtSecondOrder)
{
    // f = sin(2 pi y): |f|^2 = L_x, |f_y|^2 = (2 pi)^2 L_x, |f_yy|^2 = (2 pi)^4 L_x
    const double L = 2.0;
    double prev = 0.0;
    for (int ny : {8, 16, 32, 64}) {
        const Grid g{8, ny, L};
        const auto f = sample(g, [](double, double y) { return std::sin(kTwoPi * y); });
        const auto n = sobolev_norms(f, g);
        EXPECT_NEAR(n.l2 * n.l2, L, 1e-12);
        const double exact_h1 = L * (1 + std::pow(kTwoPi, 2));
        const double err = std::abs(n.h1 * n.h1 - exact_h1);
        if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.3);
        prev = err;
    }
}

TEST(SobolevNorms, AbsolutelyHomogeneous)
{
    const Grid g{24, 12, 4.0};
    const auto f = sample(g, [](double x, double y) { return std::exp(-x * x) * std::cos(kTwoPi * y) + 0.1 * x; });
    const auto n = sobolev_norms(f, g);
    Field sf = f;
    for (double& v : sf) v *= -3.0;
    const auto ns = sobolev_norms(sf, g);
    EXPECT_NEAR(ns.l2, 3.0 * n.l2, 1e-12 * n.l2);
    EXPECT_NEAR(ns.h1, 3.0 * n.h1, 1e-12 * n.h1);
    EXPECT_NEAR(ns.h2, 3.0 * n.h2, 1e-12 * n.h2);
}

TEST(DifferenceOperators, ExactOnQuadraticsInX)
{
    const Grid g{10, 4, 2.0};
    const auto f = sample(g, [](double x, double) { return 3.0 * x * x - x + 1.0; });
    const auto fx = diff_x(f, g), fxx = diff_xx(f, g);
    for (int i = 0; i < g.nx; ++i) {
        EXPECT_NEAR(fx[g.index(i, 1)], 6.0 * g.x(i) - 1.0, 1e-12);
        EXPECT_NEAR(fxx[g.index(i, 1)], 6.0, 1e-11);
    }
}

TEST(SobolevSupBound, HoldsOnRandomFieldsWithZeroMeanInY)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(-1.0, 1.0), C(-4.0, 4.0), S(0.4, 2.0);
    const Grid g{160, 48, 8.0};
    for (int trial = 0; trial < 100; ++trial) {
        struct Mode
        {
            double amp, cx, sx;
            int k;
            double phase;
        };
        std::vector<Mode> modes;
        for (int m = 0; m < 4; ++m) {
            modes.push_back({U(rng), C(rng), S(rng), 1 + static_cast<int>(3 * std::abs(U(rng))), kTwoPi * U(rng)});
        }
        const auto f = sample(g, [&](double x, double y) {
            double v = 0.0;
            for (const auto& m : modes) {
                const double r = (x - m.cx) / m.sx;
                v += m.amp * std::exp(-r * r) * std::cos(kTwoPi * m.k * y + m.phase);
            }
            return v;
        });
        EXPECT_LE(grid_max_abs(f), 1.05 * sobolev_sup_bound(f, g)) << "trial " << trial;
    }
}

TEST(SobolevSupBound, FailsForFieldsConstantInY)
{
    // With f_y = 0 the right side vanishes while sup|f| does not.
    const Grid g{64, 8, 6.0};
    const auto f = sample(g, [](double x, double) { return std::exp(-x * x); });
    EXPECT_EQ(sobolev_sup_bound(f, g), 0.0);
    EXPECT_GT(grid_max_abs(f), 0.9);
}

TEST(PotentialEnergy, ClosedForms)
{
    // gamma = 2: Phi = phi^2 / (2 rho)
    EXPECT_NEAR(potential_density(GasModel(2.0), 2.0, 1.0), 0.25, 1e-12);
    // gamma = 1: Phi = ln(rho/rho_bar) + rho_bar/rho - 1
    EXPECT_NEAR(potential_density(GasModel(1.0), std::numbers::e, 1.0), 1.0 / std::numbers::e, 1e-12);
    EXPECT_EQ(potential_density(GasModel(1.4), 1.7, 1.7), 0.0);
    EXPECT_THROW(potential_density(GasModel(1.4), -1.0, 1.0), std::domain_error);
}

TEST(PotentialEnergy, MatchesIntegralForm)
{
    // Phi = integral from rho_bar to rho of (p(s) - p(rho_bar)) / s^2 ds
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> R(0.2, 4.0);
    for (double gamma : {1.0, 1.4, 2.0, 3.0}) {
        GasModel gas(gamma);
        for (int k = 0; k < 50; ++k) {
            const double rho = R(rng), bar = R(rng);
            const double pb = gas.pressure(bar);
            const double integral =
                GK::integrate([&](double s) { return (gas.pressure(s) - pb) / (s * s); }, bar, rho, 5, 1e-14);
            EXPECT_NEAR(potential_density(gas, rho, bar), integral, 1e-12 * std::max(1.0, std::abs(integral)));
            EXPECT_GE(potential_density(gas, rho, bar), 0.0);
        }
    }
}

TEST(PotentialEnergy, VanishesOnTheWave)
{
    GasModel gas(1.4);
    const auto d = make_rarefaction(gas, 1.0, 0.0, 1.3);
    const Grid g{32, 4, 8.0};
    EXPECT_EQ(potential_energy(wave_state(gas, d, g, 1.0), gas, d), 0.0);
}

TEST(WeightedNorm, Examples)
{
    GasModel gas(1.4);
    const auto d = make_rarefaction(gas, 1.0, 0.1, 1.5);
    const double t = 2.0;
    const Grid g{4000, 4, 60.0};
    const auto profile = sample_profile(gas, d, t, g.x_centers());

    PerturbationFields f{g, Field(g.size(), 0.0), Field(g.size(), 0.0), Field(g.size(), 0.0)};
    EXPECT_EQ(weighted_norm(f, profile), 0.0);

    // integral of u_bar_x over the line is u_+ - u_-
    std::fill(f.phi.begin(), f.phi.end(), 1.0);
    EXPECT_NEAR(weighted_norm(f, profile), d.u_plus - d.u_minus, 1e-6);
    std::fill(f.varphi.begin(), f.varphi.end(), 1.0);
    EXPECT_NEAR(weighted_norm(f, profile), 2.0 * (d.u_plus - d.u_minus), 2e-6);

    const auto flat = make_riemann_data(gas, 1.0, 0.1, 1.0, 0.1);
    EXPECT_EQ(weighted_norm(f, sample_profile(gas, flat, t, g.x_centers())), 0.0);

    const auto other = sample_profile(gas, d, t, Grid{4000, 4, 50.0}.x_centers());
    EXPECT_THROW(weighted_norm(f, other), std::domain_error);
    EXPECT_THROW(weighted_norm(f, sample_profile(gas, d, t, {0.0, 1.0})), std::domain_error);
}

TEST(WeightedNorm, HomogeneousAndMonotone)
{
    GasModel gas(2.0);
    const auto d = make_rarefaction(gas, 1.0, 0.0, 2.0);
    const Grid g{200, 8, 10.0};
    const auto profile = sample_profile(gas, d, 1.0, g.x_centers());
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0), S(0.0, 1.0);
    PerturbationFields f{g, Field(g.size()), Field(g.size()), Field(g.size(), 0.0)};
    for (std::size_t k = 0; k < g.size(); ++k) {
        f.phi[k] = U(rng);
        f.varphi[k] = U(rng);
    }
    const double base = weighted_norm(f, profile);
    EXPECT_GT(base, 0.0);
    auto scaled = f, smaller = f;
    for (std::size_t k = 0; k < g.size(); ++k) {
        scaled.phi[k] *= -2.0;
        scaled.varphi[k] *= -2.0;
        smaller.phi[k] *= S(rng);
        smaller.varphi[k] *= S(rng);
    }
    EXPECT_NEAR(weighted_norm(scaled, profile), 4.0 * base, 1e-12 * base);
    EXPECT_LE(weighted_norm(smaller, profile), base);
}

TEST(SupErrorVsFan, Examples)
{
    GasModel gas(1.4);
    const auto d = make_rarefaction(gas, 1.0, 0.0, 1.2);
    const Grid g{2000, 4, 1200.0};

    auto s0 = wave_state(gas, d, g, 0.0);
    EXPECT_THROW(sup_error_vs_fan(s0, gas, d), std::domain_error);

    // the sampled approximate wave agrees with the continuous sup distance
    for (double t : {4.0, 64.0, 512.0}) {
        const Grid gt{4000, 4, 2.0 * (t + 10.0)};
        const auto s = wave_state(gas, d, gt, t);
        const double grid_sup = sup_error_vs_fan(s, gas, d);
        const double exact = wave_sup_distance_to_fan(gas, d, t);
        EXPECT_LE(grid_sup, exact * (1 + 1e-9));
        EXPECT_GE(grid_sup, 0.9 * exact) << "t=" << t;
    }

    // the fan sampled on the grid has zero error
    FlowState fan(g, 100.0);
    for (int i = 0; i < g.nx; ++i) {
        const auto r = rarefaction_fan(gas, d, g.x(i) / 100.0);
        for (int j = 0; j < g.ny; ++j) {
            fan.rho[g.index(i, j)] = r.rho;
            fan.mx[g.index(i, j)] = r.rho * r.u;
        }
    }
    EXPECT_LE(sup_error_vs_fan(fan, gas, d), 1e-15);

    const auto flat = make_riemann_data(gas, 1.3, 0.2, 1.3, 0.2);
    const auto c = wave_state(gas, flat, g, 5.0);
    EXPECT_LE(sup_error_vs_fan(c, gas, flat), 1e-15);
}

TEST(DecayRateFit, PlantedExponents)
{
    std::vector<double> t, v;
    for (int k = 0; k <= 20; ++k) t.push_back(std::pow(10.0, 2.0 + 0.1 * k));
    for (double e : {-1.0, -0.5, -0.75, 0.0}) {
        v.clear();
        for (double x : t) v.push_back(7.0 * std::pow(x, e));
        const auto fit = decay_rate_fit(t, v, 1e2, 1e4);
        EXPECT_NEAR(fit.slope, e, 1e-10);
        EXPECT_NEAR(fit.r2, 1.0, 1e-12);
        EXPECT_EQ(fit.points, 21u);
    }
    v.assign(t.size(), 1.0);
    v[3] = 0.0;
    EXPECT_THROW(decay_rate_fit(t, v, 1e2, 1e4), std::domain_error);
    v[3] = 1.0;
    EXPECT_THROW(decay_rate_fit(t, v, 1e2, 2e2), std::domain_error);
}

TEST(DiagnosticsTracker, TrapezoidRunningIntegrals)
{
    DiagnosticsTracker tr;
    double expected_wgt = 0.0;
    double prev_cum = -1.0;
    for (int k = 0; k <= 10; ++k) {
        DiagnosticsRecord r;
        r.t = 0.5 * k;
        r.wgt = 1.0 + r.t;
        r.grad_diss = 2.0;
        const auto out = tr.add(r);
        if (k > 0) expected_wgt += 0.5 * 0.5 * ((1.0 + 0.5 * (k - 1)) + r.wgt);
        EXPECT_NEAR(out.cum_wgt, expected_wgt, 1e-14);
        EXPECT_NEAR(out.cum_grad, 2.0 * r.t, 1e-14);
        EXPECT_GE(out.cum_wgt, prev_cum);
        prev_cum = out.cum_wgt;
    }
    DiagnosticsRecord back;
    back.t = 1.0;
    EXPECT_THROW(tr.add(back), std::domain_error);
}

TEST(Measure, ZeroPerturbationGivesZeroNorms)
{
    GasModel gas(1.4);
    const auto d = make_rarefaction(gas, 1.0, 0.0, 1.2);
    const Grid g{64, 8, 20.0};
    const auto r = measure(wave_state(gas, d, g, 3.0), gas, d);
    EXPECT_LE(r.l2_pert, 1e-14);
    EXPECT_LE(r.h2_pert, 1e-12);
    EXPECT_LE(r.wgt, 1e-28);
    EXPECT_LE(r.pot, 1e-28);
    EXPECT_LE(r.sup_pert, 1e-15);
    EXPECT_GT(r.sup_fan, 0.0);
}

TEST(DiagnosticsCsv, RoundTripsAt17Digits)
{
    DiagnosticsRecord r{0.1, 1.0 / 3.0, std::sqrt(2.0), 1e-300, 2.0 / 7.0, 5e-17, 3.0, 0.0, 1.25, 9.87654321e-5,
                        std::numbers::pi, std::numbers::e};
    std::stringstream ss;
    write_csv_header(ss);
    write_csv_row(ss, r);
    const auto table = read_csv(ss);
    const auto back = record_from_row(table, 0);
    EXPECT_EQ(back.l2_pert, r.l2_pert);
    EXPECT_EQ(back.h1_pert, r.h1_pert);
    EXPECT_EQ(back.h2_pert, r.h2_pert);
    EXPECT_EQ(back.sup_pert, r.sup_pert);
    EXPECT_EQ(back.cum_grad, r.cum_grad);
    EXPECT_EQ(table.names.size(), 12u);
}
