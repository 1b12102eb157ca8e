#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "prw/checkpoint.hpp"
#include "prw/run.hpp"

using namespace prw;

namespace {

SolverConfig small_config()
{
    SolverConfig cfg;
    cfg.gas = GasModel(1.4);
    cfg.wave = make_rarefaction(cfg.gas, 1.0, 0.0, 1.2);
    cfg.mu = 0.1;
    cfg.L_x = 10.0;
    cfg.Nx = 32;
    cfg.Ny = 8;
    cfg.cfl = 0.8;
    cfg.t_end = 2.0;
    cfg.perturbation = {PerturbationSpec::Shape::gaussian_sine, 0.02, 1.0, 1, ""};
    return cfg;
}

std::string csv_of(const std::vector<DiagnosticsRecord>& rs)
{
    std::ostringstream os;
    write_csv_header(os);
    for (const auto& r : rs) write_csv_row(os, r);
    return os.str();
}

} // namespace

TEST(Checkpoint, RoundTripIsBitExact)
{
    auto s = initialize(small_config());
    s.time = 0.7312345678901234;
    std::stringstream ss;
    write_checkpoint(ss, s);
    const auto back = read_checkpoint(ss);
    EXPECT_EQ(back.time, s.time);
    EXPECT_EQ(back.grid, s.grid);
    EXPECT_EQ(back.rho, s.rho);
    EXPECT_EQ(back.mx, s.mx);
    EXPECT_EQ(back.my, s.my);
}

TEST(Checkpoint, ByteLayout)
{
    FlowState s(Grid{5, 4, 2.5}, 1.5);
    for (std::size_t k = 0; k < s.rho.size(); ++k) s.rho[k] = 1.0 + k;
    std::stringstream ss;
    write_checkpoint(ss, s);
    const std::string b = ss.str();
    ASSERT_EQ(b.size(), 4u + 4 + 8 + 8 + 8 + 8 + 3 * 20 * 8);
    EXPECT_EQ(b.substr(0, 4), "R2D1");
    auto byte = [&](std::size_t i) { return static_cast<unsigned char>(b[i]); };
    EXPECT_EQ(byte(4), 1u);
    EXPECT_EQ(byte(5) | byte(6) | byte(7), 0u);
    EXPECT_EQ(byte(8), 5u);  // Nx, little-endian i64
    EXPECT_EQ(byte(16), 4u); // Ny
    double lx, t, first;
    std::memcpy(&lx, b.data() + 24, 8);
    std::memcpy(&t, b.data() + 32, 8);
    std::memcpy(&first, b.data() + 40 + 8, 8); // rho at (0, 1)
    EXPECT_EQ(lx, 2.5);
    EXPECT_EQ(t, 1.5);
    EXPECT_EQ(first, 2.0);
}

TEST(Checkpoint, RejectsCorruptFiles)
{
    FlowState s(Grid{4, 4, 1.0}, 0.0);
    std::stringstream ok;
    write_checkpoint(ok, s);
    const std::string good = ok.str();

    std::stringstream bad_magic("XXXX" + good.substr(4));
    EXPECT_THROW(read_checkpoint(bad_magic), CheckpointError);
    std::string v2 = good;
    v2[4] = 2;
    std::stringstream bad_version(v2);
    EXPECT_THROW(read_checkpoint(bad_version), CheckpointError);
    std::stringstream truncated(good.substr(0, good.size() - 3));
    EXPECT_THROW(read_checkpoint(truncated), CheckpointError);
    std::stringstream trailing(good + "x");
    EXPECT_THROW(read_checkpoint(trailing), CheckpointError);
    EXPECT_THROW(read_checkpoint(std::filesystem::path("/nonexistent/ckpt.bin")), CheckpointError);
}

TEST(Run, ZeroEndTimeGivesInitialDiagnosticsOnly)
{
    auto cfg = small_config();
    cfg.t_end = 0.0;
    const auto r = run(cfg, {0.1, 0.5});
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].t, 0.0);
    EXPECT_EQ(r.steps, 0u);
    EXPECT_TRUE(r.ok);
}

TEST(Run, ScheduleAndMonotoneIntegrals)
{
    const auto cfg = small_config();
    int checkpoints = 0;
    RunObserver obs;
    obs.on_checkpoint = [&](const FlowState&) { ++checkpoints; };
    const auto r = run(cfg, {0.25, 1.0}, obs);
    ASSERT_TRUE(r.ok);
    ASSERT_EQ(r.records.size(), 9u);
    for (std::size_t k = 0; k < r.records.size(); ++k) {
        EXPECT_NEAR(r.records[k].t, 0.25 * k, 1e-12);
        if (k) {
            EXPECT_GE(r.records[k].cum_wgt, r.records[k - 1].cum_wgt);
            EXPECT_GE(r.records[k].cum_grad, r.records[k - 1].cum_grad);
        }
        const auto& x = r.records[k];
        for (double v : {x.l2_pert, x.h1_pert, x.h2_pert, x.wgt, x.grad_diss, x.d3, x.pot, x.sup_fan, x.sup_pert}) {
            EXPECT_GE(v, 0.0);
        }
    }
    EXPECT_EQ(checkpoints, 2);
    EXPECT_EQ(r.final_state.time, 2.0);
    EXPECT_LE(r.max_mass_audit, 1e-12);
}

TEST(Run, DeterministicOutput)
{
    const auto cfg = small_config();
    const auto a = run(cfg, {0.1, 0.0});
    const auto b = run(cfg, {0.1, 0.0});
    EXPECT_EQ(csv_of(a.records), csv_of(b.records));
    EXPECT_EQ(a.final_state.rho, b.final_state.rho);
}

TEST(Run, RestartFromCheckpointIsBitIdentical)
{
    const auto cfg = small_config();
    const Schedule sched{0.1, 0.7};
    std::string saved;
    RunObserver obs;
    obs.on_checkpoint = [&](const FlowState& s) {
        if (saved.empty()) {
            std::ostringstream os;
            write_checkpoint(os, s);
            saved = os.str();
        }
    };
    const auto full = run(cfg, sched, obs);
    ASSERT_FALSE(saved.empty());

    std::istringstream in(saved);
    auto start = read_checkpoint(in);
    const double t0 = start.time;
    EXPECT_NEAR(t0, 0.7, 1e-12);
    std::optional<DiagnosticsRecord> seed;
    std::vector<DiagnosticsRecord> tail;
    for (const auto& r : full.records) {
        if (r.t == t0) seed = r;
        if (r.t >= t0) tail.push_back(r);
    }
    ASSERT_TRUE(seed.has_value());

    const auto resumed = run(cfg, sched, {}, std::move(start), seed);
    EXPECT_EQ(resumed.final_state.rho, full.final_state.rho);
    EXPECT_EQ(resumed.final_state.mx, full.final_state.mx);
    EXPECT_EQ(resumed.final_state.my, full.final_state.my);
    EXPECT_EQ(csv_of(resumed.records), csv_of(tail));
}

TEST(Run, RestartRejectsMismatchedGrid)
{
    auto cfg = small_config();
    FlowState other(Grid{16, 8, 10.0}, 0.0);
    EXPECT_THROW(run(cfg, {}, {}, other), ConfigError);
}

TEST(Run, NonFiniteStateStopsWithErrorAndKeepsRecords)
{
    auto cfg = small_config();
    auto s = initialize(cfg);
    s.my[cfg.grid().index(3, 3)] = std::numeric_limits<double>::quiet_NaN();
    const auto r = run(cfg, {0.1, 0.0}, {}, s);
    EXPECT_FALSE(r.ok);
    EXPECT_NE(r.error.find("cell (3, 3)"), std::string::npos);
    EXPECT_EQ(r.records.size(), 1u);
}

TEST(Initialize, CustomFilePerturbation)
{
    auto cfg = small_config();
    cfg.Nx = 4;
    cfg.Ny = 4;
    const auto path = std::filesystem::temp_directory_path() / "prw_custom_perturbation.txt";
    {
        std::ofstream out(path);
        for (int k = 0; k < 16; ++k) out << 0.1 * k << ' ' << -0.05 << ' ' << 0.02 << '\n';
    }
    cfg.perturbation = {PerturbationSpec::Shape::custom_file, 0.5, 1.0, 1, path.string()};
    const auto s = initialize(cfg);
    const auto bar = evaluate_wave(cfg.gas, cfg.wave, 0.0, cfg.grid().x(1));
    const auto k = cfg.grid().index(1, 2);
    EXPECT_NEAR(s.rho[k], bar.rho + 0.5 * 0.1 * 6, 1e-15);
    EXPECT_NEAR(s.u(k), bar.u - 0.025, 1e-15);
    EXPECT_NEAR(s.v(k), 0.01, 1e-15);

    {
        std::ofstream out(path);
        out << "1 2 3\n";
    }
    EXPECT_THROW(initialize(cfg), ConfigError);
    std::filesystem::remove(path);
    EXPECT_THROW(initialize(cfg), ConfigError);
}
