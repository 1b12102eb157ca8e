#pragma once

// Time integration to t_end with diagnostics and checkpoints on a fixed
// schedule. Event times are k * interval (never accumulated), so a restart
// from a checkpoint reproduces the uninterrupted run bit for bit.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prw/diagnostics.hpp"
#include "prw/solver.hpp"

namespace prw {

struct Schedule
{
    /// 0 disables the event (diagnostics are still taken at start and end).
    double diag_interval = 0.0;
    double checkpoint_interval = 0.0;
};

struct RunObserver
{
    std::function<void(const DiagnosticsRecord&)> on_record;
    std::function<void(const FlowState&)> on_checkpoint;
    std::function<void(const StepReport&, const FlowState&)> on_step;
};

struct RunResult
{
    FlowState final_state;
    std::vector<DiagnosticsRecord> records;
    bool ok = true;
    std::string error;
    std::size_t steps = 0;
    double max_mass_audit = 0.0;
};

namespace detail {

/// Events at most this far (relative) past the current time count as reached.
inline bool event_due(double event_time, double t) { return event_time <= t + 1e-12 * std::max(1.0, std::abs(t)); }

/// Smallest k whose event time k * interval is not yet due at t.
inline long long next_event_index(double t, double interval)
{
    auto k = static_cast<long long>(std::floor(t / interval));
    k = std::max(k - 1, 0LL);
    while (event_due(static_cast<double>(k) * interval, t)) ++k;
    return k;
}

} // namespace detail

/// Integrates from the initial data (or from `start`) to cfg.t_end. When
/// resuming, `last_record` seeds the running dissipation integrals.
inline RunResult run(const SolverConfig& cfg, const Schedule& schedule, const RunObserver& obs = {},
                     std::optional<FlowState> start = std::nullopt,
                     std::optional<DiagnosticsRecord> last_record = std::nullopt)
{
    NavierStokes2D solver(cfg);
    RunResult result;
    FlowState s = start ? std::move(*start) : initialize(cfg);
    if (!(s.grid == cfg.grid())) {
        throw ConfigError("restart state grid does not match the configuration");
    }

    DiagnosticsTracker tracker = last_record ? DiagnosticsTracker(*last_record) : DiagnosticsTracker();
    auto record = [&](const FlowState& st) {
        auto r = measure(st, cfg.gas, cfg.wave);
        if (tracker.last() && tracker.last()->t == r.t) {
            r.cum_wgt = tracker.last()->cum_wgt;
            r.cum_grad = tracker.last()->cum_grad;
        } else {
            r = tracker.add(r);
        }
        result.records.push_back(r);
        if (obs.on_record) obs.on_record(r);
    };

    record(s);

    const double t_end = cfg.t_end;
    const bool diag_on = schedule.diag_interval > 0.0;
    const bool ckpt_on = schedule.checkpoint_interval > 0.0;
    long long diag_k = diag_on ? detail::next_event_index(s.time, schedule.diag_interval) : 0;
    long long ckpt_k = ckpt_on ? detail::next_event_index(s.time, schedule.checkpoint_interval) : 0;

    try {
        while (s.time < t_end) {
            double target = t_end;
            if (diag_on) target = std::min(target, static_cast<double>(diag_k) * schedule.diag_interval);
            if (ckpt_on) target = std::min(target, static_cast<double>(ckpt_k) * schedule.checkpoint_interval);

            const auto rep = solver.step(s, target);
            ++result.steps;
            result.max_mass_audit = std::max(result.max_mass_audit, rep.mass_audit);
            if (obs.on_step) obs.on_step(rep, s);

            bool recorded = false;
            if (diag_on && detail::event_due(static_cast<double>(diag_k) * schedule.diag_interval, s.time)) {
                record(s);
                recorded = true;
                diag_k = detail::next_event_index(s.time, schedule.diag_interval);
            }
            if (ckpt_on && detail::event_due(static_cast<double>(ckpt_k) * schedule.checkpoint_interval, s.time)) {
                if (obs.on_checkpoint) obs.on_checkpoint(s);
                ckpt_k = detail::next_event_index(s.time, schedule.checkpoint_interval);
            }
            if (s.time >= t_end && !recorded) {
                record(s);
            }
        }
    } catch (const PositivityError& e) {
        result.ok = false;
        result.error = e.what();
    }
    result.final_state = std::move(s);
    return result;
}

} // namespace prw
