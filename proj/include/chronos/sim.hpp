#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chronos/dispatch.hpp"
#include "chronos/model.hpp"

namespace chronos {

/// One simulation run.
///
/// Time advances on the integer grid. Within each time unit the CPU has
/// `work_units_per_time_unit` units of capacity; task WCETs are expressed in
/// the same work units, so with the default of 1 a WCET is simply a number of
/// time units. When `overhead_as_time` is set, every interrupt and delay-path
/// cost (in ledger units, one ledger unit = one work unit) is taken out of
/// that capacity before tasks get to run.
struct SimConfig {
    TaskSet tasks;
    Mapping mapping;  ///< ignored by the baseline, which always uses one timer of period 1
    StrategyKind strategy = StrategyKind::Chronos;
    CostWeights weights;
    std::int64_t work_units_per_time_unit = 1;
    bool overhead_as_time = false;
    bool time_slicing = true;
    std::optional<Time> horizon;  ///< nullopt: run until every task used up its releases
    std::size_t max_chains_per_timer = 1;
    bool record_trace = false;
    std::size_t trace_limit = 1'000'000;
    bool check_invariants = false;
};

enum class EventKind { Interrupt, Release, Complete, Miss, Retire, Skip };

inline std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::Interrupt: return "interrupt";
        case EventKind::Release: return "release";
        case EventKind::Complete: return "complete";
        case EventKind::Miss: return "miss";
        case EventKind::Retire: return "retire";
        case EventKind::Skip: return "skip";
    }
    return "?";
}

struct TraceEvent {
    Time time;
    EventKind kind;
    TimerId timer;  ///< 0 when not tied to a timer
    TaskId task;    ///< 0 when not tied to a task
    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct ReleaseEvent {
    Time time;
    TaskId task;
    auto operator<=>(const ReleaseEvent&) const = default;
};

struct DeadlineMiss {
    TaskId task;
    Time release;
    Time deadline;
    auto operator<=>(const DeadlineMiss&) const = default;
};

struct SimMetrics {
    StrategyKind strategy = StrategyKind::Baseline;
    std::vector<std::uint64_t> interrupts_per_timer;
    std::uint64_t total_interrupts = 0;
    std::uint64_t required_interrupts = 0;
    std::uint64_t not_required_interrupts = 0;
    std::vector<Time> not_required_times;
    std::int64_t interrupt_cost = 0;  ///< entry/exit plus routine work, ledger units
    std::int64_t delay_cost = 0;
    OpCostLedger interrupt_ledger;
    OpCostLedger delay_ledger;
    Time total_time = 0;  ///< time units simulated
    std::int64_t busy_work = 0;
    std::int64_t idle_work = 0;
    std::int64_t overhead_work = 0;  ///< capacity consumed by overhead (overhead_as_time only)
    std::int64_t total_work = 0;
    std::uint64_t jobs_released = 0;
    std::uint64_t jobs_completed = 0;
    std::vector<DeadlineMiss> misses;
    std::vector<ReleaseEvent> releases;  ///< dispatched releases (t >= 1), sorted by (time, task)
    std::vector<SkippedRelease> skipped;
    std::vector<TraceEvent> trace;
    bool trace_truncated = false;

    std::int64_t overhead_cost() const { return interrupt_cost + delay_cost; }
    double overhead_fraction() const {
        return total_work == 0 ? 0.0 : static_cast<double>(overhead_cost()) / static_cast<double>(total_work);
    }
    bool schedulable() const { return misses.empty(); }
};

namespace detail {

struct JobState {
    bool active = false;
    std::int64_t remaining = 0;
    Time release = 0;
    Time deadline = 0;
    std::int64_t released_jobs = 0;
};

}  // namespace detail

inline SimMetrics run(const SimConfig& config) {
    const TaskSet& ts = config.tasks;
    if (ts.empty()) throw UsageError("simulation needs at least one task");
    if (config.work_units_per_time_unit < 1) throw UsageError("work_units_per_time_unit must be >= 1");
    if (config.horizon && *config.horizon < 1) throw UsageError("horizon must be >= 1");
    (void)ts.hyperperiod();  // throws ConfigError on overflow
    if (!config.horizon)
        for (const auto& task : ts)
            if (task.releases_limit == kUnlimitedReleases)
                throw UsageError("task " + std::to_string(task.id) + " has unlimited releases; set a horizon");

    Dispatcher disp(ts, config.mapping, config.strategy,
                    DispatcherOptions{config.max_chains_per_timer, config.check_invariants});

    SimMetrics m;
    m.strategy = config.strategy;
    m.interrupts_per_timer.assign(disp.timer_count(), 0);
    // A timer without tasks is never started.
    std::vector<bool> timer_on(disp.timer_count(), true);
    if (config.strategy != StrategyKind::Baseline)
        for (std::size_t j = 0; j < timer_on.size(); ++j) timer_on[j] = config.mapping.timer_used(static_cast<TimerId>(j + 1));
    const std::int64_t capacity = config.work_units_per_time_unit;
    const auto& w = config.weights;

    auto trace = [&](Time t, EventKind k, TimerId timer, TaskId task) {
        if (!config.record_trace) return;
        if (m.trace.size() >= config.trace_limit) {
            m.trace_truncated = true;
            return;
        }
        m.trace.push_back({t, k, timer, task});
    };

    std::vector<detail::JobState> jobs(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        jobs[i] = {true, ts[i].wcet, 0, ts[i].deadline, 1};
        ++m.jobs_released;
    }
    std::size_t retired = 0;
    std::int64_t debt = 0;
    std::int64_t budget = 0;

    auto charge = [&](std::int64_t cost) {
        if (!config.overhead_as_time) return;
        debt += cost;
        const std::int64_t pay = std::min(debt, budget);
        debt -= pay;
        budget -= pay;
        m.overhead_work += pay;
    };

    // Job finished or abandoned: hand the task back to its timer, or retire it.
    auto finish = [&](std::size_t i, Time now, Time event_time) {
        jobs[i].active = false;
        if (jobs[i].released_jobs >= ts[i].releases_limit) {
            disp.retire(i);
            ++retired;
            trace(event_time, EventKind::Retire, 0, ts[i].id);
            return;
        }
        const OpCostLedger before = disp.delay_ledger();
        disp.delay_task(i, now);
        const std::int64_t cost = (disp.delay_ledger() - before).total(w);
        m.delay_cost += cost;
        charge(cost);
    };

    std::size_t skipped_seen = 0;
    Time t = 0;
    for (;;) {
        if (t > 0) {
            if (!config.horizon && retired == ts.size()) break;

            // A job still pending at its absolute deadline is a miss and is dropped.
            for (std::size_t i = 0; i < ts.size(); ++i) {
                if (!jobs[i].active || jobs[i].deadline > t) continue;
                m.misses.push_back({ts[i].id, jobs[i].release, jobs[i].deadline});
                trace(t, EventKind::Miss, 0, ts[i].id);
                disp.ready().remove(i);
                finish(i, t - 1, t);
            }

            for (std::size_t j = 0; j < disp.timer_count(); ++j) {
                if (!timer_on[j] || t % disp.period(j) != 0) continue;
                const auto timer_id = static_cast<TimerId>(j + 1);
                ++m.interrupts_per_timer[j];
                ++m.total_interrupts;
                trace(t, EventKind::Interrupt, timer_id, 0);
                const OpCostLedger before = disp.interrupt_ledger();
                const auto released = disp.tick(j);
                const std::int64_t cost = w.interrupt_entry_exit + (disp.interrupt_ledger() - before).total(w);
                m.interrupt_cost += cost;
                if (released.empty()) {
                    ++m.not_required_interrupts;
                    m.not_required_times.push_back(t);
                } else {
                    ++m.required_interrupts;
                }
                for (std::size_t i : released) {
                    jobs[i] = {true, ts[i].wcet, t, t + ts[i].deadline, jobs[i].released_jobs + 1};
                    ++m.jobs_released;
                    m.releases.push_back({t, ts[i].id});
                    trace(t, EventKind::Release, timer_id, ts[i].id);
                }
                for (; skipped_seen < disp.skipped().size(); ++skipped_seen)
                    trace(t, EventKind::Skip, timer_id, ts[disp.skipped()[skipped_seen].task].id);
                if (config.overhead_as_time) debt += cost;
            }
            if (config.horizon && t >= *config.horizon) break;
        }

        // Execute [t, t+1): overhead first, then the highest-priority ready jobs.
        budget = capacity;
        charge(0);
        constexpr std::size_t none = static_cast<std::size_t>(-1);
        std::size_t last_ran = none;
        while (!disp.ready().empty()) {
            const std::size_t i = disp.ready().top().task;
            if (jobs[i].remaining > 0) {
                if (budget == 0) break;
                const std::int64_t slice = std::min(jobs[i].remaining, budget);
                jobs[i].remaining -= slice;
                budget -= slice;
                m.busy_work += slice;
                last_ran = i;
                if (jobs[i].remaining > 0) break;
            }
            disp.ready().remove(i);
            ++m.jobs_completed;
            trace(t, EventKind::Complete, 0, ts[i].id);
            if (last_ran == i) last_ran = none;
            finish(i, t, t);
        }
        m.idle_work += budget;
        budget = 0;
        if (config.time_slicing && last_ran != none && disp.ready().contains(last_ran) && disp.ready().has_peer(last_ran))
            disp.ready().requeue(last_ran, t + 1);
        ++t;
    }

    m.total_time = t;
    m.overhead_work += debt;  // overhead still owed when the run stops
    m.total_work = m.busy_work + m.idle_work + m.overhead_work;
    m.interrupt_ledger = disp.interrupt_ledger();
    m.delay_ledger = disp.delay_ledger();
    m.skipped = disp.skipped();
    std::sort(m.releases.begin(), m.releases.end());
    return m;
}

}  // namespace chronos
