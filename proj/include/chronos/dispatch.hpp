#pragma once

#include <algorithm>
#include <cstdint>
#include <list>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chronos/error.hpp"
#include "chronos/model.hpp"

namespace chronos {

enum class StrategyKind { Baseline, Chronos, ChronosConst, ChronosHarmonic };

inline std::string to_string(StrategyKind s) {
    switch (s) {
        case StrategyKind::Baseline: return "baseline";
        case StrategyKind::Chronos: return "chronos";
        case StrategyKind::ChronosConst: return "chronos-const";
        case StrategyKind::ChronosHarmonic: return "chronos-harmonic";
    }
    return "?";
}

inline StrategyKind parse_strategy(const std::string& s) {
    if (s == "baseline") return StrategyKind::Baseline;
    if (s == "chronos") return StrategyKind::Chronos;
    if (s == "chronos-const" || s == "const") return StrategyKind::ChronosConst;
    if (s == "chronos-harmonic" || s == "harmonic") return StrategyKind::ChronosHarmonic;
    throw UsageError("unknown strategy '" + s + "' (baseline, chronos, chronos-const, chronos-harmonic)");
}

/// Unit costs of the dispatcher primitives. Defaults are abstract operation
/// counts, not measured cycles.
struct CostWeights {
    std::int64_t tick_increment = 1;
    std::int64_t comparison = 1;
    std::int64_t list_remove = 2;
    std::int64_t sorted_insert_step = 1;
    std::int64_t list_append = 1;
    std::int64_t slot_write = 1;
    std::int64_t ready_insert = 1;
    std::int64_t inspection = 0;  ///< list node / slot visited; the comparisons carry the cost
    std::int64_t interrupt_entry_exit = 10;

    friend bool operator==(const CostWeights&, const CostWeights&) = default;
};

struct OpCostLedger {
    std::uint64_t tick_increments = 0;
    std::uint64_t comparisons = 0;
    std::uint64_t list_removes = 0;
    std::uint64_t sorted_insert_steps = 0;
    std::uint64_t list_appends = 0;
    std::uint64_t slot_writes = 0;
    std::uint64_t ready_inserts = 0;
    std::uint64_t inspections = 0;

    /// Weighted sum, excluding interrupt entry/exit (charged per interrupt by the caller).
    std::int64_t total(const CostWeights& w) const {
        return static_cast<std::int64_t>(tick_increments) * w.tick_increment +
               static_cast<std::int64_t>(comparisons) * w.comparison +
               static_cast<std::int64_t>(list_removes) * w.list_remove +
               static_cast<std::int64_t>(sorted_insert_steps) * w.sorted_insert_step +
               static_cast<std::int64_t>(list_appends) * w.list_append +
               static_cast<std::int64_t>(slot_writes) * w.slot_write +
               static_cast<std::int64_t>(ready_inserts) * w.ready_insert +
               static_cast<std::int64_t>(inspections) * w.inspection;
    }

    OpCostLedger& operator+=(const OpCostLedger& o) {
        tick_increments += o.tick_increments;
        comparisons += o.comparisons;
        list_removes += o.list_removes;
        sorted_insert_steps += o.sorted_insert_steps;
        list_appends += o.list_appends;
        slot_writes += o.slot_writes;
        ready_inserts += o.ready_inserts;
        inspections += o.inspections;
        return *this;
    }
    friend OpCostLedger operator-(OpCostLedger a, const OpCostLedger& b) {
        a.tick_increments -= b.tick_increments;
        a.comparisons -= b.comparisons;
        a.list_removes -= b.list_removes;
        a.sorted_insert_steps -= b.sorted_insert_steps;
        a.list_appends -= b.list_appends;
        a.slot_writes -= b.slot_writes;
        a.ready_inserts -= b.ready_inserts;
        a.inspections -= b.inspections;
        return a;
    }
    friend bool operator==(const OpCostLedger&, const OpCostLedger&) = default;
};

/// Global ready queue ordered by (priority, time enqueued, task index).
/// Lower priority value runs first.
class ReadyList {
public:
    struct Entry {
        Time priority;
        Time enqueued;
        std::size_t task;
        auto operator<=>(const Entry&) const = default;
    };

    void insert(std::size_t task, Time priority, Time when) {
        if (task >= where_.size()) where_.resize(task + 1);
        if (where_[task]) throw InvariantViolation("task already in ready list");
        where_[task] = Entry{priority, when, task};
        entries_.insert(*where_[task]);
    }
    void remove(std::size_t task) {
        if (task >= where_.size() || !where_[task]) throw InvariantViolation("task not in ready list");
        entries_.erase(*where_[task]);
        where_[task].reset();
    }
    /// Moves the task behind everything of its priority enqueued up to `when`.
    void requeue(std::size_t task, Time when) {
        const Entry e = *where_.at(task);
        remove(task);
        insert(task, e.priority, when);
    }
    bool contains(std::size_t task) const { return task < where_.size() && where_[task].has_value(); }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const Entry& top() const { return *entries_.begin(); }
    /// Another task of the same priority is queued besides `task`.
    bool has_peer(std::size_t task) const {
        const Entry& e = *where_.at(task);
        auto lo = entries_.lower_bound(Entry{e.priority, std::numeric_limits<Time>::min(), 0});
        auto hi = entries_.lower_bound(Entry{e.priority + 1, std::numeric_limits<Time>::min(), 0});
        return std::distance(lo, hi) > 1;
    }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::set<Entry> entries_;
    std::vector<std::optional<Entry>> where_;
};

struct DispatcherOptions {
    /// Harmonic timers may drive several independent chains (one slot array
    /// each); 1 means every group must itself be a single harmonic chain.
    std::size_t max_chains_per_timer = 1;
    /// Recheck every structural invariant after each operation.
    bool check_invariants = false;
};

/// An interrupt at which a harmonic slot was found empty: the task was due
/// but still held by the scheduler.
struct SkippedRelease {
    Time time;
    std::size_t task;
    friend bool operator==(const SkippedRelease&, const SkippedRelease&) = default;
};

/// Per-timer tick counters, delayed-task containers, cached next-release
/// values and the global ready list, plus the four tick routines that operate
/// on them. Tasks are addressed by their index in the task set.
///
/// All tasks start in the ready list (the synchronous release at time 0); the
/// scheduler hands each one back through delay_task() when its job is done.
class Dispatcher {
public:
    struct Chain {
        std::vector<Time> periods;                 ///< ascending
        std::vector<std::size_t> owner;            ///< task index per slot
        std::vector<std::optional<std::size_t>> slots;  ///< nullopt = released (NULL)
    };

    Dispatcher(const TaskSet& ts, const Mapping& mapping, StrategyKind strategy, DispatcherOptions options = {})
        : strategy_(strategy), options_(options) {
        const Mapping effective = strategy == StrategyKind::Baseline ? Mapping::single_timer(ts.size(), 1) : mapping;
        effective.validate_against(ts);
        tasks_.resize(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            tasks_[i].period = ts[i].period;
            tasks_[i].timer = static_cast<std::size_t>(effective.timer_of(i) - 1);
        }
        timers_.resize(effective.timers().size());
        for (std::size_t j = 0; j < timers_.size(); ++j) timers_[j].period = effective.timers()[j].period;
        if (strategy == StrategyKind::ChronosHarmonic) build_chains(ts, effective);
        for (std::size_t i = 0; i < tasks_.size(); ++i) ready_.insert(i, tasks_[i].period, 0);
    }

    StrategyKind strategy() const { return strategy_; }
    std::size_t timer_count() const { return timers_.size(); }
    std::size_t task_count() const { return tasks_.size(); }
    Time period(std::size_t j) const { return timers_.at(j).period; }
    Time tick_count(std::size_t j) const { return timers_.at(j).tick; }
    Time timer_next_release(std::size_t j) const { return timers_.at(j).next_release; }
    Time next_release(std::size_t task) const { return tasks_.at(task).next_release; }
    std::size_t timer_of(std::size_t task) const { return tasks_.at(task).timer; }
    bool delayed(std::size_t task) const { return tasks_.at(task).delayed; }

    ReadyList& ready() { return ready_; }
    const ReadyList& ready() const { return ready_; }
    const OpCostLedger& interrupt_ledger() const { return interrupt_ledger_; }
    const OpCostLedger& delay_ledger() const { return delay_ledger_; }
    const std::vector<SkippedRelease>& skipped() const { return skipped_; }
    const std::vector<Chain>& chains(std::size_t j) const { return timers_.at(j).chains; }

    /// Tasks currently waiting on timer j, in list order (slot order for harmonic).
    std::vector<std::size_t> timer_list(std::size_t j) const {
        const auto& t = timers_.at(j);
        if (strategy_ != StrategyKind::ChronosHarmonic) return {t.list.begin(), t.list.end()};
        std::vector<std::size_t> out;
        for (const auto& c : t.chains)
            for (const auto& s : c.slots)
                if (s) out.push_back(*s);
        return out;
    }

    /// Runs the routine of the configured strategy for timer j and returns the
    /// released task indices in release order.
    std::vector<std::size_t> tick(std::size_t j) {
        switch (strategy_) {
            case StrategyKind::Baseline: return tick_baseline();
            case StrategyKind::Chronos: return tick_chronos(j);
            case StrategyKind::ChronosConst: return tick_chronos_const(j);
            case StrategyKind::ChronosHarmonic: return tick_chronos_harmonic(j);
        }
        return {};
    }

    /// Sorted-list routine: early exit on the cached next release, otherwise
    /// pop due tasks off the head.
    std::vector<std::size_t> tick_chronos(std::size_t j) {
        auto& timer = timers_.at(j);
        auto& led = interrupt_ledger_;
        std::vector<std::size_t> released;
        timer.tick += timer.period;
        ++led.tick_increments;
        ++led.comparisons;
        if (timer.tick >= timer.next_release) {
            for (;;) {
                ++led.comparisons;
                if (timer.list.empty()) {
                    timer.next_release = kMaxTime;
                    break;
                }
                const std::size_t head = timer.list.front();
                ++led.inspections;
                ++led.comparisons;
                if (tasks_[head].next_release > timer.tick) {
                    timer.next_release = tasks_[head].next_release;
                    break;
                }
                timer.list.pop_front();
                ++led.list_removes;
                release(head, timer.tick, released);
            }
        }
        after_op();
        return released;
    }

    /// Single timer of period 1 holding every task in one sorted list.
    std::vector<std::size_t> tick_baseline() {
        if (timers_.size() != 1 || timers_[0].period != 1)
            throw InvariantViolation("baseline requires one timer of period 1");
        return tick_chronos(0);
    }

    /// Unsorted-list routine: when anything is due, walk the whole list,
    /// releasing due tasks and recomputing the minimum of the rest.
    std::vector<std::size_t> tick_chronos_const(std::size_t j) {
        auto& timer = timers_.at(j);
        auto& led = interrupt_ledger_;
        std::vector<std::size_t> released;
        timer.tick += timer.period;
        ++led.tick_increments;
        ++led.comparisons;
        if (timer.tick >= timer.next_release) {
            timer.next_release = kMaxTime;
            auto it = timer.list.begin();
            for (;;) {
                ++led.comparisons;
                if (it == timer.list.end()) break;
                const std::size_t task = *it;
                ++led.inspections;
                ++led.comparisons;
                if (tasks_[task].next_release > timer.tick) {
                    ++led.comparisons;
                    if (tasks_[task].next_release < timer.next_release) timer.next_release = tasks_[task].next_release;
                    ++it;
                } else {
                    auto successor = std::next(it);
                    timer.list.erase(it);
                    ++led.list_removes;
                    release(task, timer.tick, released);
                    it = successor;
                }
            }
        }
        after_op();
        return released;
    }

    /// Fixed-slot routine for harmonic groups: scan slots in period order
    /// until the tick is not a multiple of the slot's period. Empty slots are
    /// skipped and reported as skipped releases.
    std::vector<std::size_t> tick_chronos_harmonic(std::size_t j) {
        auto& timer = timers_.at(j);
        auto& led = interrupt_ledger_;
        std::vector<std::size_t> released;
        timer.tick += timer.period;
        ++led.tick_increments;
        for (auto& chain : timer.chains) {
            for (std::size_t i = 0;; ++i) {
                ++led.comparisons;
                if (i == chain.slots.size()) break;
                ++led.inspections;
                ++led.comparisons;
                if (timer.tick % chain.periods[i] != 0) break;
                ++led.comparisons;
                if (!chain.slots[i]) {
                    const std::size_t owner = chain.owner[i];
                    if (!tasks_[owner].retired) skipped_.push_back({timer.tick, owner});
                    continue;
                }
                const std::size_t task = *chain.slots[i];
                chain.slots[i].reset();
                ++led.slot_writes;
                tasks_[task].delayed = false;
                release(task, timer.tick, released);
            }
        }
        timer.next_release = min_pending(timer);
        after_op();
        return released;
    }

    /// Hands a task back to its timer. Its next release becomes the smallest
    /// multiple of its period strictly after `now`.
    void delay_task(std::size_t task, Time now) {
        auto& t = tasks_.at(task);
        if (t.delayed) throw InvariantViolation("task " + std::to_string(task + 1) + " is already delayed");
        if (t.retired) throw InvariantViolation("task " + std::to_string(task + 1) + " is retired");
        if (ready_.contains(task)) throw InvariantViolation("task " + std::to_string(task + 1) + " is still ready");
        t.next_release = (now / t.period + 1) * t.period;
        t.delayed = true;
        auto& timer = timers_[t.timer];
        auto& led = delay_ledger_;
        switch (strategy_) {
            case StrategyKind::Baseline:
            case StrategyKind::Chronos: {
                auto it = timer.list.begin();
                std::uint64_t steps = 1;
                while (it != timer.list.end() && tasks_[*it].next_release <= t.next_release) {
                    ++it;
                    ++steps;
                }
                timer.list.insert(it, task);
                led.sorted_insert_steps += steps;
                break;
            }
            case StrategyKind::ChronosConst:
                timer.list.push_back(task);
                ++led.list_appends;
                break;
            case StrategyKind::ChronosHarmonic: {
                auto& chain = timer.chains[t.chain];
                chain.slots[t.slot] = task;
                ++led.slot_writes;
                break;
            }
        }
        ++led.comparisons;
        if (t.next_release < timer.next_release) timer.next_release = t.next_release;
        after_op();
    }

    /// The task has finished its last job and never returns to a timer.
    void retire(std::size_t task) {
        auto& t = tasks_.at(task);
        if (t.delayed) throw InvariantViolation("cannot retire a delayed task");
        t.retired = true;
    }
    bool retired(std::size_t task) const { return tasks_.at(task).retired; }

    /// Throws InvariantViolation if any structural invariant is broken.
    void check_invariants() const {
        for (std::size_t j = 0; j < timers_.size(); ++j) {
            const auto& timer = timers_[j];
            if (timer.tick % timer.period != 0) throw InvariantViolation("tick not a multiple of the timer period");
            if (strategy_ == StrategyKind::Chronos || strategy_ == StrategyKind::Baseline) {
                Time prev = std::numeric_limits<Time>::min();
                for (std::size_t task : timer.list) {
                    if (tasks_[task].next_release < prev)
                        throw InvariantViolation("timer list " + std::to_string(j + 1) + " is not sorted");
                    prev = tasks_[task].next_release;
                }
            }
            if (strategy_ == StrategyKind::ChronosHarmonic) {
                for (const auto& c : timer.chains)
                    if (!std::is_sorted(c.periods.begin(), c.periods.end()))
                        throw InvariantViolation("harmonic slot periods not ascending");
            }
            if (timer.next_release != min_pending(timer))
                throw InvariantViolation("cached next release of timer " + std::to_string(j + 1) + " is stale");
        }
    }

private:
    struct TaskState {
        Time period = 1;
        Time next_release = 0;
        std::size_t timer = 0;
        std::size_t chain = 0;
        std::size_t slot = 0;
        bool delayed = false;
        bool retired = false;
    };
    struct TimerState {
        Time period = 1;
        Time tick = 0;
        Time next_release = kMaxTime;
        std::list<std::size_t> list;
        std::vector<Chain> chains;
    };

    void release(std::size_t task, Time now, std::vector<std::size_t>& out) {
        tasks_[task].delayed = false;
        ready_.insert(task, tasks_[task].period, now);
        ++interrupt_ledger_.ready_inserts;
        out.push_back(task);
    }

    Time min_pending(const TimerState& timer) const {
        Time m = kMaxTime;
        if (strategy_ == StrategyKind::ChronosHarmonic) {
            for (const auto& c : timer.chains)
                for (const auto& s : c.slots)
                    if (s) m = std::min(m, tasks_[*s].next_release);
        } else {
            for (std::size_t task : timer.list) m = std::min(m, tasks_[task].next_release);
        }
        return m;
    }

    void build_chains(const TaskSet& ts, const Mapping& mapping) {
        const auto groups = mapping.groups();
        for (std::size_t j = 0; j < groups.size(); ++j) {
            if (groups[j].empty()) continue;
            std::vector<Time> periods;
            for (std::size_t i : groups[j]) periods.push_back(ts[i].period);
            const auto chain_periods = harmonic_chains(periods);
            if (chain_periods.size() > options_.max_chains_per_timer) {
                std::string list;
                for (std::size_t i : groups[j]) list += (list.empty() ? "" : ",") + std::to_string(ts[i].period);
                throw ConfigError("timer " + std::to_string(j + 1) + " group {" + list + "} is not harmonic (" +
                                  std::to_string(chain_periods.size()) + " chains, at most " +
                                  std::to_string(options_.max_chains_per_timer) + " allowed)");
            }
            auto& timer = timers_[j];
            timer.chains.resize(chain_periods.size());
            // Tasks sorted by (period, id); each goes to the chain that holds its period.
            std::vector<std::size_t> order = groups[j];
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return ts[a].period < ts[b].period; });
            for (std::size_t task : order) {
                std::size_t c = 0;
                while (std::find(chain_periods[c].begin(), chain_periods[c].end(), ts[task].period) ==
                       chain_periods[c].end())
                    ++c;
                auto& chain = timer.chains[c];
                tasks_[task].chain = c;
                tasks_[task].slot = chain.slots.size();
                chain.periods.push_back(ts[task].period);
                chain.owner.push_back(task);
                chain.slots.emplace_back();
            }
        }
    }

    void after_op() const {
        if (options_.check_invariants) check_invariants();
    }

    StrategyKind strategy_;
    DispatcherOptions options_;
    std::vector<TaskState> tasks_;
    std::vector<TimerState> timers_;
    ReadyList ready_;
    OpCostLedger interrupt_ledger_;
    OpCostLedger delay_ledger_;
    std::vector<SkippedRelease> skipped_;
};

}  // namespace chronos
