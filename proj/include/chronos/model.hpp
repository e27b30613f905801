#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "chronos/error.hpp"
#include "chronos/rational.hpp"

namespace chronos {

/// Integer time on the common grid every timer shares (one unit = one base tick).
using Time = std::int64_t;

inline constexpr Time kMaxTime = std::numeric_limits<Time>::max();
inline constexpr std::int64_t kUnlimitedReleases = std::numeric_limits<std::int64_t>::max();

using TaskId = int;
using TimerId = int;

struct Task {
    TaskId id = 0;
    std::int64_t wcet = 0;  ///< work per job, in simulator work units
    Time period = 1;
    Time deadline = 1;  ///< relative; defaults to the period
    std::int64_t releases_limit = 5;

    friend bool operator==(const Task&, const Task&) = default;
};

inline void validate(const Task& t) {
    const std::string who = "task " + std::to_string(t.id);
    if (t.period < 1) throw UsageError(who + ": period must be >= 1");
    if (t.wcet < 0) throw UsageError(who + ": wcet must be >= 0");
    if (t.deadline < 1 || t.deadline > t.period) throw UsageError(who + ": deadline must be in [1, period]");
    if (t.releases_limit < 1) throw UsageError(who + ": releases must be >= 1");
}

/// lcm that refuses to wrap.
inline Time checked_lcm(Time a, Time b) {
    const Time g = std::gcd(a, b);
    const __int128 l = static_cast<__int128>(a / g) * b;
    if (l > kMaxTime) throw ConfigError("hyperperiod overflows 64-bit time");
    return static_cast<Time>(l);
}

class TaskSet {
public:
    TaskSet() = default;
    explicit TaskSet(std::vector<Task> tasks) : tasks_(std::move(tasks)) { validate(); }

    const std::vector<Task>& tasks() const { return tasks_; }
    std::size_t size() const { return tasks_.size(); }
    bool empty() const { return tasks_.empty(); }
    const Task& operator[](std::size_t i) const { return tasks_[i]; }

    auto begin() const { return tasks_.begin(); }
    auto end() const { return tasks_.end(); }

    /// Position of the task with this id. Ids are dense 1..n so this is id - 1.
    std::size_t index_of(TaskId id) const {
        if (id < 1 || static_cast<std::size_t>(id) > tasks_.size())
            throw UsageError("unknown task id " + std::to_string(id));
        return static_cast<std::size_t>(id - 1);
    }

    std::vector<Time> periods() const {
        std::vector<Time> out;
        out.reserve(tasks_.size());
        for (const auto& t : tasks_) out.push_back(t.period);
        return out;
    }

    std::vector<Time> distinct_periods() const {
        auto p = periods();
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        return p;
    }

    Time hyperperiod() const {
        Time h = 1;
        for (const auto& t : tasks_) h = checked_lcm(h, t.period);
        return h;
    }

    /// Same tasks with every period and deadline multiplied by `factor`.
    TaskSet scaled(Time factor) const {
        if (factor < 1) throw UsageError("period factor must be >= 1");
        auto copy = tasks_;
        for (auto& t : copy) {
            t.period *= factor;
            t.deadline *= factor;
        }
        return TaskSet(std::move(copy));
    }

    friend bool operator==(const TaskSet&, const TaskSet&) = default;

private:
    void validate() const {
        for (std::size_t i = 0; i < tasks_.size(); ++i) {
            chronos::validate(tasks_[i]);
            if (tasks_[i].id != static_cast<TaskId>(i + 1))
                throw UsageError("task ids must be dense 1..n in order; position " + std::to_string(i + 1) +
                                 " has id " + std::to_string(tasks_[i].id));
        }
    }

    std::vector<Task> tasks_;
};

struct TimerConfig {
    TimerId id = 1;
    Time period = 1;

    friend bool operator==(const TimerConfig&, const TimerConfig&) = default;
};

/// Task-to-timer assignment. `assignment[i]` is the timer id of task i+1.
class Mapping {
public:
    Mapping() = default;
    Mapping(std::vector<TimerConfig> timers, std::vector<TimerId> assignment)
        : timers_(std::move(timers)), assignment_(std::move(assignment)) {
        for (std::size_t j = 0; j < timers_.size(); ++j) {
            if (timers_[j].period < 1) throw UsageError("timer period must be >= 1");
            if (timers_[j].id != static_cast<TimerId>(j + 1)) throw UsageError("timer ids must be dense 1..m");
        }
        for (TimerId t : assignment_)
            if (t < 1 || static_cast<std::size_t>(t) > timers_.size())
                throw UsageError("task assigned to unknown timer " + std::to_string(t));
    }

    /// Every task on one timer with the given period.
    static Mapping single_timer(std::size_t n_tasks, Time period) {
        return Mapping({TimerConfig{1, period}}, std::vector<TimerId>(n_tasks, 1));
    }

    const std::vector<TimerConfig>& timers() const { return timers_; }
    const std::vector<TimerId>& assignment() const { return assignment_; }
    TimerId timer_of(std::size_t task_index) const { return assignment_.at(task_index); }
    const TimerConfig& timer(TimerId id) const { return timers_.at(static_cast<std::size_t>(id - 1)); }

    /// Task indices per timer (index j holds timer j+1), in task order.
    std::vector<std::vector<std::size_t>> groups() const {
        std::vector<std::vector<std::size_t>> g(timers_.size());
        for (std::size_t i = 0; i < assignment_.size(); ++i) g[static_cast<std::size_t>(assignment_[i] - 1)].push_back(i);
        return g;
    }

    bool timer_used(TimerId id) const {
        return std::find(assignment_.begin(), assignment_.end(), id) != assignment_.end();
    }

    /// Throws UsageError unless every task has a timer whose period divides its own.
    void validate_against(const TaskSet& ts) const {
        if (assignment_.size() != ts.size())
            throw UsageError("mapping covers " + std::to_string(assignment_.size()) + " tasks, task set has " +
                             std::to_string(ts.size()));
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const Time p = timer(assignment_[i]).period;
            if (ts[i].period % p != 0)
                throw UsageError("timer " + std::to_string(assignment_[i]) + " period " + std::to_string(p) +
                                 " does not divide period " + std::to_string(ts[i].period) + " of task " +
                                 std::to_string(ts[i].id));
        }
    }

    Mapping scaled(Time factor) const {
        auto t = timers_;
        for (auto& c : t) c.period *= factor;
        return Mapping(std::move(t), assignment_);
    }

    friend bool operator==(const Mapping&, const Mapping&) = default;

private:
    std::vector<TimerConfig> timers_;
    std::vector<TimerId> assignment_;
};

inline Time gcd_of_periods(std::span<const Time> periods) {
    if (periods.empty()) throw UsageError("gcd of an empty period set");
    Time g = 0;
    for (Time p : periods) {
        if (p < 1) throw UsageError("periods must be >= 1");
        g = std::gcd(g, p);
    }
    return g;
}

inline Time gcd_of_periods(std::initializer_list<Time> periods) {
    return gcd_of_periods(std::span<const Time>(periods.begin(), periods.size()));
}

/// Sum of 1/P over timers that carry at least one task: interrupts per time unit.
inline Rational expected_interrupt_rate(const Mapping& mapping) {
    Rational rate{0};
    for (const auto& t : mapping.timers())
        if (mapping.timer_used(t.id)) rate += Rational(1, t.period);
    return rate;
}

/// Every t in [1, horizon] at which some task releases a job (tasks start at 0).
inline std::vector<Time> required_ticks(const TaskSet& ts, Time horizon) {
    if (horizon < 1) throw UsageError("horizon must be >= 1");
    std::vector<Time> out;
    for (Time t = 1; t <= horizon; ++t) {
        for (const auto& task : ts)
            if (t % task.period == 0) {
                out.push_back(t);
                break;
            }
    }
    return out;
}

/// True iff the sorted periods each divide their successor.
inline bool is_harmonic_chain(std::span<const Time> periods) {
    if (periods.empty()) throw UsageError("harmonic check on an empty period set");
    std::vector<Time> sorted(periods.begin(), periods.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] % sorted[i - 1] != 0) return false;
    return true;
}

inline bool is_harmonic_chain(std::initializer_list<Time> periods) {
    return is_harmonic_chain(std::span<const Time>(periods.begin(), periods.size()));
}

/// Splits periods into harmonic chains: ascending first-fit onto the first
/// chain whose largest element divides the value.
inline std::vector<std::vector<Time>> harmonic_chains(std::span<const Time> periods) {
    std::vector<Time> sorted(periods.begin(), periods.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::vector<Time>> chains;
    for (Time p : sorted) {
        auto it = std::find_if(chains.begin(), chains.end(), [p](const auto& c) { return p % c.back() == 0; });
        if (it == chains.end())
            chains.push_back({p});
        else
            it->push_back(p);
    }
    return chains;
}

}  // namespace chronos
