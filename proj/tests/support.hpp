#pragma once

// Independent reference computations used by the tests. None of these call
// into the library algorithms they check.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "chronos/chronos.hpp"

namespace support {

using chronos::Rational;
using chronos::Task;
using chronos::TaskSet;
using chronos::Time;

inline TaskSet make_tasks(const std::vector<Time>& periods, std::int64_t wcet = 0,
                          std::int64_t releases = chronos::kUnlimitedReleases) {
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < periods.size(); ++i)
        tasks.push_back(Task{static_cast<int>(i + 1), wcet, periods[i], periods[i], releases});
    return TaskSet(std::move(tasks));
}

/// (time, task id) for every k*T_i in [1, horizon], by per-task enumeration.
inline std::vector<std::pair<Time, int>> oracle_releases(const std::vector<Time>& periods, Time horizon) {
    std::vector<std::pair<Time, int>> out;
    for (std::size_t i = 0; i < periods.size(); ++i)
        for (Time t = periods[i]; t <= horizon; t += periods[i]) out.push_back({t, static_cast<int>(i + 1)});
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<std::pair<Time, int>> as_pairs(const std::vector<chronos::ReleaseEvent>& rel) {
    std::vector<std::pair<Time, int>> out;
    for (const auto& r : rel) out.push_back({r.time, r.task});
    std::sort(out.begin(), out.end());
    return out;
}

/// Largest d with every value divisible by d, by trying every candidate.
inline Time brute_gcd(const std::vector<Time>& values) {
    const Time lo = *std::min_element(values.begin(), values.end());
    for (Time d = lo; d >= 1; --d)
        if (std::all_of(values.begin(), values.end(), [d](Time v) { return v % d == 0; })) return d;
    return 1;
}

inline Time lcm_of(const std::vector<Time>& values) {
    Time l = 1;
    for (Time v : values) l = std::lcm(l, v);
    return l;
}

/// Minimum of sum 1/gcd(block) over every labelling of the periods with at
/// most m labels (all m^n functions, not just canonical ones).
inline Rational brute_min_objective(const std::vector<Time>& periods, std::size_t m) {
    const std::size_t n = periods.size();
    std::vector<std::size_t> label(n, 0);
    Rational best{1'000'000};
    for (;;) {
        std::vector<Time> g(m, 0);
        for (std::size_t i = 0; i < n; ++i) g[label[i]] = std::gcd(g[label[i]], periods[i]);
        Rational sum{0};
        for (Time v : g)
            if (v != 0) sum += Rational(1, v);
        if (sum < best) best = sum;
        std::size_t k = 0;
        while (k < n && ++label[k] == m) label[k++] = 0;
        if (k == n) break;
    }
    return best;
}

/// Random distinct periods in [1, max_period].
inline std::vector<Time> random_periods(std::mt19937_64& rng, std::size_t n, Time max_period) {
    std::uniform_int_distribution<Time> dist(1, max_period);
    std::vector<Time> out;
    while (out.size() < n) {
        const Time v = dist(rng);
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Random task set where each timer drives one harmonic chain: timer j has
/// period b_j and its tasks have periods b_j * 2^k.
struct HarmonicInstance {
    TaskSet tasks;
    chronos::Mapping mapping;
};

inline HarmonicInstance random_harmonic(std::mt19937_64& rng, std::size_t n_tasks, std::size_t timers) {
    std::uniform_int_distribution<Time> base(1, 4);
    std::uniform_int_distribution<int> power(0, 2);
    std::uniform_int_distribution<std::size_t> pick(0, timers - 1);
    std::vector<Time> bases;
    for (std::size_t j = 0; j < timers; ++j) bases.push_back(base(rng));
    std::vector<Time> periods;
    std::vector<int> assignment;
    for (std::size_t i = 0; i < n_tasks; ++i) {
        const std::size_t j = pick(rng);
        periods.push_back(bases[j] << power(rng));
        assignment.push_back(static_cast<int>(j + 1));
    }
    std::vector<chronos::TimerConfig> cfg;
    for (std::size_t j = 0; j < timers; ++j) cfg.push_back({static_cast<int>(j + 1), bases[j]});
    return {make_tasks(periods), chronos::Mapping(cfg, assignment)};
}

/// Mapping with each task on a random timer whose period is a random divisor
/// shared by the timer's tasks (the timer's gcd or one of its divisors).
inline chronos::Mapping random_valid_mapping(std::mt19937_64& rng, const TaskSet& ts, std::size_t timers) {
    std::uniform_int_distribution<std::size_t> pick(0, timers - 1);
    std::vector<int> assignment;
    std::vector<Time> g(timers, 0);
    for (const auto& t : ts) {
        const std::size_t j = pick(rng);
        assignment.push_back(static_cast<int>(j + 1));
        g[j] = std::gcd(g[j], t.period);
    }
    std::vector<chronos::TimerConfig> cfg;
    for (std::size_t j = 0; j < timers; ++j) {
        std::vector<Time> divs;
        const Time v = g[j] == 0 ? 1 : g[j];
        for (Time d = 1; d <= v; ++d)
            if (v % d == 0) divs.push_back(d);
        cfg.push_back({static_cast<int>(j + 1), divs[std::uniform_int_distribution<std::size_t>(0, divs.size() - 1)(rng)]});
    }
    return chronos::Mapping(cfg, assignment);
}

}  // namespace support
