#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "chronos/model.hpp"

namespace chronos {

struct GenerationSpec {
    std::vector<Time> base_periods{3, 5, 7, 11};
    std::vector<Time> factors{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::size_t n_tasks = 100;
    Time period_factor = 1;
    std::uint64_t seed = 1;
    std::int64_t wcet = 0;
    std::int64_t releases = 5;
    bool harmonic = false;
};

inline void validate(const GenerationSpec& s) {
    if (s.base_periods.empty()) throw UsageError("generation needs at least one base period");
    if (s.factors.empty()) throw UsageError("generation needs at least one period factor value");
    if (s.n_tasks == 0) throw UsageError("generation needs at least one task");
    if (s.period_factor < 1) throw UsageError("period_factor must be >= 1");
    if (s.wcet < 0) throw UsageError("wcet must be >= 0");
    if (s.releases < 1) throw UsageError("releases must be >= 1");
    for (Time b : s.base_periods)
        if (b < 1) throw UsageError("base periods must be >= 1");
    for (Time r : s.factors) {
        if (r < 1) throw UsageError("factors must be >= 1");
        if (s.harmonic && (r & (r - 1)) != 0)
            throw UsageError("harmonic generation requires power-of-two factors, got " + std::to_string(r));
    }
}

namespace detail {

// Unbiased draw from [0, n). std::uniform_int_distribution is not pinned by
// the standard, so it would make generated sets differ between stdlibs.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t range = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return static_cast<std::size_t>(x % range);
}

}  // namespace detail

/// Task i gets period base * factor * period_factor where base and factor are
/// each drawn uniformly (base first, then factor) from a seeded mt19937_64.
inline TaskSet generate_task_set(const GenerationSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    std::vector<Task> tasks;
    tasks.reserve(spec.n_tasks);
    for (std::size_t i = 0; i < spec.n_tasks; ++i) {
        const Time b = spec.base_periods[detail::uniform_index(rng, spec.base_periods.size())];
        const Time r = spec.factors[detail::uniform_index(rng, spec.factors.size())];
        const Time period = b * r * spec.period_factor;
        tasks.push_back(Task{static_cast<TaskId>(i + 1), spec.wcet, period, period, spec.releases});
    }
    return TaskSet(std::move(tasks));
}

}  // namespace chronos
