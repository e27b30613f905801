#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "chronos/model.hpp"
#include "chronos/rational.hpp"

namespace chronos {

/// Timer-partitioning problem over the distinct task periods. Tasks that share
/// a period always land on the same timer, so only distinct values matter.
struct OptimizationProblem {
    std::vector<Time> periods;  ///< distinct, ascending
    std::size_t timers = 1;
    std::size_t exact_bound = 20;  ///< largest distinct-period count solve_exact accepts

    static OptimizationProblem from_periods(std::vector<Time> periods, std::size_t timers) {
        for (Time p : periods)
            if (p < 1) throw UsageError("periods must be >= 1");
        std::sort(periods.begin(), periods.end());
        periods.erase(std::unique(periods.begin(), periods.end()), periods.end());
        OptimizationProblem pr;
        pr.periods = std::move(periods);
        pr.timers = timers;
        pr.validate();
        return pr;
    }

    static OptimizationProblem from_task_set(const TaskSet& ts, std::size_t timers) {
        return from_periods(ts.periods(), timers);
    }

    std::size_t size() const { return periods.size(); }
    Time max_period() const { return periods.back(); }

    void validate() const {
        if (periods.empty()) throw UsageError("optimization needs at least one period");
        if (timers < 1) throw UsageError("timer budget must be >= 1");
    }
};

struct TimerGroup {
    Time period = 1;             ///< gcd of the members
    std::vector<Time> periods;   ///< ascending
    std::vector<Time> divisors;  ///< period_i / timer period, one per member

    friend bool operator==(const TimerGroup&, const TimerGroup&) = default;
};

struct SolverStats {
    std::uint64_t nodes = 0;    ///< search states expanded
    std::uint64_t subsets = 0;  ///< candidate groups (or partitions) evaluated
};

enum class SolveMethod { Exact, BruteForce, Heuristic };

inline std::string to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::Exact: return "exact";
        case SolveMethod::BruteForce: return "brute-force";
        case SolveMethod::Heuristic: return "heuristic";
    }
    return "?";
}

struct OptimizationResult {
    /// Groups ordered by their smallest period; group k drives timer k+1.
    std::vector<TimerGroup> groups;
    /// For each distinct period (ascending), the index of its group. Because
    /// groups are numbered by first appearance this is a restricted growth string.
    std::vector<int> assignment;
    Rational objective{0};
    SolverStats stats;
    SolveMethod method = SolveMethod::Exact;
    bool limit_reached = false;  ///< heuristic stopped on its node budget

    std::size_t timers_used() const { return groups.size(); }
};

namespace detail {

inline std::vector<Time> divisors_descending(Time v) {
    std::vector<Time> lo, hi;
    for (Time d = 1; d * d <= v; ++d) {
        if (v % d != 0) continue;
        lo.push_back(d);
        if (d != v / d) hi.push_back(v / d);
    }
    std::vector<Time> out(hi.begin(), hi.end());
    out.insert(out.end(), lo.rbegin(), lo.rend());
    return out;
}

/// Builds the canonical result (groups by first element, gcd periods) from an
/// arbitrary block labelling of the ascending period list.
inline OptimizationResult result_from_labels(const std::vector<Time>& periods, const std::vector<int>& labels) {
    OptimizationResult r;
    std::vector<int> relabel;
    std::vector<int> seen_label;
    r.assignment.resize(periods.size());
    for (std::size_t i = 0; i < periods.size(); ++i) {
        auto it = std::find(seen_label.begin(), seen_label.end(), labels[i]);
        int g;
        if (it == seen_label.end()) {
            g = static_cast<int>(seen_label.size());
            seen_label.push_back(labels[i]);
            r.groups.emplace_back();
        } else {
            g = static_cast<int>(it - seen_label.begin());
        }
        r.assignment[i] = g;
        r.groups[static_cast<std::size_t>(g)].periods.push_back(periods[i]);
    }
    for (auto& grp : r.groups) {
        grp.period = gcd_of_periods(grp.periods);
        for (Time p : grp.periods) grp.divisors.push_back(p / grp.period);
        r.objective += Rational(1, grp.period);
    }
    return r;
}

/// (objective, timers used, assignment) lexicographic order shared by all solvers.
inline bool better(const OptimizationResult& a, const OptimizationResult& b) {
    if (a.objective != b.objective) return a.objective < b.objective;
    if (a.timers_used() != b.timers_used()) return a.timers_used() < b.timers_used();
    return a.assignment < b.assignment;
}

}  // namespace detail

/// Exhaustive reference: every set partition of the periods into at most m
/// blocks, enumerated as restricted growth strings.
inline OptimizationResult brute_force_reference(const OptimizationProblem& problem) {
    problem.validate();
    const std::size_t n = problem.size();
    if (n > 10) throw UsageError("brute force is limited to 10 distinct periods, got " + std::to_string(n));
    const int m = static_cast<int>(problem.timers);

    std::optional<OptimizationResult> best;
    std::uint64_t evaluated = 0;
    std::vector<int> rgs(n, 0);

    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int blocks) {
        if (i == n) {
            ++evaluated;
            auto cand = detail::result_from_labels(problem.periods, rgs);
            if (!best || detail::better(cand, *best)) best = std::move(cand);
            return;
        }
        for (int b = 0; b <= blocks && b < m; ++b) {
            rgs[i] = b;
            rec(i + 1, std::max(blocks, b + 1));
        }
    };
    rec(0, 0);

    best->method = SolveMethod::BruteForce;
    best->stats.subsets = evaluated;
    best->stats.nodes = evaluated;
    return *best;
}

/// Optimal partition by memoized search over (remaining periods, timers left).
///
/// The block containing the smallest remaining period is chosen first. Only
/// blocks of the form {remaining periods divisible by d}, d a divisor of that
/// smallest period, are tried: any optimal block B can be grown to
/// {x : gcd(B) | x} without raising the objective or the timer count, and the
/// grown block also wins the assignment-order tie-break. That keeps the search
/// exact (including ties) while visiting a small fraction of all subsets.
inline OptimizationResult solve_exact(const OptimizationProblem& problem) {
    problem.validate();
    const std::size_t n = problem.size();
    if (n > problem.exact_bound || n > 63)
        throw UsageError("exact solve is bounded to " + std::to_string(std::min<std::size_t>(problem.exact_bound, 63)) +
                         " distinct periods, got " + std::to_string(n) + "; use the heuristic");
    const auto& periods = problem.periods;

    struct Entry {
        bool feasible = false;
        Rational objective{0};
        std::size_t count = 0;
        std::uint64_t block = 0;
    };
    struct KeyHash {
        std::size_t operator()(const std::pair<std::uint64_t, std::size_t>& k) const {
            return std::hash<std::uint64_t>{}(k.first * 0x9E3779B97F4A7C15ULL ^ k.second);
        }
    };
    std::unordered_map<std::pair<std::uint64_t, std::size_t>, Entry, KeyHash> memo;
    std::vector<std::vector<Time>> divisors(n);
    for (std::size_t i = 0; i < n; ++i) divisors[i] = detail::divisors_descending(periods[i]);

    SolverStats stats;

    // Among equal objective and count, prefer the block that holds the
    // earliest period where the two candidates differ.
    auto block_preferred = [](std::uint64_t a, std::uint64_t b) {
        const std::uint64_t diff = a ^ b;
        return diff != 0 && (a & (diff & (~diff + 1))) != 0;
    };

    std::function<const Entry&(std::uint64_t, std::size_t)> best = [&](std::uint64_t mask,
                                                                      std::size_t left) -> const Entry& {
        const auto key = std::make_pair(mask, left);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        Entry e;
        if (mask == 0) {
            e.feasible = true;
        } else if (left > 0) {
            ++stats.nodes;
            const auto low = static_cast<std::size_t>(std::countr_zero(mask));
            std::vector<std::uint64_t> tried;
            for (Time d : divisors[low]) {
                std::uint64_t block = 0;
                for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
                    const auto i = static_cast<std::size_t>(std::countr_zero(rest));
                    if (periods[i] % d == 0) block |= std::uint64_t{1} << i;
                }
                if (std::find(tried.begin(), tried.end(), block) != tried.end()) continue;
                tried.push_back(block);
                ++stats.subsets;
                const Entry& sub = best(mask & ~block, left - 1);
                if (!sub.feasible) continue;
                Time g = 0;
                for (std::uint64_t rest = block; rest != 0; rest &= rest - 1)
                    g = std::gcd(g, periods[static_cast<std::size_t>(std::countr_zero(rest))]);
                const Rational obj = sub.objective + Rational(1, g);
                const std::size_t count = sub.count + 1;
                const bool take = !e.feasible || obj < e.objective ||
                                  (obj == e.objective &&
                                   (count < e.count || (count == e.count && block_preferred(block, e.block))));
                if (take) {
                    e.feasible = true;
                    e.objective = obj;
                    e.count = count;
                    e.block = block;
                }
            }
        }
        return memo.emplace(key, e).first->second;
    };

    const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    best(all, problem.timers);

    // Walk the chosen blocks back out of the memo.
    std::vector<int> labels(n, -1);
    std::uint64_t mask = all;
    std::size_t left = problem.timers;
    int label = 0;
    while (mask != 0) {
        const Entry& e = memo.at({mask, left});
        for (std::uint64_t rest = e.block; rest != 0; rest &= rest - 1)
            labels[static_cast<std::size_t>(std::countr_zero(rest))] = label;
        ++label;
        mask &= ~e.block;
        --left;
    }

    auto result = detail::result_from_labels(periods, labels);
    result.stats = stats;
    result.method = SolveMethod::Exact;
    return result;
}

/// Scalable fallback for period counts beyond the exact bound. Picks up to m
/// timer periods so that every task period is a multiple of one of them,
/// branching on divisors of the smallest uncovered period, largest first: the
/// first leaf reached is the greedy cover, and the remaining node budget is
/// spent on branch-and-bound improvement. The result is compared against the
/// single-group mapping and the better one is returned.
inline OptimizationResult greedy_heuristic(const OptimizationProblem& problem, std::uint64_t node_limit = 2'000'000) {
    problem.validate();
    const auto& periods = problem.periods;
    const std::size_t n = periods.size();

    std::vector<Time> chosen;
    std::vector<Time> best_cover;
    std::optional<Rational> best_cost;
    SolverStats stats;
    bool limit_reached = false;

    std::function<void(const std::vector<std::size_t>&, const Rational&)> search =
        [&](const std::vector<std::size_t>& uncovered, const Rational& cost) {
            if (uncovered.empty()) {
                ++stats.subsets;
                if (!best_cost || cost < *best_cost) {
                    best_cost = cost;
                    best_cover = chosen;
                }
                return;
            }
            if (chosen.size() == problem.timers) return;
            if (stats.nodes >= node_limit) {
                limit_reached = true;
                return;
            }
            ++stats.nodes;
            for (Time d : detail::divisors_descending(periods[uncovered.front()])) {
                const Rational next = cost + Rational(1, d);
                if (best_cost && next >= *best_cost) continue;
                std::vector<std::size_t> rest;
                for (std::size_t i : uncovered)
                    if (periods[i] % d != 0) rest.push_back(i);
                chosen.push_back(d);
                search(rest, next);
                chosen.pop_back();
                if (limit_reached && best_cost) return;
            }
        };

    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    search(all, Rational{0});

    std::vector<int> one_group(n, 0);
    auto result = detail::result_from_labels(periods, one_group);
    if (best_cost) {
        // Each period joins the largest chosen timer period dividing it.
        std::vector<int> labels(n, -1);
        for (std::size_t i = 0; i < n; ++i) {
            Time best_d = 0;
            for (std::size_t k = 0; k < best_cover.size(); ++k)
                if (periods[i] % best_cover[k] == 0 && best_cover[k] > best_d) {
                    best_d = best_cover[k];
                    labels[i] = static_cast<int>(k);
                }
        }
        auto cand = detail::result_from_labels(periods, labels);
        if (detail::better(cand, result)) result = std::move(cand);
    }
    result.stats = stats;
    result.method = SolveMethod::Heuristic;
    result.limit_reached = limit_reached;
    return result;
}

/// Exact when the problem is within its bound, heuristic otherwise.
inline OptimizationResult optimize(const OptimizationProblem& problem) {
    if (problem.size() <= problem.exact_bound && problem.size() <= 63) return solve_exact(problem);
    return greedy_heuristic(problem);
}

/// Turns a result over distinct periods into a task-level mapping. Timer k+1
/// runs group k.
inline Mapping to_mapping(const OptimizationResult& result, const TaskSet& ts) {
    std::vector<TimerConfig> timers;
    std::map<Time, TimerId> timer_of_period;
    for (std::size_t k = 0; k < result.groups.size(); ++k) {
        timers.push_back(TimerConfig{static_cast<TimerId>(k + 1), result.groups[k].period});
        for (Time p : result.groups[k].periods) timer_of_period[p] = static_cast<TimerId>(k + 1);
    }
    std::vector<TimerId> assignment;
    for (const auto& t : ts) {
        auto it = timer_of_period.find(t.period);
        if (it == timer_of_period.end())
            throw UsageError("task " + std::to_string(t.id) + " period " + std::to_string(t.period) +
                             " is not covered by the optimization result");
        assignment.push_back(it->second);
    }
    return Mapping(std::move(timers), std::move(assignment));
}

}  // namespace chronos
