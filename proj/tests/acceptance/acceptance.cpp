// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace chronos;
using support::make_tasks;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            if (!pass) detail << "; ";
            pass = false;
            detail << what;
        }
    }
};

// 1. Figures 1 and 2.
Outcome figures() {
    Outcome o;
    const auto t0 = Clock::now();
    SimConfig c;
    c.tasks = make_tasks({2, 5});
    c.mapping = Mapping({{1, 2}, {2, 5}}, {1, 2});
    c.horizon = 10;
    c.record_trace = true;
    c.check_invariants = true;

    c.strategy = StrategyKind::Baseline;
    const auto base = run(c);
    o.require(base.total_interrupts == 10, "baseline interrupts " + std::to_string(base.total_interrupts));
    o.require(base.not_required_times == std::vector<Time>{1, 3, 7, 9}, "baseline not-required ticks differ");

    c.strategy = StrategyKind::Chronos;
    const auto two = run(c);
    o.require(two.total_interrupts == 7, "two-timer interrupts " + std::to_string(two.total_interrupts));
    o.require(two.not_required_interrupts == 0, "two-timer has not-required ticks");
    std::vector<Time> times;
    for (const auto& r : two.releases)
        if (times.empty() || times.back() != r.time) times.push_back(r.time);
    o.require(times == std::vector<Time>{2, 4, 5, 6, 8, 10}, "release times differ");
    int at_ten = 0;
    for (const auto& e : two.trace) at_ten += e.kind == EventKind::Interrupt && e.time == 10;
    o.require(at_ten == 2, "interrupts at t=10: " + std::to_string(at_ten));
    const double secs = seconds_since(t0);
    o.require(secs < 1.0, "runtime " + std::to_string(secs) + " s");
    o.detail << (o.pass ? "baseline 10 interrupts, not-required {1,3,7,9}; two timers 7 interrupts, double at t=10" : "");
    return o;
}

// 2. Counterexample {2,3,5}, m=3.
Outcome counterexample() {
    Outcome o;
    const auto r = solve_exact(OptimizationProblem::from_periods({2, 3, 5}, 3));
    const Rational three = Rational(1, 2) + Rational(1, 3) + Rational(1, 5);
    o.require(r.timers_used() == 1 && r.groups[0].period == 1, "expected one timer with P=1");
    o.require(r.objective == Rational(1), "objective " + r.objective.str());
    o.require(r.objective < three, "not better than " + three.str());
    if (o.pass) o.detail << "one timer P=1, objective " << r.objective << " < " << three;
    return o;
}

// 3. solve_exact against brute force.
Outcome optimality() {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(3);
    int instances = 0;
    for (; instances < 300; ++instances) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const auto p = OptimizationProblem::from_periods(support::random_periods(rng, n, 30), m);
        const auto exact = solve_exact(p).objective;
        const auto brute = brute_force_reference(p).objective;
        const auto oracle = support::brute_min_objective(p.periods, m);
        if (exact != brute || exact != oracle) {
            o.require(false, "instance " + std::to_string(instances) + ": exact " + exact.str() + ", brute " +
                                 brute.str() + ", enumeration " + oracle.str());
            break;
        }
    }
    const double secs = seconds_since(t0);
    o.require(secs < 60.0, "runtime " + std::to_string(secs) + " s");
    if (o.pass) o.detail << instances << " instances equal, " << secs << " s";
    return o;
}

// 4. Release traces against the oracle.
Outcome release_oracle() {
    Outcome o;
    std::mt19937_64 rng(4);
    int general = 0, harmonic = 0;
    for (; general < 150 && o.pass; ++general) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        std::vector<Time> periods(n);
        for (auto& p : periods) p = std::uniform_int_distribution<Time>(1, 12)(rng);
        SimConfig c;
        c.tasks = make_tasks(periods);
        c.mapping = support::random_valid_mapping(rng, c.tasks, std::uniform_int_distribution<std::size_t>(1, 3)(rng));
        c.horizon = c.tasks.hyperperiod();
        const auto expected = support::oracle_releases(periods, *c.horizon);
        for (StrategyKind s : {StrategyKind::Baseline, StrategyKind::Chronos, StrategyKind::ChronosConst}) {
            c.strategy = s;
            o.require(support::as_pairs(run(c).releases) == expected,
                      to_string(s) + " differs on instance " + std::to_string(general));
        }
    }
    for (; harmonic < 150 && o.pass; ++harmonic) {
        const auto inst = support::random_harmonic(rng, std::uniform_int_distribution<std::size_t>(1, 6)(rng), 3);
        SimConfig c;
        c.tasks = inst.tasks;
        c.mapping = inst.mapping;
        c.horizon = c.tasks.hyperperiod();
        const auto expected = support::oracle_releases(c.tasks.periods(), *c.horizon);
        std::vector<std::vector<std::pair<Time, int>>> traces;
        for (StrategyKind s : {StrategyKind::Baseline, StrategyKind::Chronos, StrategyKind::ChronosConst,
                               StrategyKind::ChronosHarmonic}) {
            c.strategy = s;
            traces.push_back(support::as_pairs(run(c).releases));
            o.require(traces.back() == expected, to_string(s) + " differs on harmonic instance " + std::to_string(harmonic));
        }
        o.require(traces[1] == traces[2] && traces[2] == traces[3], "multi-timer traces differ");
    }
    if (o.pass) o.detail << general << " general + " << harmonic << " harmonic instances match";
    return o;
}

// 5. Interrupt count over one hyperperiod.
Outcome rate_formula() {
    Outcome o;
    std::mt19937_64 rng(5);
    int instances = 0;
    for (; instances < 200 && o.pass; ++instances) {
        std::vector<Time> periods(std::uniform_int_distribution<std::size_t>(1, 6)(rng));
        for (auto& p : periods) p = std::uniform_int_distribution<Time>(1, 20)(rng);
        SimConfig c;
        c.tasks = make_tasks(periods);
        c.mapping = support::random_valid_mapping(rng, c.tasks, std::uniform_int_distribution<std::size_t>(1, 4)(rng));
        const Time h = c.tasks.hyperperiod();
        c.horizon = h;
        std::uint64_t formula = 0;
        for (const auto& t : c.mapping.timers())
            if (c.mapping.timer_used(t.id)) formula += static_cast<std::uint64_t>(h / t.period);
        const Rational rate_count = Rational(h) * expected_interrupt_rate(c.mapping);
        for (StrategyKind s : {StrategyKind::Chronos, StrategyKind::ChronosConst}) {
            c.strategy = s;
            const auto m = run(c);
            o.require(m.total_interrupts == formula && Rational(static_cast<std::int64_t>(formula)) == rate_count,
                      "instance " + std::to_string(instances) + ": simulated " + std::to_string(m.total_interrupts) +
                          ", formula " + std::to_string(formula) + ", H*rate " + rate_count.str());
        }
    }
    if (o.pass) o.detail << instances << " mappings: count = sum floor(H/P_j) = H*rate";
    return o;
}

// 6. Cost contracts.
Outcome cost_contracts() {
    Outcome o;
    auto finish = [](Dispatcher& d, std::size_t task, Time now) {
        d.ready().remove(task);
        d.delay_task(task, now);
    };
    std::vector<std::int64_t> const_costs;
    for (std::size_t len : {1u, 10u, 100u}) {
        const auto ts = make_tasks(std::vector<Time>(len + 1, 500));
        Dispatcher d(ts, Mapping::single_timer(len + 1, 1), StrategyKind::ChronosConst);
        for (std::size_t i = 0; i < len; ++i) finish(d, i, 0);
        const auto before = d.delay_ledger();
        finish(d, len, 0);
        const_costs.push_back((d.delay_ledger() - before).total(CostWeights{}));
    }
    o.require(const_costs[0] == const_costs[1] && const_costs[1] == const_costs[2], "const delay cost varies with length");

    std::mt19937_64 rng(6);
    std::uint64_t worst = 0;
    bool slots_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = support::random_harmonic(rng, 10, 3);
        Dispatcher d(inst.tasks, inst.mapping, StrategyKind::ChronosHarmonic);
        const auto groups = inst.mapping.groups();
        for (std::size_t i = 0; i < inst.tasks.size(); ++i) finish(d, i, 0);
        for (int step = 0; step < 50; ++step)
            for (std::size_t j = 0; j < d.timer_count(); ++j) {
                const auto before = d.interrupt_ledger();
                const auto rel = d.tick(j);
                const auto seen = (d.interrupt_ledger() - before).inspections;
                worst = std::max(worst, seen);
                slots_ok = slots_ok && seen <= groups[j].size();
                for (std::size_t t : rel) finish(d, t, d.tick_count(j));
            }
    }
    o.require(slots_ok, "harmonic tick inspected more slots than its group holds");

    std::vector<Time> periods;
    for (int i = 0; i < 50; ++i) periods.push_back(std::uniform_int_distribution<Time>(1, 10)(rng) * 4);
    const auto ts = make_tasks(periods);
    std::vector<int> assign;
    for (std::size_t i = 0; i < periods.size(); ++i) assign.push_back(static_cast<int>(i % 2 + 1));
    Dispatcher d(ts, Mapping({{1, 2}, {2, 4}}, assign), StrategyKind::Chronos);
    std::size_t ops = 0;
    bool sorted = true;
    for (; ops < 20'000 && sorted; ++ops) {
        std::vector<std::size_t> ready;
        for (std::size_t i = 0; i < ts.size(); ++i)
            if (d.ready().contains(i)) ready.push_back(i);
        if (!ready.empty() && rng() % 2 == 0) {
            const std::size_t t = ready[rng() % ready.size()];
            finish(d, t, d.tick_count(d.timer_of(t)));
        } else {
            d.tick(rng() % 2);
        }
        for (std::size_t j = 0; j < 2; ++j) {
            const auto list = d.timer_list(j);
            for (std::size_t k = 1; k < list.size(); ++k) sorted = sorted && d.next_release(list[k - 1]) <= d.next_release(list[k]);
        }
    }
    o.require(sorted, "sorted order broken after " + std::to_string(ops) + " operations");
    if (o.pass)
        o.detail << "const delay cost " << const_costs[0] << " at lengths 1/10/100; harmonic max " << worst
                 << " slots per tick within group size; sorted after " << ops << " random ops";
    return o;
}

// 7. Overhead ordering on the low preset; the harmonic leg runs on harmonic-low.
Outcome overhead_trend() {
    Outcome o;
    auto sweep_of = [](const std::string& name, std::vector<StrategyKind> strategies) {
        const Scenario s = preset(name);
        const TaskSet ts = scenario_tasks(s);
        auto cfg = scenario_sweep_config(s, ts, scenario_mapping(s, ts));
        cfg.strategies = std::move(strategies);
        return period_factor_sweep(cfg, scenario_factors(s));
    };
    using S = StrategyKind;
    const auto low = sweep_of("low", {S::Baseline, S::Chronos, S::ChronosConst, S::ChronosHarmonic});
    auto cost = [](const SweepTable& t, Time p, S s) -> std::optional<std::int64_t> {
        for (const auto& r : t.rows)
            if (r.factor == p && r.strategy == s && r.error.empty()) return r.interrupt_cost + r.delay_cost;
        return std::nullopt;
    };
    bool harmonic_runs_on_low = true;
    for (Time p = 1; p <= 15; ++p) {
        const auto b = cost(low, p, S::Baseline), c = cost(low, p, S::Chronos), k = cost(low, p, S::ChronosConst);
        o.require(b && c && k && *k < *c && *c < *b, "low p=" + std::to_string(p) + ": const < chronos < baseline fails");
        harmonic_runs_on_low = harmonic_runs_on_low && cost(low, p, S::ChronosHarmonic).has_value();
    }
    if (!harmonic_runs_on_low) {
        const auto hl = sweep_of("harmonic-low", {S::Baseline, S::Chronos, S::ChronosConst, S::ChronosHarmonic});
        int ordered = 0;
        for (Time p = 1; p <= 15; ++p) {
            const auto h = cost(hl, p, S::ChronosHarmonic), k = cost(hl, p, S::ChronosConst);
            ordered += h && k && *h < *k;
        }
        const auto h1 = cost(hl, 1, S::ChronosHarmonic), k1 = cost(hl, 1, S::ChronosConst);
        o.require(ordered == 15, "harmonic cannot run on low (groups not harmonic); on harmonic-low harmonic < const at " +
                                     std::to_string(ordered) + "/15 factors (p=1: harmonic " +
                                     std::to_string(h1.value_or(-1)) + " vs const " + std::to_string(k1.value_or(-1)) +
                                     ")");
    }
    const std::map<S, std::pair<double, double>> pinned{{S::Chronos, {8.5866, 4.9769}}, {S::ChronosConst, {10.1513, 5.8904}}};
    for (const auto& s : low.summary) {
        if (s.strategy == S::ChronosHarmonic) continue;
        o.require(s.peak && *s.peak > 1 && s.geometric_mean && *s.geometric_mean > 1,
                  to_string(s.strategy) + " reduction not above 1x");
        const auto it = pinned.find(s.strategy);
        if (it != pinned.end() && s.peak && s.geometric_mean) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s summary %.4f/%.4f differs from pinned %.4f/%.4f", to_string(s.strategy).c_str(),
                          *s.peak, *s.geometric_mean, it->second.first, it->second.second);
            o.require(std::abs(*s.peak - it->second.first) < 5e-4 && std::abs(*s.geometric_mean - it->second.second) < 5e-4,
                      buf);
        }
    }
    if (o.pass) o.detail << "const < chronos < baseline at p=1..15; reductions above 1x and match pinned values";
    return o;
}

// 8. Uniform scaling.
Outcome scaling() {
    Outcome o;
    std::mt19937_64 rng(8);
    int instances = 0;
    for (; instances < 100 && o.pass; ++instances) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const auto periods = support::random_periods(rng, n, 30);
        std::vector<Time> doubled;
        for (Time t : periods) doubled.push_back(2 * t);
        const auto a = solve_exact(OptimizationProblem::from_periods(periods, m));
        const auto b = solve_exact(OptimizationProblem::from_periods(doubled, m));
        o.require(a.assignment == b.assignment, "partition changed on instance " + std::to_string(instances));
        o.require(b.objective * Rational(2) == a.objective, "objective not halved on instance " + std::to_string(instances));
    }
    if (o.pass) o.detail << instances << " instances: same partition, objective halved";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 figure 1/2 reproduction", figures},
        {"2 coprime counterexample", counterexample},
        {"3 optimizer optimality", optimality},
        {"4 release-correctness oracle", release_oracle},
        {"5 rate formula", rate_formula},
        {"6 cost contracts", cost_contracts},
        {"7 qualitative overhead trend", overhead_trend},
        {"8 scaling invariance", scaling},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        failed += !o.pass;
        std::printf("%s [%s] %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
