#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chronos/generate.hpp"
#include "chronos/io.hpp"

namespace chronos {

/// A self-contained experiment: how to obtain the task set, how many timers
/// the optimizer may use (or a pinned single timer), which dispatchers to run,
/// the cost model and the period-factor range.
struct Scenario {
    std::string name;
    std::optional<GenerationSpec> generation;
    std::optional<TaskSet> tasks;  ///< explicit task set instead of a generator
    std::size_t timers = 4;
    std::optional<Time> fixed_timer_period;  ///< one timer with this period, never scaled
    std::size_t max_chains_per_timer = 1;
    std::vector<StrategyKind> strategies{StrategyKind::Baseline, StrategyKind::Chronos, StrategyKind::ChronosConst};
    CostWeights weights;
    std::int64_t work_units_per_time_unit = 10000;
    bool overhead_as_time = true;
    bool time_slicing = true;
    Time sweep_from = 1;
    Time sweep_to = 15;
    std::optional<std::string> out_tasks, out_mapping, out_sweep_csv, out_sweep_json;
};

namespace detail {

inline std::vector<Time> get_time_list(const json& o, const char* key, const std::string& where) {
    if (!o.contains(key) || !o.at(key).is_array()) throw UsageError(where + ": '" + key + "' must be an array");
    std::vector<Time> out;
    for (const auto& v : o.at(key)) {
        if (!v.is_number_integer()) throw UsageError(where + ": '" + key + "' entries must be integers");
        out.push_back(v.get<Time>());
    }
    return out;
}

inline bool get_bool_or(const json& o, const char* key, bool fallback, const std::string& where) {
    if (!o.contains(key)) return fallback;
    if (!o.at(key).is_boolean()) throw UsageError(where + ": '" + key + "' must be a boolean");
    return o.at(key).get<bool>();
}

}  // namespace detail

inline Scenario scenario_from_json(const json& doc) {
    const std::string where = "scenario";
    if (!doc.is_object()) throw UsageError("scenario: expected an object");
    Scenario s;
    s.name = doc.value("name", std::string("scenario"));
    const std::uint64_t seed = static_cast<std::uint64_t>(detail::get_int_or(doc, "seed", 1, where));
    if (doc.contains("generation")) {
        const auto& g = doc.at("generation");
        const std::string gw = "scenario.generation";
        GenerationSpec spec;
        spec.base_periods = detail::get_time_list(g, "base_periods", gw);
        spec.factors = detail::get_time_list(g, "factors", gw);
        const auto n = detail::get_int(g, "tasks", gw);
        if (n < 1) throw UsageError(gw + ": 'tasks' must be >= 1");
        spec.n_tasks = static_cast<std::size_t>(n);
        spec.period_factor = detail::get_int_or(g, "period_factor", 1, gw);
        spec.wcet = detail::get_int_or(g, "wcet", 0, gw);
        spec.releases = detail::get_int_or(g, "releases", 5, gw);
        spec.harmonic = detail::get_bool_or(g, "harmonic", false, gw);
        spec.seed = seed;
        validate(spec);
        s.generation = spec;
    } else if (doc.contains("tasks")) {
        s.tasks = task_set_from_json(doc);
    } else {
        throw UsageError("scenario: needs 'generation' or 'tasks'");
    }
    const auto timers = detail::get_int_or(doc, "timers", 4, where);
    if (timers < 1) throw UsageError("scenario: 'timers' must be >= 1");
    s.timers = static_cast<std::size_t>(timers);
    if (doc.contains("fixed_timer_period") && !doc.at("fixed_timer_period").is_null()) {
        s.fixed_timer_period = detail::get_int(doc, "fixed_timer_period", where);
        if (*s.fixed_timer_period < 1) throw UsageError("scenario: 'fixed_timer_period' must be >= 1");
    }
    s.max_chains_per_timer = static_cast<std::size_t>(detail::get_int_or(doc, "max_chains_per_timer", 1, where));
    if (doc.contains("strategies")) {
        s.strategies.clear();
        for (const auto& v : doc.at("strategies")) s.strategies.push_back(parse_strategy(v.get<std::string>()));
        if (s.strategies.empty()) throw UsageError("scenario: 'strategies' is empty");
    }
    if (doc.contains("cost")) {
        const auto& c = doc.at("cost");
        const std::string cw = "scenario.cost";
        auto& w = s.weights;
        w.tick_increment = detail::get_int_or(c, "tick_increment", w.tick_increment, cw);
        w.comparison = detail::get_int_or(c, "comparison", w.comparison, cw);
        w.list_remove = detail::get_int_or(c, "list_remove", w.list_remove, cw);
        w.sorted_insert_step = detail::get_int_or(c, "sorted_insert_step", w.sorted_insert_step, cw);
        w.list_append = detail::get_int_or(c, "list_append", w.list_append, cw);
        w.slot_write = detail::get_int_or(c, "slot_write", w.slot_write, cw);
        w.ready_insert = detail::get_int_or(c, "ready_insert", w.ready_insert, cw);
        w.inspection = detail::get_int_or(c, "inspection", w.inspection, cw);
        w.interrupt_entry_exit = detail::get_int_or(c, "interrupt_entry_exit", w.interrupt_entry_exit, cw);
        s.work_units_per_time_unit = detail::get_int_or(c, "work_units_per_time_unit", s.work_units_per_time_unit, cw);
        s.overhead_as_time = detail::get_bool_or(c, "overhead_as_time", s.overhead_as_time, cw);
    }
    s.time_slicing = detail::get_bool_or(doc, "time_slicing", true, where);
    if (doc.contains("sweep")) {
        s.sweep_from = detail::get_int_or(doc.at("sweep"), "from", 1, "scenario.sweep");
        s.sweep_to = detail::get_int_or(doc.at("sweep"), "to", 15, "scenario.sweep");
        if (s.sweep_from < 1 || s.sweep_to < s.sweep_from) throw UsageError("scenario.sweep: need 1 <= from <= to");
    }
    if (doc.contains("outputs")) {
        const auto& o = doc.at("outputs");
        auto opt = [&](const char* key) -> std::optional<std::string> {
            if (!o.contains(key)) return std::nullopt;
            return o.at(key).get<std::string>();
        };
        s.out_tasks = opt("tasks");
        s.out_mapping = opt("mapping");
        s.out_sweep_csv = opt("sweep_csv");
        s.out_sweep_json = opt("sweep_json");
    }
    return s;
}

inline TaskSet scenario_tasks(const Scenario& s) {
    return s.generation ? generate_task_set(*s.generation) : *s.tasks;
}

/// Optimized mapping (or the pinned single timer) for the scenario's task set.
inline Mapping scenario_mapping(const Scenario& s, const TaskSet& ts) {
    if (s.fixed_timer_period) return Mapping::single_timer(ts.size(), *s.fixed_timer_period);
    return to_mapping(optimize(OptimizationProblem::from_task_set(ts, s.timers)), ts);
}

inline SweepConfig scenario_sweep_config(const Scenario& s, const TaskSet& ts, const Mapping& mapping) {
    SweepConfig cfg;
    cfg.base.tasks = ts;
    cfg.base.mapping = mapping;
    cfg.base.weights = s.weights;
    cfg.base.work_units_per_time_unit = s.work_units_per_time_unit;
    cfg.base.overhead_as_time = s.overhead_as_time;
    cfg.base.time_slicing = s.time_slicing;
    cfg.base.max_chains_per_timer = s.max_chains_per_timer;
    cfg.strategies = s.strategies;
    cfg.scale_timers = !s.fixed_timer_period.has_value();
    return cfg;
}

inline std::vector<Time> scenario_factors(const Scenario& s) {
    std::vector<Time> f;
    for (Time p = s.sweep_from; p <= s.sweep_to; ++p) f.push_back(p);
    return f;
}

// ---------------------------------------------------------------- presets
//
// The five workload configurations: non-harmonic low/high, and harmonic
// single/low/high. The same documents are checked in under scenarios/.

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"low", "high", "harmonic-single", "harmonic-low", "harmonic-high"};
    return names;
}

inline json preset_json(const std::string& name) {
    const bool harmonic = name.rfind("harmonic", 0) == 0;
    std::int64_t wcet = 0;
    if (name == "low" || name == "harmonic-low")
        wcet = 1000;
    else if (name == "high" || name == "harmonic-high")
        wcet = 10000;
    else if (name == "harmonic-single")
        wcet = 100;
    else
        throw UsageError("unknown preset '" + name + "' (low, high, harmonic-single, harmonic-low, harmonic-high)");

    json factors = harmonic ? json::array({1, 2, 4, 8, 16}) : json::array({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    json strategies = json::array({"baseline", "chronos", "chronos-const"});
    if (name == "harmonic-single")
        strategies = json::array({"baseline", "chronos-const", "chronos-harmonic"});
    else if (harmonic)
        strategies.push_back("chronos-harmonic");

    json doc;
    doc["name"] = name;
    doc["seed"] = 1;
    doc["generation"] = {{"base_periods", {3, 5, 7, 11}}, {"factors", factors}, {"tasks", 100},
                         {"period_factor", 1},           {"wcet", wcet},       {"releases", 5},
                         {"harmonic", harmonic}};
    doc["timers"] = name == "harmonic-single" ? 1 : 4;
    doc["fixed_timer_period"] = name == "harmonic-single" ? json(1) : json(nullptr);
    doc["max_chains_per_timer"] = name == "harmonic-single" ? 4 : 1;
    doc["strategies"] = strategies;
    doc["cost"] = {{"tick_increment", 1}, {"comparison", 1},   {"list_remove", 2},
                   {"sorted_insert_step", 1}, {"list_append", 1}, {"slot_write", 1},
                   {"ready_insert", 1},    {"inspection", 0},  {"interrupt_entry_exit", 10},
                   {"work_units_per_time_unit", 10000}, {"overhead_as_time", true}};
    doc["time_slicing"] = true;
    doc["sweep"] = {{"from", 1}, {"to", 15}};
    doc["outputs"] = {{"tasks", name + "_tasks.json"},
                      {"mapping", name + "_mapping.json"},
                      {"sweep_csv", name + "_sweep.csv"}};
    return doc;
}

inline Scenario preset(const std::string& name) { return scenario_from_json(preset_json(name)); }

}  // namespace chronos
