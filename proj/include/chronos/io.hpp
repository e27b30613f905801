#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronos/experiment.hpp"
#include "chronos/optimizer.hpp"
#include "chronos/sim.hpp"

namespace chronos {

using json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path);
}

inline json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(what + ": " + e.what());
    }
}

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline double parse_double(const std::string& s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw UsageError("not a number: '" + s + "'");
    return v;
}

inline std::int64_t parse_int(const std::string& s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw UsageError("not an integer: '" + s + "'");
    return v;
}

inline Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(parse_int(s));
    return Rational(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
}

namespace detail {

inline std::int64_t get_int(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw UsageError(where + ": missing '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw UsageError(where + ": '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

inline std::int64_t get_int_or(const json& obj, const char* key, std::int64_t fallback, const std::string& where) {
    return obj.contains(key) ? get_int(obj, key, where) : fallback;
}

}  // namespace detail

// ---------------------------------------------------------------- task sets

inline json task_set_to_json(const TaskSet& ts) {
    json tasks = json::array();
    for (const auto& t : ts) {
        json o;
        o["id"] = t.id;
        o["period"] = t.period;
        o["wcet"] = t.wcet;
        o["deadline"] = t.deadline;
        o["releases"] = t.releases_limit;
        tasks.push_back(std::move(o));
    }
    json doc;
    doc["tasks"] = std::move(tasks);
    return doc;
}

/// Missing fields default to wcet 0, deadline = period, releases 5.
inline TaskSet task_set_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("tasks") || !doc.at("tasks").is_array())
        throw UsageError("task set: expected an object with a 'tasks' array");
    std::vector<Task> tasks;
    for (const auto& o : doc.at("tasks")) {
        const std::string where = "task #" + std::to_string(tasks.size() + 1);
        if (!o.is_object()) throw UsageError(where + ": expected an object");
        Task t;
        t.id = static_cast<TaskId>(detail::get_int(o, "id", where));
        t.period = detail::get_int(o, "period", where);
        t.wcet = detail::get_int_or(o, "wcet", 0, where);
        t.deadline = detail::get_int_or(o, "deadline", t.period, where);
        t.releases_limit = detail::get_int_or(o, "releases", 5, where);
        tasks.push_back(t);
    }
    if (tasks.empty()) throw UsageError("task set is empty");
    return TaskSet(std::move(tasks));
}

// ---------------------------------------------------------------- mappings

inline json optimization_to_json(const OptimizationResult& r, const TaskSet& ts) {
    const Mapping mapping = to_mapping(r, ts);
    const auto groups = mapping.groups();
    json timers = json::array();
    for (std::size_t k = 0; k < r.groups.size(); ++k) {
        json t;
        t["id"] = k + 1;
        t["period"] = r.groups[k].period;
        json ids = json::array();
        for (std::size_t i : groups[k]) ids.push_back(ts[i].id);
        t["tasks"] = std::move(ids);
        t["task_periods"] = r.groups[k].periods;
        t["divisors"] = r.groups[k].divisors;
        timers.push_back(std::move(t));
    }
    json doc;
    doc["timers"] = std::move(timers);
    doc["objective"] = {{"num", r.objective.num()}, {"den", r.objective.den()}};
    doc["method"] = to_string(r.method);
    doc["stats"] = {{"nodes", r.stats.nodes}, {"subsets", r.stats.subsets}, {"limit_reached", r.limit_reached}};
    return doc;
}

inline json mapping_to_json(const Mapping& mapping, const TaskSet& ts) {
    const auto groups = mapping.groups();
    json timers = json::array();
    for (std::size_t k = 0; k < mapping.timers().size(); ++k) {
        json ids = json::array();
        for (std::size_t i : groups[k]) ids.push_back(ts[i].id);
        timers.push_back({{"id", mapping.timers()[k].id}, {"period", mapping.timers()[k].period}, {"tasks", ids}});
    }
    const Rational rate = expected_interrupt_rate(mapping);
    return {{"timers", timers}, {"objective", {{"num", rate.num()}, {"den", rate.den()}}}};
}

/// Reads the "timers" array; every task of `ts` must appear exactly once.
inline Mapping mapping_from_json(const json& doc, const TaskSet& ts) {
    if (!doc.is_object() || !doc.contains("timers") || !doc.at("timers").is_array())
        throw UsageError("mapping: expected an object with a 'timers' array");
    std::vector<TimerConfig> timers;
    std::vector<TimerId> assignment(ts.size(), 0);
    for (const auto& o : doc.at("timers")) {
        const std::string where = "timer #" + std::to_string(timers.size() + 1);
        TimerConfig c{static_cast<TimerId>(detail::get_int(o, "id", where)), detail::get_int(o, "period", where)};
        if (!o.contains("tasks") || !o.at("tasks").is_array()) throw UsageError(where + ": missing 'tasks' array");
        for (const auto& id : o.at("tasks")) {
            if (!id.is_number_integer()) throw UsageError(where + ": task ids must be integers");
            const std::size_t i = ts.index_of(id.get<TaskId>());
            if (assignment[i] != 0) throw UsageError("task " + std::to_string(i + 1) + " assigned twice");
            assignment[i] = c.id;
        }
        timers.push_back(c);
    }
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] == 0) throw UsageError("task " + std::to_string(ts[i].id) + " has no timer");
    Mapping m(std::move(timers), std::move(assignment));
    m.validate_against(ts);
    return m;
}

// ---------------------------------------------------------------- metrics

inline const std::vector<std::string>& metrics_csv_columns() {
    static const std::vector<std::string> cols{
        "strategy",       "total_interrupts", "required_interrupts", "not_required_interrupts", "interrupt_cost",
        "delay_cost",     "overhead_cost",    "total_time",          "total_work",              "busy_work",
        "idle_work",      "overhead_work",    "overhead_fraction",   "jobs_released",           "jobs_completed",
        "deadline_misses", "interrupts_per_timer"};
    return cols;
}

inline std::string join(const std::vector<std::string>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string metrics_to_csv(const std::vector<SimMetrics>& runs) {
    std::string out = join(metrics_csv_columns(), ',') + "\n";
    for (const auto& m : runs) {
        std::vector<std::string> per_timer;
        for (auto c : m.interrupts_per_timer) per_timer.push_back(std::to_string(c));
        out += join({to_string(m.strategy), std::to_string(m.total_interrupts), std::to_string(m.required_interrupts),
                     std::to_string(m.not_required_interrupts), std::to_string(m.interrupt_cost),
                     std::to_string(m.delay_cost), std::to_string(m.overhead_cost()), std::to_string(m.total_time),
                     std::to_string(m.total_work), std::to_string(m.busy_work), std::to_string(m.idle_work),
                     std::to_string(m.overhead_work), format_double(m.overhead_fraction()),
                     std::to_string(m.jobs_released), std::to_string(m.jobs_completed),
                     std::to_string(m.misses.size()), join(per_timer, ';')},
                    ',');
        out += "\n";
    }
    return out;
}

inline json metrics_to_json(const SimMetrics& m) {
    json misses = json::array();
    for (const auto& x : m.misses) misses.push_back({{"task", x.task}, {"release", x.release}, {"deadline", x.deadline}});
    json skipped = json::array();
    for (const auto& s : m.skipped) skipped.push_back({{"time", s.time}, {"task", s.task + 1}});
    return {{"strategy", to_string(m.strategy)},
            {"total_interrupts", m.total_interrupts},
            {"required_interrupts", m.required_interrupts},
            {"not_required_interrupts", m.not_required_interrupts},
            {"not_required_times", m.not_required_times},
            {"interrupts_per_timer", m.interrupts_per_timer},
            {"interrupt_cost", m.interrupt_cost},
            {"delay_cost", m.delay_cost},
            {"overhead_cost", m.overhead_cost()},
            {"total_time", m.total_time},
            {"total_work", m.total_work},
            {"busy_work", m.busy_work},
            {"idle_work", m.idle_work},
            {"overhead_work", m.overhead_work},
            {"overhead_fraction", m.overhead_fraction()},
            {"jobs_released", m.jobs_released},
            {"jobs_completed", m.jobs_completed},
            {"deadline_misses", misses},
            {"skipped_releases", skipped}};
}

inline std::string trace_to_csv(const SimMetrics& m) {
    std::string out = "time,event_kind,timer,task\n";
    for (const auto& e : m.trace)
        out += std::to_string(e.time) + "," + to_string(e.kind) + "," + std::to_string(e.timer) + "," +
               std::to_string(e.task) + "\n";
    return out;
}

// ---------------------------------------------------------------- sweeps

inline const std::vector<std::string>& sweep_csv_columns() {
    static const std::vector<std::string> cols{
        "factor",         "normalized_rate", "normalized_rate_exact", "strategy",       "total_interrupts",
        "not_required_interrupts", "interrupt_cost", "delay_cost",     "total_time",     "total_work",
        "overhead_fraction", "deadline_misses", "schedulable",      "schedulable_class", "reduction",
        "error"};
    return cols;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = join(sweep_csv_columns(), ',') + "\n";
    for (const auto& r : rows) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out += join({std::to_string(r.factor), format_double(r.normalized_rate.to_double()), r.normalized_rate.str(),
                     to_string(r.strategy), std::to_string(r.total_interrupts),
                     std::to_string(r.not_required_interrupts), std::to_string(r.interrupt_cost),
                     std::to_string(r.delay_cost), std::to_string(r.total_time), std::to_string(r.total_work),
                     format_double(r.overhead_fraction), std::to_string(r.deadline_misses),
                     r.schedulable ? "1" : "0", r.error.empty() ? to_string(r.schedule_class) : "",
                     r.reduction ? format_double(*r.reduction) : "", err},
                    ',');
        out += "\n";
    }
    return out;
}

inline std::vector<SweepRow> sweep_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw UsageError("sweep CSV is empty");
    const auto header = split(line, ',');
    if (header != sweep_csv_columns()) throw UsageError("sweep CSV header does not match the expected columns");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split(line, ',');
        if (f.size() != header.size()) throw UsageError("sweep CSV row has " + std::to_string(f.size()) + " fields");
        SweepRow r;
        r.factor = parse_int(f[0]);
        r.normalized_rate = parse_rational(f[2]);
        r.strategy = parse_strategy(f[3]);
        r.total_interrupts = static_cast<std::uint64_t>(parse_int(f[4]));
        r.not_required_interrupts = static_cast<std::uint64_t>(parse_int(f[5]));
        r.interrupt_cost = parse_int(f[6]);
        r.delay_cost = parse_int(f[7]);
        r.total_time = parse_int(f[8]);
        r.total_work = parse_int(f[9]);
        r.overhead_fraction = parse_double(f[10]);
        r.deadline_misses = static_cast<std::uint64_t>(parse_int(f[11]));
        r.schedulable = f[12] == "1";
        r.error = f[15];
        if (r.error.empty()) r.schedule_class = parse_schedule_class(f[13]);
        if (!f[14].empty()) r.reduction = parse_double(f[14]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline json sweep_to_json(const SweepTable& table) {
    json rows = json::array();
    for (const auto& r : table.rows) {
        json o = {{"factor", r.factor},
                  {"normalized_rate", {{"num", r.normalized_rate.num()}, {"den", r.normalized_rate.den()}}},
                  {"strategy", to_string(r.strategy)},
                  {"total_interrupts", r.total_interrupts},
                  {"not_required_interrupts", r.not_required_interrupts},
                  {"interrupt_cost", r.interrupt_cost},
                  {"delay_cost", r.delay_cost},
                  {"total_time", r.total_time},
                  {"total_work", r.total_work},
                  {"overhead_fraction", r.overhead_fraction},
                  {"deadline_misses", r.deadline_misses},
                  {"schedulable", r.schedulable},
                  {"schedulable_class", r.error.empty() ? to_string(r.schedule_class) : ""},
                  {"reduction", r.reduction ? json(*r.reduction) : json(nullptr)},
                  {"error", r.error}};
        rows.push_back(std::move(o));
    }
    json summary = json::array();
    for (const auto& s : table.summary)
        summary.push_back({{"strategy", to_string(s.strategy)},
                           {"peak", s.peak ? json(*s.peak) : json(nullptr)},
                           {"geometric_mean", s.geometric_mean ? json(*s.geometric_mean) : json(nullptr)},
                           {"mean_rows", s.mean_rows}});
    return {{"rows", rows}, {"summary", summary}};
}

inline std::vector<SweepRow> sweep_rows_from_json(const json& doc) {
    std::vector<SweepRow> rows;
    for (const auto& o : doc.at("rows")) {
        SweepRow r;
        r.factor = o.at("factor").get<Time>();
        r.normalized_rate = Rational(o.at("normalized_rate").at("num").get<std::int64_t>(),
                                     o.at("normalized_rate").at("den").get<std::int64_t>());
        r.strategy = parse_strategy(o.at("strategy").get<std::string>());
        r.total_interrupts = o.at("total_interrupts").get<std::uint64_t>();
        r.not_required_interrupts = o.at("not_required_interrupts").get<std::uint64_t>();
        r.interrupt_cost = o.at("interrupt_cost").get<std::int64_t>();
        r.delay_cost = o.at("delay_cost").get<std::int64_t>();
        r.total_time = o.at("total_time").get<Time>();
        r.total_work = o.at("total_work").get<std::int64_t>();
        r.overhead_fraction = o.at("overhead_fraction").get<double>();
        r.deadline_misses = o.at("deadline_misses").get<std::uint64_t>();
        r.schedulable = o.at("schedulable").get<bool>();
        r.error = o.at("error").get<std::string>();
        if (r.error.empty()) r.schedule_class = parse_schedule_class(o.at("schedulable_class").get<std::string>());
        if (!o.at("reduction").is_null()) r.reduction = o.at("reduction").get<double>();
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Fixed-width summary: one line per strategy with peak and geometric-mean reduction.
inline std::string format_summary(const std::vector<SweepSummary>& summary) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-18s %12s %12s %10s\n", "strategy", "peak", "mean", "mean_rows");
    os << line;
    for (const auto& s : summary) {
        auto cell = [](const std::optional<double>& v) {
            if (!v) return std::string("---");
            char b[32];
            std::snprintf(b, sizeof b, "%.2fx", *v);
            return std::string(b);
        };
        std::snprintf(line, sizeof line, "%-18s %12s %12s %10zu\n", to_string(s.strategy).c_str(), cell(s.peak).c_str(),
                      cell(s.geometric_mean).c_str(), s.mean_rows);
        os << line;
    }
    return os.str();
}

}  // namespace chronos
