// chronos: generate task sets, partition them across timers, simulate the
// dispatchers and sweep period factors.
//
// Exit codes: 0 ok, 1 optimize fell back to the heuristic, 2 bad input,
// 3 inconsistent configuration, 4 internal error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "chronos/chronos.hpp"

namespace {

using namespace chronos;

constexpr int kExitHeuristic = 1;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInternal = 4;

void emit(const std::optional<std::string>& path, const std::string& content) {
    if (path)
        write_file(*path, content);
    else
        std::cout << content;
}

TaskSet load_tasks(const std::string& path) { return task_set_from_json(parse_json(read_file(path), path)); }

std::string harmonic_summary(const TaskSet& ts) {
    const auto distinct = ts.distinct_periods();
    const auto chains = harmonic_chains(distinct);
    std::string out = "harmonic chains: " + std::to_string(chains.size()) + (chains.size() == 1 ? " (harmonic set)" : "");
    for (const auto& c : chains) {
        out += "\n  ";
        for (std::size_t i = 0; i < c.size(); ++i) out += (i ? " " : "") + std::to_string(c[i]);
    }
    return out;
}

Scenario load_scenario(const std::optional<std::string>& file, const std::optional<std::string>& preset_name) {
    if (file && preset_name) throw UsageError("give either a scenario file or --preset, not both");
    if (preset_name) return preset(*preset_name);
    if (!file) throw UsageError("a scenario file or --preset is required");
    return scenario_from_json(parse_json(read_file(*file), *file));
}

struct GenerateArgs {
    std::optional<std::string> preset, spec, out;
    std::optional<std::uint64_t> seed;
    std::optional<Time> period_factor;
    std::optional<std::int64_t> n_tasks;
};

int cmd_generate(const GenerateArgs& a) {
    Scenario s = load_scenario(a.spec, a.preset);
    if (!s.generation) throw UsageError("scenario has no 'generation' section");
    if (a.seed) s.generation->seed = *a.seed;
    if (a.period_factor) s.generation->period_factor = *a.period_factor;
    if (a.n_tasks) {
        if (*a.n_tasks < 1) throw UsageError("--tasks must be >= 1");
        s.generation->n_tasks = static_cast<std::size_t>(*a.n_tasks);
    }
    const TaskSet ts = generate_task_set(*s.generation);
    emit(a.out, task_set_to_json(ts).dump(2) + "\n");
    std::ostream& info = a.out ? std::cout : std::cerr;
    info << "tasks: " << ts.size() << "\n"
         << "distinct periods: " << ts.distinct_periods().size() << "\n"
         << "hyperperiod: " << ts.hyperperiod() << "\n"
         << harmonic_summary(ts) << "\n";
    if (s.fixed_timer_period) info << "timer period fixed to " << *s.fixed_timer_period << "\n";
    return 0;
}

struct OptimizeArgs {
    std::string tasks;
    std::size_t timers = 4;
    std::size_t exact_bound = 20;
    std::optional<std::string> out, export_lp;
};

int cmd_optimize(const OptimizeArgs& a) {
    const TaskSet ts = load_tasks(a.tasks);
    auto problem = OptimizationProblem::from_task_set(ts, a.timers);
    problem.exact_bound = a.exact_bound;
    const auto result = optimize(problem);
    if (a.export_lp) export_miqcp(problem, *a.export_lp);
    emit(a.out, optimization_to_json(result, ts).dump(2) + "\n");
    std::ostream& info = a.out ? std::cout : std::cerr;
    info << "method: " << to_string(result.method) << "\n"
         << "objective: " << result.objective << " (" << result.objective.to_double() << " interrupts per time unit)\n"
         << "timers used: " << result.timers_used() << " of " << a.timers << "\n";
    for (std::size_t k = 0; k < result.groups.size(); ++k)
        info << "  timer " << k + 1 << ": period " << result.groups[k].period << ", " << result.groups[k].periods.size()
             << " distinct task periods\n";
    return result.method == SolveMethod::Exact ? 0 : kExitHeuristic;
}

struct SimulateArgs {
    std::string tasks;
    std::optional<std::string> mapping, out, trace;
    std::string strategy = "chronos";
    std::string format = "json";
    std::size_t timers = 4;
    std::optional<Time> horizon;
    Time period_factor = 1;
    std::int64_t units = 1;
    bool overhead_as_time = false;
    bool no_time_slicing = false;
    std::size_t max_chains = 1;
};

int cmd_simulate(const SimulateArgs& a) {
    SimConfig cfg;
    const TaskSet base = load_tasks(a.tasks);
    cfg.strategy = parse_strategy(a.strategy);
    Mapping mapping;
    if (a.mapping)
        mapping = mapping_from_json(parse_json(read_file(*a.mapping), *a.mapping), base);
    else if (cfg.strategy == StrategyKind::Baseline)
        mapping = Mapping::single_timer(base.size(), 1);
    else
        mapping = to_mapping(optimize(OptimizationProblem::from_task_set(base, a.timers)), base);
    cfg.tasks = base.scaled(a.period_factor);
    cfg.mapping = mapping.scaled(a.period_factor);
    cfg.horizon = a.horizon;
    cfg.work_units_per_time_unit = a.units;
    cfg.overhead_as_time = a.overhead_as_time;
    cfg.time_slicing = !a.no_time_slicing;
    cfg.max_chains_per_timer = a.max_chains;
    cfg.record_trace = a.trace.has_value();
    const SimMetrics m = run(cfg);
    if (a.format == "csv")
        emit(a.out, metrics_to_csv({m}));
    else
        emit(a.out, metrics_to_json(m).dump(2) + "\n");
    if (a.trace) write_file(*a.trace, trace_to_csv(m));
    return 0;
}

struct SweepArgs {
    std::optional<std::string> scenario, preset, out;
    std::optional<std::uint64_t> seed;
    std::optional<Time> period_factor, from, to;
    std::string format = "csv";
};

int cmd_sweep(const SweepArgs& a) {
    Scenario s = load_scenario(a.scenario, a.preset);
    if (a.seed && s.generation) s.generation->seed = *a.seed;
    if (a.from) s.sweep_from = *a.from;
    if (a.to) s.sweep_to = *a.to;
    if (a.period_factor) s.sweep_from = s.sweep_to = *a.period_factor;
    if (s.sweep_from < 1 || s.sweep_to < s.sweep_from) throw UsageError("need 1 <= from <= to");

    const TaskSet ts = scenario_tasks(s);
    const Mapping mapping = scenario_mapping(s, ts);
    const auto table = period_factor_sweep(scenario_sweep_config(s, ts, mapping), scenario_factors(s));

    std::optional<std::string> out = a.out;
    if (!out) out = a.format == "json" ? s.out_sweep_json : s.out_sweep_csv;
    emit(out, a.format == "json" ? sweep_to_json(table).dump(2) + "\n" : sweep_to_csv(table.rows));

    std::ostream& info = out ? std::cout : std::cerr;
    info << "scenario " << s.name << ": " << ts.size() << " tasks, rate " << expected_interrupt_rate(mapping) << " ("
         << mapping.timers().size() << " timers)\n";
    info << format_summary(table.summary);
    for (const auto& [strategy, p] : table.monotonicity_violations)
        info << "note: " << to_string(strategy) << " misses at factor " << p << " after a miss-free factor\n";

    std::size_t failed = 0;
    for (const auto& r : table.rows)
        if (!r.error.empty()) {
            ++failed;
            info << "row error (factor " << r.factor << ", " << to_string(r.strategy) << "): " << r.error << "\n";
        }
    return failed == table.rows.size() ? kExitConfig : 0;
}

struct ReportArgs {
    std::string input;
    std::string format = "text";
};

int cmd_report(const ReportArgs& a) {
    const std::string text = read_file(a.input);
    std::vector<SweepRow> rows;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        rows = sweep_rows_from_json(parse_json(text, a.input));
    else
        rows = sweep_from_csv(text);
    const auto summary = summarize(rows);
    if (a.format == "json") {
        SweepTable t;
        t.summary = summary;
        std::cout << sweep_to_json(t).at("summary").dump(2) << "\n";
    } else {
        std::cout << format_summary(summary);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-timer tick dispatching: partition, simulate, sweep"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Generate a task set from a preset or scenario file");
    g->add_option("--preset", gen.preset, "low | high | harmonic-single | harmonic-low | harmonic-high");
    g->add_option("--spec", gen.spec, "Scenario JSON with a 'generation' section");
    g->add_option("--seed", gen.seed, "Override the RNG seed");
    g->add_option("--period-factor", gen.period_factor, "Scale every period");
    g->add_option("--tasks", gen.n_tasks, "Override the number of tasks");
    g->add_option("--out,-o", gen.out, "Output task-set JSON (default stdout)");

    OptimizeArgs opt;
    auto* o = app.add_subcommand("optimize", "Partition task periods across timers");
    o->add_option("--tasks", opt.tasks, "Task-set JSON")->required();
    o->add_option("--timers,-m", opt.timers, "Timer budget")->check(CLI::PositiveNumber);
    o->add_option("--exact-bound", opt.exact_bound, "Largest distinct-period count solved exactly");
    o->add_option("--out,-o", opt.out, "Output mapping JSON (default stdout)");
    o->add_option("--export-lp", opt.export_lp, "Also write the MIQCP in LP format");

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Run one dispatcher over a task set");
    s->add_option("--tasks", sim.tasks, "Task-set JSON")->required();
    s->add_option("--mapping", sim.mapping, "Mapping JSON (default: optimize with --timers)");
    s->add_option("--strategy", sim.strategy, "baseline | chronos | chronos-const | chronos-harmonic");
    s->add_option("--timers,-m", sim.timers, "Timer budget when no mapping is given")->check(CLI::PositiveNumber);
    s->add_option("--horizon", sim.horizon, "Simulate [0, horizon] instead of until all tasks finish");
    s->add_option("--period-factor", sim.period_factor, "Scale task and timer periods")->check(CLI::PositiveNumber);
    s->add_option("--units-per-time-unit", sim.units, "CPU work units per time unit")->check(CLI::PositiveNumber);
    s->add_flag("--overhead-as-time", sim.overhead_as_time, "Dispatcher costs consume CPU time");
    s->add_flag("--no-time-slicing", sim.no_time_slicing, "Disable round-robin among equal priorities");
    s->add_option("--max-chains", sim.max_chains, "Harmonic chains allowed per timer");
    s->add_option("--format", sim.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    s->add_option("--out,-o", sim.out, "Output metrics (default stdout)");
    s->add_option("--trace", sim.trace, "Write the event trace CSV here");

    SweepArgs sw;
    auto* w = app.add_subcommand("sweep", "Run all strategies of a scenario over period factors");
    w->add_option("scenario", sw.scenario, "Scenario JSON");
    w->add_option("--preset", sw.preset, "Built-in scenario instead of a file");
    w->add_option("--seed", sw.seed, "Override the RNG seed");
    w->add_option("--period-factor", sw.period_factor, "Run a single factor");
    w->add_option("--from", sw.from, "First factor");
    w->add_option("--to", sw.to, "Last factor");
    w->add_option("--format", sw.format, "csv | json")->check(CLI::IsMember({"json", "csv"}));
    w->add_option("--out,-o", sw.out, "Output table (default: scenario outputs, else stdout)");

    ReportArgs rep;
    auto* r = app.add_subcommand("report", "Summarize a sweep table (peak and geometric-mean reduction)");
    r->add_option("input", rep.input, "Sweep CSV or JSON")->required();
    r->add_option("--format", rep.format, "text | json")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*g) return cmd_generate(gen);
        if (*o) return cmd_optimize(opt);
        if (*s) return cmd_simulate(sim);
        if (*w) return cmd_sweep(sw);
        if (*r) return cmd_report(rep);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << "\n";
        return kExitInput;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
