#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chronos/sim.hpp"

namespace chronos {

/// Region labels for one task set across dispatching methods.
enum class ScheduleClass { Schedulable, Chronos, Harmonic, NotSchedulable, Mixed };

inline std::string to_string(ScheduleClass c) {
    switch (c) {
        case ScheduleClass::Schedulable: return "schedulable";
        case ScheduleClass::Chronos: return "chronos";
        case ScheduleClass::Harmonic: return "harmonic";
        case ScheduleClass::NotSchedulable: return "not-schedulable";
        case ScheduleClass::Mixed: return "mixed";
    }
    return "?";
}

inline ScheduleClass parse_schedule_class(const std::string& s) {
    for (auto c : {ScheduleClass::Schedulable, ScheduleClass::Chronos, ScheduleClass::Harmonic,
                   ScheduleClass::NotSchedulable, ScheduleClass::Mixed})
        if (to_string(c) == s) return c;
    throw UsageError("unknown schedulability class '" + s + "'");
}

/// schedulable: no method misses. not-schedulable: every method misses.
/// chronos: the baseline misses but Chronos or Chronos-const does not.
/// harmonic: only Chronos-harmonic is miss-free. Anything else is mixed.
inline ScheduleClass classify(const std::vector<SimMetrics>& runs) {
    bool all_ok = true, none_ok = true;
    std::map<StrategyKind, bool> ok;
    for (const auto& r : runs) {
        ok[r.strategy] = ok.count(r.strategy) ? ok[r.strategy] && r.schedulable() : r.schedulable();
        all_ok = all_ok && r.schedulable();
        none_ok = none_ok && !r.schedulable();
    }
    if (all_ok) return ScheduleClass::Schedulable;
    if (none_ok) return ScheduleClass::NotSchedulable;
    auto good = [&](StrategyKind s) { return ok.count(s) && ok[s]; };
    const bool baseline_misses = ok.count(StrategyKind::Baseline) && !ok[StrategyKind::Baseline];
    if (baseline_misses && (good(StrategyKind::Chronos) || good(StrategyKind::ChronosConst))) return ScheduleClass::Chronos;
    bool only_harmonic = good(StrategyKind::ChronosHarmonic);
    for (const auto& [s, v] : ok)
        if (s != StrategyKind::ChronosHarmonic && v) only_harmonic = false;
    if (only_harmonic) return ScheduleClass::Harmonic;
    return ScheduleClass::Mixed;
}

struct ComparisonEntry {
    SimMetrics metrics;
    double overhead_ratio = 0;        ///< reference overhead cost / this overhead cost
    Rational interrupt_ratio{0};      ///< reference interrupts / this interrupts
    bool schedulable = false;
};

struct ComparisonReport {
    std::size_t reference = 0;  ///< index of the baseline run (first run when there is none)
    std::vector<ComparisonEntry> entries;
    ScheduleClass schedule_class = ScheduleClass::Schedulable;
};

inline ComparisonReport compare(const std::vector<SimConfig>& configs) {
    if (configs.size() < 2) throw UsageError("compare needs at least two configurations");
    for (const auto& c : configs) {
        if (!(c.tasks == configs.front().tasks)) throw UsageError("compared configurations use different task sets");
        if (!(c.weights == configs.front().weights)) throw UsageError("compared configurations use different cost weights");
    }
    ComparisonReport report;
    std::vector<SimMetrics> runs;
    for (const auto& c : configs) runs.push_back(run(c));
    for (std::size_t i = 0; i < runs.size(); ++i)
        if (runs[i].strategy == StrategyKind::Baseline) {
            report.reference = i;
            break;
        }
    const SimMetrics& ref = runs[report.reference];
    for (auto& r : runs) {
        ComparisonEntry e;
        e.overhead_ratio = r.overhead_cost() == 0 ? 0.0
                                                  : static_cast<double>(ref.overhead_cost()) / static_cast<double>(r.overhead_cost());
        e.interrupt_ratio = r.total_interrupts == 0
                                ? Rational{0}
                                : Rational(static_cast<std::int64_t>(ref.total_interrupts),
                                           static_cast<std::int64_t>(r.total_interrupts));
        e.schedulable = r.schedulable();
        e.metrics = std::move(r);
        report.entries.push_back(std::move(e));
    }
    std::vector<SimMetrics> all;
    for (const auto& e : report.entries) all.push_back(e.metrics);
    report.schedule_class = classify(all);
    return report;
}

/// Sweep over uniform period scaling: each factor multiplies every task period
/// (and deadline) and, unless the timers are pinned, every timer period.
struct SweepConfig {
    SimConfig base;  ///< strategy field is ignored
    std::vector<StrategyKind> strategies;
    bool scale_timers = true;
};

struct SweepRow {
    Time factor = 1;
    StrategyKind strategy = StrategyKind::Baseline;
    Rational normalized_rate{0};  ///< expected interrupts relative to one timer scaled like the mapping
    std::uint64_t total_interrupts = 0;
    std::uint64_t not_required_interrupts = 0;
    std::int64_t interrupt_cost = 0;
    std::int64_t delay_cost = 0;
    Time total_time = 0;
    std::int64_t total_work = 0;
    double overhead_fraction = 0;
    std::uint64_t deadline_misses = 0;
    bool schedulable = false;
    ScheduleClass schedule_class = ScheduleClass::Schedulable;
    std::optional<double> reduction;  ///< baseline overhead fraction / this one
    std::string error;
};

struct SweepSummary {
    StrategyKind strategy;
    std::optional<double> peak;
    std::optional<double> geometric_mean;
    std::size_t mean_rows = 0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<SweepSummary> summary;
    /// Factors where a strategy was miss-free at p but not at p+1.
    std::vector<std::pair<StrategyKind, Time>> monotonicity_violations;
};

/// Peak and geometric-mean reduction per non-baseline strategy. The mean only
/// covers factors where at least one method is miss-free.
inline std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows) {
    std::vector<StrategyKind> order;
    for (const auto& r : rows)
        if (r.strategy != StrategyKind::Baseline && std::find(order.begin(), order.end(), r.strategy) == order.end())
            order.push_back(r.strategy);
    std::vector<SweepSummary> out;
    for (StrategyKind s : order) {
        SweepSummary sum{s, std::nullopt, std::nullopt, 0};
        double log_sum = 0;
        for (const auto& r : rows) {
            if (r.strategy != s || !r.error.empty() || !r.reduction) continue;
            if (!sum.peak || *r.reduction > *sum.peak) sum.peak = *r.reduction;
            if (r.schedule_class != ScheduleClass::NotSchedulable && *r.reduction > 0) {
                log_sum += std::log(*r.reduction);
                ++sum.mean_rows;
            }
        }
        if (sum.mean_rows > 0) sum.geometric_mean = std::exp(log_sum / static_cast<double>(sum.mean_rows));
        out.push_back(sum);
    }
    return out;
}

inline SweepTable period_factor_sweep(const SweepConfig& sweep, const std::vector<Time>& factors) {
    if (factors.empty()) throw UsageError("sweep needs at least one period factor");
    if (sweep.strategies.empty()) throw UsageError("sweep needs at least one strategy");
    for (Time p : factors)
        if (p < 1) throw UsageError("period factors must be >= 1");

    SweepTable table;
    std::map<StrategyKind, std::optional<bool>> prev_ok;
    for (Time p : factors) {
        std::vector<SweepRow> rows;
        std::vector<SimMetrics> runs;
        std::string row_error;
        SimConfig cfg = sweep.base;
        try {
            cfg.tasks = sweep.base.tasks.scaled(p);
            cfg.mapping = sweep.scale_timers ? sweep.base.mapping.scaled(p) : sweep.base.mapping;
            (void)cfg.tasks.hyperperiod();
        } catch (const std::exception& e) {
            row_error = e.what();
        }
        for (StrategyKind s : sweep.strategies) {
            SweepRow row;
            row.factor = p;
            row.strategy = s;
            if (!row_error.empty()) {
                row.error = row_error;
                rows.push_back(row);
                continue;
            }
            try {
                cfg.strategy = s;
                row.normalized_rate = s == StrategyKind::Baseline ? Rational{1} : expected_interrupt_rate(sweep.base.mapping);
                SimMetrics mtr = run(cfg);
                row.total_interrupts = mtr.total_interrupts;
                row.not_required_interrupts = mtr.not_required_interrupts;
                row.interrupt_cost = mtr.interrupt_cost;
                row.delay_cost = mtr.delay_cost;
                row.total_time = mtr.total_time;
                row.total_work = mtr.total_work;
                row.overhead_fraction = mtr.overhead_fraction();
                row.deadline_misses = mtr.misses.size();
                row.schedulable = mtr.schedulable();
                runs.push_back(std::move(mtr));
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            rows.push_back(row);
        }
        const ScheduleClass cls = runs.empty() ? ScheduleClass::NotSchedulable : classify(runs);
        std::optional<double> base_frac;
        for (const auto& r : rows)
            if (r.strategy == StrategyKind::Baseline && r.error.empty()) base_frac = r.overhead_fraction;
        for (auto& r : rows) {
            if (!r.error.empty()) continue;
            r.schedule_class = cls;
            if (base_frac && r.overhead_fraction > 0) r.reduction = *base_frac / r.overhead_fraction;
            auto& prev = prev_ok[r.strategy];
            if (prev && *prev && !r.schedulable) table.monotonicity_violations.push_back({r.strategy, p});
            prev = r.schedulable;
        }
        table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    }
    table.summary = summarize(table.rows);
    return table;
}

}  // namespace chronos
