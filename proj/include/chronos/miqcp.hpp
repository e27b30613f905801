#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chronos/optimizer.hpp"

namespace chronos {

/// The timer-partitioning model written out for an external MIQCP solver.
///
/// Variables per timer j: f_j (interrupt rate, continuous), P_j (period,
/// integer), u_j (timer used, binary). Per period i: d_i (integer quotient).
/// Per pair: m_i_j (assignment, binary) and w_i_j, the product P_j * m_i_j,
/// linearized with the usual bounded-variable big-M rows so that the divisor
/// condition stays a single bilinear row d_i * sum_j w_i_j = T_i.
struct MiqcpModel {
    struct Row {
        std::string family;  ///< rate | assign | divisor | wlin | or
        std::string name;
        std::string text;  ///< full LP row text after the name
    };
    struct Variable {
        std::string name;
        enum class Kind { Continuous, Integer, Binary } kind;
        std::string lower, upper;
    };

    std::size_t n = 0;
    std::size_t m = 0;
    Time max_period = 0;
    std::string objective;
    std::vector<Row> rows;
    std::vector<Variable> variables;

    std::size_t count_rows(const std::string& family) const {
        std::size_t c = 0;
        for (const auto& r : rows) c += r.family == family;
        return c;
    }
    std::size_t count_vars(char prefix) const {
        std::size_t c = 0;
        for (const auto& v : variables) c += v.name.front() == prefix;
        return c;
    }

    /// CPLEX LP text (accepted by Gurobi, CPLEX, SCIP and HiGHS readers).
    std::string to_lp() const {
        std::ostringstream os;
        os << "\\ Timer partition model: minimize sum_j f_j*u_j (expected tick interrupts per time unit)\n";
        os << "\\ periods: " << n << "  timers: " << m << "  max period: " << max_period << "\n";
        os << "\\ NON-CONVEX: rate rows f_j * P_j = 1 and divisor rows are quadratic equalities\n";
        os << "\\ f_j lower bound is 1/max period rounded down to 12 decimals\n";
        os << "Minimize\n obj: " << objective << "\n";
        os << "Subject To\n";
        for (const auto& r : rows) os << " " << r.name << ": " << r.text << "\n";
        os << "Bounds\n";
        for (const auto& v : variables)
            if (v.kind != Variable::Kind::Binary) os << " " << v.lower << " <= " << v.name << " <= " << v.upper << "\n";
        os << "Generals\n";
        for (const auto& v : variables)
            if (v.kind == Variable::Kind::Integer) os << " " << v.name << "\n";
        os << "Binaries\n";
        for (const auto& v : variables)
            if (v.kind == Variable::Kind::Binary) os << " " << v.name << "\n";
        os << "End\n";
        return os.str();
    }
};

namespace detail {

// floor(1/den) as a 12-decimal string, so the written bound never exceeds the true one
inline std::string reciprocal_floor_decimal(Time den) {
    constexpr std::int64_t scale = 1'000'000'000'000;
    if (den == 1) return "1";
    const std::int64_t q = scale / den;
    std::string digits = std::to_string(q);
    digits.insert(digits.begin(), 12 - digits.size(), '0');
    return "0." + digits;
}

}  // namespace detail

inline MiqcpModel build_miqcp(const OptimizationProblem& problem) {
    problem.validate();
    MiqcpModel model;
    model.n = problem.size();
    model.m = problem.timers;
    model.max_period = problem.max_period();
    const std::string big = std::to_string(model.max_period);
    const auto idx = [](std::size_t i) { return std::to_string(i + 1); };
    const auto mv = [&](std::size_t i, std::size_t j) { return "m_" + idx(i) + "_" + idx(j); };
    const auto wv = [&](std::size_t i, std::size_t j) { return "w_" + idx(i) + "_" + idx(j); };
    using Kind = MiqcpModel::Variable::Kind;

    for (std::size_t j = 0; j < model.m; ++j)
        model.variables.push_back({"f" + idx(j), Kind::Continuous, detail::reciprocal_floor_decimal(model.max_period), "1"});
    for (std::size_t j = 0; j < model.m; ++j) model.variables.push_back({"P" + idx(j), Kind::Integer, "1", big});
    for (std::size_t i = 0; i < model.n; ++i)
        model.variables.push_back({"d" + idx(i), Kind::Integer, "1", std::to_string(problem.periods[i])});
    for (std::size_t i = 0; i < model.n; ++i)
        for (std::size_t j = 0; j < model.m; ++j) model.variables.push_back({mv(i, j), Kind::Binary, "0", "1"});
    for (std::size_t i = 0; i < model.n; ++i)
        for (std::size_t j = 0; j < model.m; ++j) model.variables.push_back({wv(i, j), Kind::Continuous, "0", big});
    for (std::size_t j = 0; j < model.m; ++j) model.variables.push_back({"u" + idx(j), Kind::Binary, "0", "1"});

    std::string obj = "[ ";
    for (std::size_t j = 0; j < model.m; ++j) obj += (j ? " + 2 f" : "2 f") + idx(j) + " * u" + idx(j);
    model.objective = obj + " ] / 2";

    for (std::size_t j = 0; j < model.m; ++j)
        model.rows.push_back({"rate", "rate_" + idx(j), "[ f" + idx(j) + " * P" + idx(j) + " ] = 1"});
    for (std::size_t i = 0; i < model.n; ++i) {
        std::string lhs;
        for (std::size_t j = 0; j < model.m; ++j) lhs += (j ? " + " : "") + mv(i, j);
        model.rows.push_back({"assign", "assign_" + idx(i), lhs + " = 1"});
    }
    for (std::size_t i = 0; i < model.n; ++i) {
        std::string lhs = "[ ";
        for (std::size_t j = 0; j < model.m; ++j) lhs += (j ? " + d" : "d") + idx(i) + " * " + wv(i, j);
        model.rows.push_back({"divisor", "div_" + idx(i), lhs + " ] = " + std::to_string(problem.periods[i])});
    }
    for (std::size_t i = 0; i < model.n; ++i)
        for (std::size_t j = 0; j < model.m; ++j) {
            const std::string s = idx(i) + "_" + idx(j);
            model.rows.push_back({"wlin", "wm_" + s, wv(i, j) + " - " + big + " " + mv(i, j) + " <= 0"});
            model.rows.push_back({"wlin", "wp_" + s, wv(i, j) + " - P" + idx(j) + " <= 0"});
            model.rows.push_back(
                {"wlin", "wl_" + s, wv(i, j) + " - P" + idx(j) + " - " + big + " " + mv(i, j) + " >= -" + big});
            model.rows.push_back({"wlin", "wz_" + s, wv(i, j) + " >= 0"});
        }
    for (std::size_t j = 0; j < model.m; ++j)
        for (std::size_t i = 0; i < model.n; ++i)
            model.rows.push_back({"or", "orl_" + idx(i) + "_" + idx(j), "u" + idx(j) + " - " + mv(i, j) + " >= 0"});
    for (std::size_t j = 0; j < model.m; ++j) {
        std::string lhs = "u" + idx(j);
        for (std::size_t i = 0; i < model.n; ++i) lhs += " - " + mv(i, j);
        model.rows.push_back({"or", "oru_" + idx(j), lhs + " <= 0"});
    }
    return model;
}

inline void export_miqcp(const OptimizationProblem& problem, const std::string& path) {
    const auto text = build_miqcp(problem).to_lp();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace chronos
