#pragma once

#include <optional>
#include <string>
#include <vector>

#include "commlab/script/value.hpp"
#include "commlab/script/workspace.hpp"

namespace commlab::grader {

using script::Value;

/// 2^-52, the spacing of doubles at 1.0.
inline constexpr double kMachineEpsilon = 0x1.0p-52;

/// Outcome of one comparison. `specific` marks messages that say more than
/// "variable X is not equal": length/type mismatches, figure stages...
struct Comparison {
    bool pass = true;
    bool specific = false;
    std::string message;
};

/// Short factual rendering used in feedback: first 16 elements plus length.
std::string describe(const Value& v);

/// Identical type, length and elements.
Comparison compare_exact(const std::string& var, const Value& student, const Value& reference);

/// Equal length and max|s - r| <= eps_multiple * eps * max(1, max|r|).
Comparison compare_close(const std::string& var, const Value& student, const Value& reference, double eps_multiple);

/// Equal length and mean((s - r)^2) <= tolerance.
Comparison compare_mse(const std::string& var, const Value& student, const Value& reference, double tolerance);

struct FigureRule {
    int index = 1;              // 1-based figure to compare
    double eps_multiple = 100;  // value stage, unless mse_tolerance is set
    std::optional<double> mse_tolerance;
};

/// Staged: figure count, curve count, points per curve, then values.
Comparison compare_figures(const std::vector<script::FigureData>& student,
                           const std::vector<script::FigureData>& reference, const FigureRule& rule);

}  // namespace commlab::grader
