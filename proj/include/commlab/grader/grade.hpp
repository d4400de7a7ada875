#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "commlab/grader/compare.hpp"
#include "commlab/script/ast.hpp"
#include "commlab/script/interpreter.hpp"

namespace commlab::grader {

// ---- check specifications ---------------------------------------------------

struct BannedFunctions {
    std::vector<std::string> names;
};

struct ProtectedInputs {
    std::vector<std::pair<std::string, Value>> required;
};

struct VarExists {
    std::string name;
};

/// A known-wrong solution: when the student's value matches the output of the
/// alternate script, `message` replaces the generic mismatch message.
struct CommonMistake {
    std::string alternate;  // id of an alternate script in the task
    std::string message;
};

struct VarEquals {
    std::string name;
};

struct VarClose {
    std::string name;
    double eps_multiple = 100;
};

struct VarCloseMSE {
    std::string name;
    double mse_tolerance = 0;
};

struct FigureMatch {
    FigureRule rule;
};

struct ProtocolCheck {};

using CheckRule =
    std::variant<BannedFunctions, ProtectedInputs, VarExists, VarEquals, VarClose, VarCloseMSE, FigureMatch, ProtocolCheck>;

struct CheckSpec {
    std::string id;
    CheckRule rule;
    /// Optional task-authored headline with {var} {expected} {observed} {line}
    /// placeholders; the factual detail still follows it.
    std::optional<std::string> message;
    std::vector<CommonMistake> mistakes;  // value checks only
};

std::string_view kind_name(const CheckRule& rule);

/// Everything grade() needs to know about a task.
struct GradingTask {
    std::string id;
    std::shared_ptr<const script::BuiltinRegistry> registry;
    std::string reference_source;
    std::map<std::string, std::string> alternates;  // id -> source
    std::vector<CheckSpec> checks;
    script::ExecLimits limits;
};

// ---- results ----------------------------------------------------------------

enum class Verdict { Pass, Fail, Skipped };
enum class Overall { Pass, Fail, Error };

std::string_view verdict_name(Verdict v);
std::string_view overall_name(Overall o);

struct CheckResult {
    std::string id;
    std::string kind;
    Verdict verdict = Verdict::Skipped;
    std::string message;
    bool specific = false;  // more than a generic "not equal" message
};

struct GradeReport {
    Overall overall = Overall::Fail;
    std::string headline;  // one-line summary for the student
    std::vector<CheckResult> results;
    script::ExecStatus student_status = script::ExecStatus::Ok;
    std::optional<script::ExecError> student_error;
    std::string printed;
    std::size_t figure_count = 0;
    std::uint64_t student_seed = 0;
    std::uint64_t reference_seed = 0;
    std::string internal_error;  // overall == Error only; never the student's fault
};

struct GradeOptions {
    /// Seed of the student's run; the reference and alternates derive from it.
    /// Drawn from entropy when absent.
    std::optional<std::uint64_t> seed;
};

/// Seed used for the reference run; always differs from `student_seed`.
std::uint64_t reference_seed_for(std::uint64_t student_seed);

// ---- operations -------------------------------------------------------------

/// Fails iff a banned name is used in call position; the message cites the line.
CheckResult check_banned(const script::Program& program, const std::vector<std::string>& names);

CheckResult check_protected_inputs(const script::Workspace& ws,
                                   const std::vector<std::pair<std::string, Value>>& required);

/// Renders a protected value the way the do-not-change message shows it.
std::string protected_literal(const Value& v);

/// The full pipeline: parse, banned functions, student run, protected inputs,
/// reference run, ordered checks with common-mistake matching.
GradeReport grade(const GradingTask& task, std::string_view submission, const GradeOptions& options = {});

/// Human-readable report (used by the command line).
std::string render_report(const GradeReport& report);

}  // namespace commlab::grader
