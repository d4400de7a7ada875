#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "commlab/script/ast.hpp"
#include "commlab/script/registry.hpp"
#include "commlab/script/workspace.hpp"

namespace commlab::script {

struct ExecLimits {
    std::uint64_t max_steps = 5'000'000;
    std::size_t max_vector_length = 1'000'000;
    std::size_t max_figures = 16;
    std::size_t max_output_bytes = 1 << 20;
    std::optional<std::uint64_t> seed;  // entropy when absent
};

enum class ExecStatus { Ok, ScriptError, ResourceExceeded };

std::string_view status_name(ExecStatus s);

struct ExecError {
    std::string message;
    SourcePos pos;
    bool syntax = false;

    /// "line L, column C: message" (or just the message when no position is known).
    std::string describe() const;
};

struct ExecOutcome {
    ExecStatus status = ExecStatus::Ok;
    Workspace workspace;  // includes hidden `__` names written by builtins
    std::vector<FigureData> figures;
    std::string printed;
    std::optional<ExecError> error;
    std::uint64_t steps = 0;
    std::uint64_t seed = 0;

    bool ok() const { return status == ExecStatus::Ok; }
};

/// Runs a parsed program in a fresh, isolated interpreter.
///
/// Deterministic for a fixed (program, registry, limits.seed). Every statement
/// and every evaluated expression node costs one step; hitting any cap stops
/// execution with ResourceExceeded and keeps the partial workspace.
ExecOutcome execute(const Program& program, const BuiltinRegistry& builtins, const ExecLimits& limits);

/// Parses and runs `source`. Lexical and syntax errors come back as a
/// ScriptError outcome with an empty workspace.
ExecOutcome run_source(std::string_view source, const BuiltinRegistry& builtins, const ExecLimits& limits);

}  // namespace commlab::script
