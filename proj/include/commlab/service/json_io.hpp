#pragma once

#include <json.hpp>

#include "commlab/exercise/course.hpp"
#include "commlab/grader/grade.hpp"
#include "commlab/script/interpreter.hpp"

namespace commlab::service {

using json = nlohmann::json;

/// Serializes with invalid UTF-8 replaced by U+FFFD; scripts can build
/// arbitrary byte strings (char() of any code) and those must not abort a response.
std::string to_text(const json& j, int indent = -1);

/// Numbers and vectors become JSON numbers/arrays, strings stay strings,
/// lists become {"list": [...]}.
json value_to_json(const script::Value& v);

json figure_to_json(const script::FigureData& f);
json figures_to_json(const std::vector<script::FigureData>& figs);

/// One entry per visible variable: name, type, length, summary.
json workspace_summary(const script::Workspace& ws);

json error_to_json(const script::ExecError& e);

/// Run payload: status, printed, figures, workspace, error, seed.
json outcome_to_json(const script::ExecOutcome& out);

json grade_report_to_json(const grader::GradeReport& r);

json validation_to_json(const exercise::ValidationReport& r);

}  // namespace commlab::service
