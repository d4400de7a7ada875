#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "commlab/grader/grade.hpp"

namespace commlab::exercise {

enum class TaskKind { Overview, Implementation, Evaluation };

std::string_view kind_name(TaskKind k);

/// Schema violation; `field` is a JSON-pointer-like path ("checks/2/var").
class ManifestError : public std::runtime_error {
public:
    ManifestError(std::string origin, std::string field, const std::string& what);
    const std::string& origin() const { return origin_; }
    const std::string& field() const { return field_; }

private:
    std::string origin_;
    std::string field_;
};

struct TaskManifest {
    std::string id;  // "lab1/task2"
    std::string title;
    TaskKind kind = TaskKind::Implementation;
    std::string profile;
    std::string instructions;
    std::string starter;
    std::string reference;
    std::map<std::string, std::string> alternates;
    std::vector<std::string> banned;
    std::vector<std::pair<std::string, script::Value>> protected_inputs;
    std::vector<grader::CheckSpec> checks;  // full order, banned/protected first
    std::vector<std::string> quizzes;
    script::ExecLimits limits;
    std::shared_ptr<const script::BuiltinRegistry> registry;

    grader::GradingTask grading_task() const;
};

/// `base` resolves script file names; `origin` names the source in errors.
TaskManifest parse_manifest(const nlohmann::ordered_json& j, const std::filesystem::path& base, const std::string& origin);
TaskManifest load_manifest(const std::filesystem::path& path);

struct RuleOutcome {
    std::string rule;
    bool ok = true;
    std::string detail;
};

struct ValidationReport {
    std::string task;
    std::vector<RuleOutcome> rules;
    bool ok() const;
    std::string render() const;
};

/// Machine checks for the authoring rules. Grades run with seeds
/// first_seed .. first_seed + runs - 1.
ValidationReport validate_manifest(const TaskManifest& m, std::uint64_t first_seed = 1, int runs = 3);

/// Non-blank, non-comment lines of the reference missing from the starter
/// (multiset difference on trimmed lines).
std::size_t line_delta(const TaskManifest& m);

}  // namespace commlab::exercise
