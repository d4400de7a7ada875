#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "commlab/exercise/manifest.hpp"

namespace commlab::exercise {

struct NumericAnswer {
    double value = 0;
    double tolerance = 0;
};
struct ExactAnswer {
    std::string text;  // compared case-folded, outer blanks trimmed
};
struct ChoiceAnswer {
    std::vector<std::string> options;
    std::vector<std::string> correct;  // subset of options
};
using AnswerSpec = std::variant<NumericAnswer, ExactAnswer, ChoiceAnswer>;

struct QuizItem {
    std::string id;
    std::string prompt;
    std::string task;  // optional owning task id
    AnswerSpec answer;
};

struct LabExercise {
    std::string id;
    std::string title;
    int part = 1;
    std::string demo;
    std::vector<std::string> tasks;  // full task ids, in order
};

struct Weights {
    double quiz = 0.2;
    double lab = 0.3;
    double exam = 0.5;
};

struct CourseConfig {
    std::string title;
    std::vector<LabExercise> labs;
    Weights weights;
    double pass_threshold = 0.6;
    std::vector<QuizItem> quizzes;
};

CourseConfig parse_course_config(const nlohmann::ordered_json& j, const std::string& origin);
CourseConfig load_course_config(const std::filesystem::path& course_json);

/// Config plus every manifest it names, loaded from `dir`/labN/taskM.json.
struct Course {
    std::filesystem::path root;
    CourseConfig config;
    std::map<std::string, std::shared_ptr<const TaskManifest>> tasks;

    const TaskManifest* find_task(const std::string& id) const;
    const QuizItem* find_quiz(const std::string& id) const;
};

Course load_course(const std::filesystem::path& dir);

struct TaskSummary {
    std::string id;
    std::string title;
    TaskKind kind = TaskKind::Implementation;
    bool completed = false;  // slot filled in by the service
};

struct LabSummary {
    std::string id;
    std::string title;
    int part = 1;
    std::vector<TaskSummary> tasks;
};

std::vector<LabSummary> list_course(const Course& course);

}  // namespace commlab::exercise
