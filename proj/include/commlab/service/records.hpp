#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "commlab/exercise/course.hpp"
#include "commlab/service/json_io.hpp"

namespace commlab::service {

/// One line of the record log. run/check attempts carry the source; quiz
/// records carry the answer in `source` and the quiz id in `task`; exam
/// records carry the admin-set fraction in `value`.
struct Attempt {
    std::uint64_t id = 0;
    std::string student;
    std::string task;
    std::string kind;  // run | check | quiz | exam
    std::string source;
    std::string timestamp;  // UTC, ISO 8601
    std::string status;     // execution status; empty for quiz/exam
    std::string verdict;    // check: pass/fail/error; quiz: correct/incorrect
    std::string message;    // digest of the headline, at most 200 bytes
    std::uint64_t seed = 0;
    std::uint64_t reference_seed = 0;
    std::optional<double> value;

    friend bool operator==(const Attempt&, const Attempt&) = default;
};

json attempt_to_json(const Attempt& a);
Attempt attempt_from_json(const json& j);  // throws std::invalid_argument

struct AttemptCounts {
    int run = 0;
    int check = 0;
    friend bool operator==(const AttemptCounts&, const AttemptCounts&) = default;
};

/// Everything the log says about one student.
struct StudentState {
    std::map<std::string, std::string> last_source;  // task -> last submitted source
    std::set<std::string> completed;
    std::map<std::string, bool> quiz;  // correct if ever answered correctly
    double exam = 0;
    std::map<std::string, AttemptCounts> attempts;

    friend bool operator==(const StudentState&, const StudentState&) = default;
};

/// Folds one record into the state; the only place state changes.
void apply(StudentState& s, const Attempt& a);

std::map<std::string, StudentState> replay(const std::vector<Attempt>& log);
std::vector<Attempt> read_log(std::istream& in);  // skips blank lines; throws on a bad line

struct ScoreRecord {
    std::string student;
    std::vector<std::pair<std::string, bool>> tasks;    // every course task, in course order
    std::vector<std::pair<std::string, bool>> quizzes;  // every course quiz
    double quiz_fraction = 0;
    double lab_fraction = 0;
    double exam_fraction = 0;
    double cumulative = 0;
    bool eligible = false;  // cumulative > pass threshold

    friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

ScoreRecord compute_score(const exercise::CourseConfig& course, const std::string& student, const StudentState& s);
json score_to_json(const ScoreRecord& r);

struct QuizResult {
    bool correct = false;
    std::string note;  // format hint for malformed answers
};

/// Numeric within tolerance, exact after case folding and trimming, or a
/// choice (a single option, or several separated by commas for multi-answer items).
QuizResult grade_quiz(const exercise::QuizItem& q, const std::string& answer);

}  // namespace commlab::service
