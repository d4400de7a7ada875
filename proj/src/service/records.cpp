#include "commlab/service/records.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <stdexcept>

namespace commlab::service {

json attempt_to_json(const Attempt& a) {
    json j{{"id", a.id},           {"student", a.student}, {"task", a.task},       {"kind", a.kind},
           {"source", a.source},   {"timestamp", a.timestamp}, {"status", a.status}, {"verdict", a.verdict},
           {"message", a.message}, {"seed", a.seed},       {"reference_seed", a.reference_seed}};
    j["value"] = a.value ? json(*a.value) : json(nullptr);
    return j;
}

Attempt attempt_from_json(const json& j) {
    try {
        Attempt a;
        a.id = j.at("id").get<std::uint64_t>();
        a.student = j.at("student").get<std::string>();
        a.task = j.at("task").get<std::string>();
        a.kind = j.at("kind").get<std::string>();
        a.source = j.at("source").get<std::string>();
        a.timestamp = j.at("timestamp").get<std::string>();
        a.status = j.at("status").get<std::string>();
        a.verdict = j.at("verdict").get<std::string>();
        a.message = j.at("message").get<std::string>();
        a.seed = j.at("seed").get<std::uint64_t>();
        a.reference_seed = j.at("reference_seed").get<std::uint64_t>();
        if (j.contains("value") && !j["value"].is_null()) a.value = j["value"].get<double>();
        if (a.kind != "run" && a.kind != "check" && a.kind != "quiz" && a.kind != "exam")
            throw std::invalid_argument("unknown record kind '" + a.kind + "'");
        if (a.kind == "check" && a.verdict.empty()) throw std::invalid_argument("check record without a verdict");
        return a;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad record: ") + e.what());
    }
}

void apply(StudentState& s, const Attempt& a) {
    if (a.kind == "run" || a.kind == "check") {
        s.last_source[a.task] = a.source;
        auto& n = s.attempts[a.task];
        if (a.kind == "run") ++n.run;
        else ++n.check;
        if (a.kind == "check" && a.verdict == "pass") s.completed.insert(a.task);
    } else if (a.kind == "quiz") {
        auto& q = s.quiz[a.task];
        q = q || a.verdict == "correct";
    } else if (a.kind == "exam") {
        s.exam = a.value.value_or(0);
    }
}

std::map<std::string, StudentState> replay(const std::vector<Attempt>& log) {
    std::map<std::string, StudentState> out;
    for (const auto& a : log) apply(out[a.student], a);
    return out;
}

std::vector<Attempt> read_log(std::istream& in) {
    std::vector<Attempt> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(attempt_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::invalid_argument("record log line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

ScoreRecord compute_score(const exercise::CourseConfig& course, const std::string& student, const StudentState& s) {
    ScoreRecord r;
    r.student = student;
    std::size_t done = 0, right = 0;
    for (const auto& lab : course.labs)
        for (const auto& t : lab.tasks) {
            const bool c = s.completed.contains(t);
            done += c;
            r.tasks.emplace_back(t, c);
        }
    for (const auto& q : course.quizzes) {
        auto it = s.quiz.find(q.id);
        const bool c = it != s.quiz.end() && it->second;
        right += c;
        r.quizzes.emplace_back(q.id, c);
    }
    r.lab_fraction = r.tasks.empty() ? 0 : static_cast<double>(done) / static_cast<double>(r.tasks.size());
    r.quiz_fraction = r.quizzes.empty() ? 0 : static_cast<double>(right) / static_cast<double>(r.quizzes.size());
    r.exam_fraction = s.exam;
    r.cumulative = course.weights.quiz * r.quiz_fraction + course.weights.lab * r.lab_fraction +
                   course.weights.exam * r.exam_fraction;
    r.cumulative = std::clamp(r.cumulative, 0.0, 1.0);
    r.eligible = r.cumulative > course.pass_threshold;
    return r;
}

json score_to_json(const ScoreRecord& r) {
    json tasks = json::object(), quizzes = json::object();
    for (const auto& [id, c] : r.tasks) tasks[id] = c;
    for (const auto& [id, c] : r.quizzes) quizzes[id] = c;
    return {{"student", r.student},
            {"tasks", std::move(tasks)},
            {"quizzes", std::move(quizzes)},
            {"quiz_fraction", r.quiz_fraction},
            {"lab_fraction", r.lab_fraction},
            {"exam_fraction", r.exam_fraction},
            {"cumulative", r.cumulative},
            {"eligible", r.eligible}};
}

namespace {

std::string fold(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    std::string out(s.substr(b, e - b + 1));
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto at = s.find(',', start);
        out.push_back(fold(s.substr(start, at == std::string::npos ? std::string::npos : at - start)));
        if (at == std::string::npos) break;
        start = at + 1;
    }
    return out;
}

}  // namespace

QuizResult grade_quiz(const exercise::QuizItem& q, const std::string& answer) {
    if (const auto* n = std::get_if<exercise::NumericAnswer>(&q.answer)) {
        const auto text = fold(answer);
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (text.empty() || used != text.size() || !std::isfinite(x))
            return {false, "The answer must be a single number, for example 0.25."};
        // a little slack so decimal answers on the tolerance edge are not lost to rounding
        return {std::abs(x - n->value) <= n->tolerance + 1e-12 * std::max(1.0, std::abs(n->value)), ""};
    }
    if (const auto* e = std::get_if<exercise::ExactAnswer>(&q.answer)) return {fold(answer) == fold(e->text), ""};

    const auto& c = std::get<exercise::ChoiceAnswer>(q.answer);
    std::set<std::string> options, correct, given;
    for (const auto& o : c.options) options.insert(fold(o));
    for (const auto& o : c.correct) correct.insert(fold(o));
    for (const auto& g : split_commas(answer)) {
        if (!options.contains(g)) {
            std::string list;
            for (const auto& o : c.options) list += (list.empty() ? "" : ", ") + o;
            return {false, "Choose one of: " + list + "."};
        }
        given.insert(g);
    }
    return {given == correct, ""};
}

}  // namespace commlab::service
