#include "commlab/exercise/course.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace commlab::exercise {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& origin, const std::string& field, const std::string& what) {
    throw ManifestError(origin, field, what);
}

std::string need_str(const json& obj, const std::string& origin, const std::string& at, const char* key) {
    auto it = obj.find(key);
    const auto field = at.empty() ? std::string(key) : at + "/" + key;
    if (it == obj.end()) bad(origin, field, "required field is missing");
    if (!it->is_string()) bad(origin, field, "expected a string");
    return it->get<std::string>();
}

double get_num(const json& v, const std::string& origin, const std::string& field) {
    if (!v.is_number()) bad(origin, field, "expected a number");
    return v.get<double>();
}

AnswerSpec parse_answer(const json& a, const std::string& origin, const std::string& at) {
    if (!a.is_object()) bad(origin, at, "expected an object");
    const auto type = need_str(a, origin, at, "type");
    if (type == "numeric") {
        if (!a.contains("value")) bad(origin, at + "/value", "required field is missing");
        NumericAnswer n{get_num(a["value"], origin, at + "/value"),
                        a.contains("tolerance") ? get_num(a["tolerance"], origin, at + "/tolerance") : 0.0};
        if (!(n.tolerance >= 0)) bad(origin, at + "/tolerance", "must be nonnegative");
        return n;
    }
    if (type == "exact") return ExactAnswer{need_str(a, origin, at, "text")};
    if (type == "choice") {
        ChoiceAnswer c;
        for (const char* key : {"options", "correct"}) {
            const auto field = at + "/" + key;
            if (!a.contains(key) || !a[key].is_array()) bad(origin, field, "expected an array of strings");
            for (const auto& s : a[key]) {
                if (!s.is_string()) bad(origin, field, "expected an array of strings");
                (key[0] == 'o' ? c.options : c.correct).push_back(s.get<std::string>());
            }
        }
        if (c.correct.empty()) bad(origin, at + "/correct", "at least one option must be correct");
        for (const auto& s : c.correct)
            if (std::find(c.options.begin(), c.options.end(), s) == c.options.end())
                bad(origin, at + "/correct", "'" + s + "' is not one of the options");
        return c;
    }
    bad(origin, at + "/type", "expected numeric, exact or choice");
}

}  // namespace

CourseConfig parse_course_config(const json& j, const std::string& origin) {
    if (!j.is_object()) bad(origin, "", "expected a JSON object");
    for (const auto& [k, _] : j.items())
        if (k != "title" && k != "labs" && k != "weights" && k != "pass_threshold" && k != "quizzes")
            bad(origin, k, "unknown field");
    CourseConfig c;
    if (j.contains("title")) c.title = need_str(j, origin, "", "title");
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        if (!w.is_object()) bad(origin, "weights", "expected an object");
        for (const auto& [k, v] : w.items()) {
            const double x = get_num(v, origin, "weights/" + k);
            if (!(x >= 0)) bad(origin, "weights/" + k, "must be nonnegative");
            if (k == "quiz") c.weights.quiz = x;
            else if (k == "lab") c.weights.lab = x;
            else if (k == "exam") c.weights.exam = x;
            else bad(origin, "weights/" + k, "unknown field");
        }
        if (std::abs(c.weights.quiz + c.weights.lab + c.weights.exam - 1.0) > 1e-9)
            bad(origin, "weights", "weights must sum to 1");
    }
    if (j.contains("pass_threshold")) {
        c.pass_threshold = get_num(j["pass_threshold"], origin, "pass_threshold");
        if (!(c.pass_threshold > 0 && c.pass_threshold < 1)) bad(origin, "pass_threshold", "must lie in (0, 1)");
    }

    std::set<std::string> seen;
    if (j.contains("labs")) {
        const auto& labs = j["labs"];
        if (!labs.is_array()) bad(origin, "labs", "expected an array");
        for (std::size_t i = 0; i < labs.size(); ++i) {
            const auto at = "labs/" + std::to_string(i);
            const auto& l = labs[i];
            if (!l.is_object()) bad(origin, at, "expected an object");
            LabExercise lab;
            lab.id = need_str(l, origin, at, "id");
            lab.title = need_str(l, origin, at, "title");
            if (l.contains("demo")) lab.demo = need_str(l, origin, at, "demo");
            if (l.contains("part")) lab.part = static_cast<int>(get_num(l["part"], origin, at + "/part"));
            if (!l.contains("tasks") || !l["tasks"].is_array()) bad(origin, at + "/tasks", "expected an array");
            for (const auto& t : l["tasks"]) {
                if (!t.is_string()) bad(origin, at + "/tasks", "expected task names");
                const auto id = lab.id + "/" + t.get<std::string>();
                if (!seen.insert(id).second) bad(origin, at + "/tasks", "duplicate task " + id);
                lab.tasks.push_back(id);
            }
            c.labs.push_back(std::move(lab));
        }
    }
    if (j.contains("quizzes")) {
        const auto& qs = j["quizzes"];
        if (!qs.is_array()) bad(origin, "quizzes", "expected an array");
        std::set<std::string> ids;
        for (std::size_t i = 0; i < qs.size(); ++i) {
            const auto at = "quizzes/" + std::to_string(i);
            if (!qs[i].is_object()) bad(origin, at, "expected an object");
            QuizItem q;
            q.id = need_str(qs[i], origin, at, "id");
            if (!ids.insert(q.id).second) bad(origin, at + "/id", "duplicate quiz id " + q.id);
            q.prompt = need_str(qs[i], origin, at, "prompt");
            if (qs[i].contains("task")) q.task = need_str(qs[i], origin, at, "task");
            if (!qs[i].contains("answer")) bad(origin, at + "/answer", "required field is missing");
            q.answer = parse_answer(qs[i]["answer"], origin, at + "/answer");
            c.quizzes.push_back(std::move(q));
        }
    }
    return c;
}

CourseConfig load_course_config(const std::filesystem::path& course_json) {
    std::ifstream in(course_json, std::ios::binary);
    if (!in) throw ManifestError(course_json.string(), "", "cannot open course file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ManifestError(course_json.string(), "", std::string("invalid JSON: ") + e.what());
    }
    return parse_course_config(j, course_json.string());
}

Course load_course(const std::filesystem::path& dir) {
    Course c;
    c.root = dir;
    const auto file = dir / "course.json";
    c.config = load_course_config(file);
    for (const auto& lab : c.config.labs)
        for (const auto& id : lab.tasks) {
            auto m = load_manifest(dir / (id + ".json"));
            if (m.id != id) throw ManifestError((dir / (id + ".json")).string(), "id", "expected '" + id + "'");
            c.tasks.emplace(id, std::make_shared<const TaskManifest>(std::move(m)));
        }
    for (const auto& q : c.config.quizzes)
        if (!q.task.empty() && !c.tasks.contains(q.task))
            throw ManifestError(file.string(), "quizzes", "quiz " + q.id + " names unknown task " + q.task);
    for (const auto& [id, m] : c.tasks)
        for (const auto& q : m->quizzes)
            if (!c.find_quiz(q)) throw ManifestError(id, "quizzes", "unknown quiz " + q);
    return c;
}

const TaskManifest* Course::find_task(const std::string& id) const {
    auto it = tasks.find(id);
    return it == tasks.end() ? nullptr : it->second.get();
}

const QuizItem* Course::find_quiz(const std::string& id) const {
    for (const auto& q : config.quizzes)
        if (q.id == id) return &q;
    return nullptr;
}

std::vector<LabSummary> list_course(const Course& course) {
    std::vector<LabSummary> out;
    for (const auto& lab : course.config.labs) {
        LabSummary s{lab.id, lab.title, lab.part, {}};
        for (const auto& id : lab.tasks) {
            const auto* m = course.find_task(id);
            s.tasks.push_back({id, m ? m->title : id, m ? m->kind : TaskKind::Implementation, false});
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace commlab::exercise
