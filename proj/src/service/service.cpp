#include "commlab/service/service.hpp"

#include <chrono>
#include <ctime>

#include "commlab/rng.hpp"

namespace commlab::service {

namespace fs = std::filesystem;

Response error_response(int status, const std::string& message) { return {status, json{{"error", message}}}; }

namespace {

std::string now_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

std::string digest(const std::string& s) {
    if (s.size() <= 200) return s;
    return s.substr(0, 197) + "...";
}

// the student view of a quiz never includes the answer
json quiz_view(const exercise::QuizItem& q) {
    json j{{"id", q.id}, {"prompt", q.prompt}};
    if (std::holds_alternative<exercise::NumericAnswer>(q.answer)) j["type"] = "numeric";
    else if (std::holds_alternative<exercise::ExactAnswer>(q.answer)) j["type"] = "text";
    else {
        j["type"] = "choice";
        j["options"] = std::get<exercise::ChoiceAnswer>(q.answer).options;
    }
    return j;
}

}  // namespace

Service::Service(std::shared_ptr<const exercise::Course> course, ServiceOptions options)
    : course_(std::move(course)), options_(std::move(options)), seed_base_(Rng::entropy_seed()) {
    if (!options_.data_dir) return;
    fs::create_directories(*options_.data_dir);
    const auto path = *options_.data_dir / "records.jsonl";
    if (fs::exists(path)) {
        std::ifstream in(path);
        log_ = read_log(in);
        students_ = replay(log_);
    }
    log_file_.open(path, std::ios::app);
    if (!log_file_) throw std::runtime_error("cannot open record log " + path.string());
}

std::uint64_t Service::fresh_seed() { return mix_seed(seed_base_ + seed_counter_.fetch_add(1)); }

std::variant<Service::Submission, Response> Service::parse_submission(const json& body) const {
    if (!body.is_object()) return error_response(422, "expected a JSON object");
    for (const char* key : {"student", "task", "source"})
        if (!body.contains(key) || !body[key].is_string())
            return error_response(422, std::string("missing or non-string field '") + key + "'");
    Submission s;
    s.student = body["student"].get<std::string>();
    if (s.student.empty()) return error_response(422, "field 'student' is empty");
    s.source = body["source"].get<std::string>();
    if (s.source.size() > options_.max_source_bytes)
        return error_response(413, "source is " + std::to_string(s.source.size()) + " bytes; the limit is " +
                                       std::to_string(options_.max_source_bytes));
    if (body.contains("seed")) {
        if (!body["seed"].is_number_unsigned()) return error_response(422, "field 'seed' must be a nonnegative integer");
        s.seed = body["seed"].get<std::uint64_t>();
    }
    s.task = course_->find_task(body["task"].get<std::string>());
    if (!s.task) return error_response(404, "unknown task '" + body["task"].get<std::string>() + "'");
    return s;
}

void Service::record(Attempt a) {
    std::lock_guard lock(mu_);
    a.id = log_.size() + 1;
    a.timestamp = now_utc();
    // the in-memory copy must equal what a replay of the file will read back
    const auto line = to_text(attempt_to_json(a));
    a = attempt_from_json(json::parse(line));
    if (log_file_.is_open()) {
        log_file_ << line << '\n';
        log_file_.flush();
    }
    apply(students_[a.student], a);
    log_.push_back(std::move(a));
    write_snapshot_locked();
}

void Service::write_snapshot_locked() const {
    if (!options_.data_dir) return;
    json snap = json::object();
    for (const auto& [id, st] : students_) snap[id] = score_to_json(compute_score(course_->config, id, st));
    const auto tmp = *options_.data_dir / "scores.json.tmp";
    {
        std::ofstream out(tmp);
        out << to_text(snap, 2) << '\n';
    }
    fs::rename(tmp, *options_.data_dir / "scores.json");
}

Response Service::get_course(const std::string& student) const {
    StudentState st;
    {
        std::lock_guard lock(mu_);
        if (auto it = students_.find(student); it != students_.end()) st = it->second;
    }
    const auto& cfg = course_->config;
    json labs = json::array();
    for (const auto& lab : exercise::list_course(*course_)) {
        json tasks = json::array();
        for (const auto& t : lab.tasks)
            tasks.push_back({{"id", t.id},
                             {"title", t.title},
                             {"kind", std::string(exercise::kind_name(t.kind))},
                             {"completed", st.completed.contains(t.id)}});
        std::string demo;
        for (const auto& l : cfg.labs)
            if (l.id == lab.id) demo = l.demo;
        labs.push_back({{"id", lab.id}, {"title", lab.title}, {"part", lab.part}, {"demo", demo}, {"tasks", tasks}});
    }
    return {200,
            {{"title", cfg.title},
             {"weights", {{"quiz", cfg.weights.quiz}, {"lab", cfg.weights.lab}, {"exam", cfg.weights.exam}}},
             {"pass_threshold", cfg.pass_threshold},
             {"labs", std::move(labs)}}};
}

Response Service::get_task(const std::string& lab, const std::string& task, const std::string& student) const {
    const auto id = lab + "/" + task;
    const auto* m = course_->find_task(id);
    if (!m) return error_response(404, "unknown task '" + id + "'");
    std::optional<std::string> saved;
    bool completed = false;
    AttemptCounts counts;
    {
        std::lock_guard lock(mu_);
        if (auto it = students_.find(student); it != students_.end()) {
            if (auto s = it->second.last_source.find(id); s != it->second.last_source.end()) saved = s->second;
            completed = it->second.completed.contains(id);
            if (auto a = it->second.attempts.find(id); a != it->second.attempts.end()) counts = a->second;
        }
    }
    json quizzes = json::array();
    for (const auto& q : m->quizzes)
        if (const auto* item = course_->find_quiz(q)) quizzes.push_back(quiz_view(*item));
    return {200,
            {{"id", m->id},
             {"title", m->title},
             {"kind", std::string(exercise::kind_name(m->kind))},
             {"instructions", m->instructions},
             {"source", saved ? *saved : m->starter},
             {"saved", saved.has_value()},
             {"completed", completed},
             {"attempts", {{"run", counts.run}, {"check", counts.check}}},
             {"quizzes", std::move(quizzes)}}};
}

Response Service::post_run(const json& body) {
    auto parsed = parse_submission(body);
    if (auto* r = std::get_if<Response>(&parsed)) return *r;
    auto& sub = std::get<Submission>(parsed);
    auto limits = sub.task->limits;
    if (options_.max_steps) limits.max_steps = *options_.max_steps;
    limits.seed = sub.seed ? *sub.seed : fresh_seed();
    auto out = script::run_source(sub.source, *sub.task->registry, limits);

    Attempt a;
    a.student = sub.student;
    a.task = sub.task->id;
    a.kind = "run";
    a.source = sub.source;
    a.status = std::string(script::status_name(out.status));
    a.message = out.error ? digest(out.error->describe()) : "";
    a.seed = out.seed;
    record(std::move(a));

    auto j = outcome_to_json(out);
    j["task"] = sub.task->id;
    return {200, std::move(j)};
}

Response Service::post_check(const json& body) {
    auto parsed = parse_submission(body);
    if (auto* r = std::get_if<Response>(&parsed)) return *r;
    auto& sub = std::get<Submission>(parsed);
    auto task = sub.task->grading_task();
    if (options_.max_steps) task.limits.max_steps = *options_.max_steps;
    const auto report = grader::grade(task, sub.source, {.seed = sub.seed ? *sub.seed : fresh_seed()});

    Attempt a;
    a.student = sub.student;
    a.task = sub.task->id;
    a.kind = "check";
    a.source = sub.source;
    a.status = std::string(script::status_name(report.student_status));
    a.verdict = std::string(grader::overall_name(report.overall));
    a.message = digest(report.headline);
    a.seed = report.student_seed;
    a.reference_seed = report.reference_seed;
    record(std::move(a));

    auto j = grade_report_to_json(report);
    j["task"] = sub.task->id;
    {
        std::lock_guard lock(mu_);
        const auto& st = students_[sub.student];
        j["completed"] = st.completed.contains(sub.task->id);
        j["attempts"] = st.attempts.at(sub.task->id).check;
    }
    return {200, std::move(j)};
}

Response Service::post_quiz(const std::string& quiz, const json& body) {
    const auto* q = course_->find_quiz(quiz);
    if (!q) return error_response(404, "unknown quiz '" + quiz + "'");
    if (!body.is_object() || !body.contains("student") || !body["student"].is_string() ||
        body["student"].get<std::string>().empty())
        return error_response(422, "missing or non-string field 'student'");
    if (!body.contains("answer")) return error_response(422, "missing field 'answer'");
    std::string answer;
    if (body["answer"].is_string()) answer = body["answer"].get<std::string>();
    else if (body["answer"].is_number()) answer = body["answer"].dump();
    else if (body["answer"].is_array()) {
        for (const auto& x : body["answer"]) answer += (answer.empty() ? "" : ",") + (x.is_string() ? x.get<std::string>() : x.dump());
    } else answer = body["answer"].dump();
    if (answer.size() > options_.max_source_bytes) return error_response(413, "answer too large");

    const auto res = grade_quiz(*q, answer);
    Attempt a;
    a.student = body["student"].get<std::string>();
    a.task = q->id;
    a.kind = "quiz";
    a.source = answer;
    a.verdict = res.correct ? "correct" : "incorrect";
    record(std::move(a));

    json j{{"quiz", q->id}, {"correct", res.correct}};
    if (!res.note.empty()) j["note"] = res.note;
    return {200, std::move(j)};
}

std::optional<ScoreRecord> Service::score(const std::string& student) const {
    std::lock_guard lock(mu_);
    auto it = students_.find(student);
    if (it == students_.end()) return std::nullopt;
    return compute_score(course_->config, student, it->second);
}

std::map<std::string, ScoreRecord> Service::scores() const {
    std::lock_guard lock(mu_);
    std::map<std::string, ScoreRecord> out;
    for (const auto& [id, st] : students_) out.emplace(id, compute_score(course_->config, id, st));
    return out;
}

std::vector<Attempt> Service::log() const {
    std::lock_guard lock(mu_);
    return log_;
}

Response Service::get_progress(const std::string& student) const {
    auto s = score(student);
    if (!s) return error_response(404, "unknown student '" + student + "'");
    return {200, score_to_json(*s)};
}

Response Service::post_exam(const json& body, const std::string& admin_token) {
    if (options_.admin_token.empty() || admin_token != options_.admin_token)
        return error_response(403, "admin token required");
    if (!body.is_object() || !body.contains("student") || !body["student"].is_string() ||
        body["student"].get<std::string>().empty())
        return error_response(422, "missing or non-string field 'student'");
    if (!body.contains("fraction") || !body["fraction"].is_number())
        return error_response(422, "missing or non-numeric field 'fraction'");
    const double f = body["fraction"].get<double>();
    if (!(f >= 0 && f <= 1)) return error_response(422, "'fraction' must lie in [0, 1]");
    Attempt a;
    a.student = body["student"].get<std::string>();
    a.kind = "exam";
    a.value = f;
    const auto student = a.student;
    record(std::move(a));
    return get_progress(student);
}

}  // namespace commlab::service
