#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>

#include "commlab/exercise/course.hpp"
#include "commlab/service/records.hpp"

namespace commlab::service {

struct ServiceOptions {
    std::size_t max_source_bytes = 64 * 1024;
    std::optional<std::uint64_t> max_steps;  // overrides the task's limit when set
    std::optional<std::filesystem::path> data_dir;  // records.jsonl + scores.json; in memory when absent
    std::string admin_token;  // empty: admin endpoints refuse every request
};

struct Response {
    int status = 200;
    json body;
};

/// The HTTP API without the transport. Every handler is safe to call from
/// many threads at once: executions and grades run outside the lock in
/// isolated interpreters; the record log has a single writer.
class Service {
public:
    Service(std::shared_ptr<const exercise::Course> course, ServiceOptions options = {});

    Response get_course(const std::string& student) const;
    Response get_task(const std::string& lab, const std::string& task, const std::string& student) const;
    Response post_run(const json& body);
    Response post_check(const json& body);
    Response post_quiz(const std::string& quiz, const json& body);
    Response get_progress(const std::string& student) const;
    Response post_exam(const json& body, const std::string& admin_token);

    std::optional<ScoreRecord> score(const std::string& student) const;
    std::map<std::string, ScoreRecord> scores() const;
    std::vector<Attempt> log() const;
    const exercise::Course& course() const { return *course_; }
    std::size_t max_source_bytes() const { return options_.max_source_bytes; }

private:
    struct Submission {
        std::string student;
        const exercise::TaskManifest* task = nullptr;
        std::string source;
        std::optional<std::uint64_t> seed;
    };
    std::variant<Submission, Response> parse_submission(const json& body) const;
    std::uint64_t fresh_seed();
    void record(Attempt a);  // stamps id and time, appends, applies, snapshots
    void write_snapshot_locked() const;

    std::shared_ptr<const exercise::Course> course_;
    ServiceOptions options_;
    mutable std::mutex mu_;
    std::map<std::string, StudentState> students_;
    std::vector<Attempt> log_;
    std::ofstream log_file_;
    std::atomic<std::uint64_t> seed_counter_{0};
    std::uint64_t seed_base_;
};

Response error_response(int status, const std::string& message);

}  // namespace commlab::service
