#include "commlab/cli/commands.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commlab/exercise/course.hpp"
#include "commlab/service/http.hpp"
#include "commlab/service/json_io.hpp"

namespace commlab::cli {

namespace fs = std::filesystem;
using service::json;

namespace {

std::string num(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

std::string row(const char* tag, const std::vector<double>& xs) {
    std::string s = tag;
    for (double x : xs) s += ' ' + num(x);
    return s;
}

std::optional<std::string> read_file(const fs::path& p, std::ostream& err) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        err << "error: cannot read " << p.string() << "\n";
        return std::nullopt;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<exercise::TaskManifest> read_task(const fs::path& p, std::ostream& err) {
    try {
        return exercise::load_manifest(p);
    } catch (const exercise::ManifestError& e) {
        err << "error: " << e.what() << "\n";
    }
    return std::nullopt;
}

}  // namespace

std::string dump_figures(const std::vector<script::FigureData>& figs) {
    std::string s;
    for (const auto& f : figs) {
        int k = 0;
        for (const auto& c : f.curves) {
            ++k;
            s += "figure " + std::to_string(f.index);
            if (f.title) s += " \"" + *f.title + "\"";
            s += " curve " + std::to_string(k) + "\n";
            s += "label " + (c.label ? *c.label : std::string("-")) + "\n";
            s += row("x", c.x) + "\n" + row("y", c.y) + "\n\n";
        }
    }
    return s;
}

std::string dump_workspace(const script::Workspace& ws) {
    std::string s;
    for (const auto& [name, v] : ws) {
        if (script::is_reserved_name(name)) continue;
        s += name + " = " + script::summarize(v, 16) + "\n";
    }
    return s;
}

int cmd_validate(const fs::path& dir, const CommonFlags& f, std::ostream& out, std::ostream& err) {
    if (!fs::is_regular_file(dir / "course.json")) {
        err << "error: no course found in " << dir.string() << " (course.json is missing)\n";
        return 1;
    }
    exercise::Course course;
    try {
        course = exercise::load_course(dir);
    } catch (const exercise::ManifestError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    bool ok = true;
    json all = json::array();
    for (const auto& lab : course.config.labs)
        for (const auto& id : lab.tasks) {
            const auto report = exercise::validate_manifest(*course.find_task(id), f.seed.value_or(1));
            ok = ok && report.ok();
            if (f.json) all.push_back(service::validation_to_json(report));
            else out << report.render();
        }
    if (f.json) out << service::to_text(json{{"valid", ok}, {"tasks", all}}, 2) << "\n";
    else out << (ok ? "all tasks valid\n" : "validation FAILED\n");
    return ok ? 0 : 1;
}

int cmd_run(const fs::path& task_file, const fs::path& script_file, const CommonFlags& f, std::ostream& out,
            std::ostream& err) {
    auto m = read_task(task_file, err);
    auto src = read_file(script_file, err);
    if (!m || !src) return 2;
    auto limits = m->limits;
    if (f.seed) limits.seed = *f.seed;
    const auto res = script::run_source(*src, *m->registry, limits);
    if (f.json) {
        out << service::to_text(service::outcome_to_json(res), 2) << "\n";
        return res.ok() ? 0 : 1;
    }
    out << res.printed;
    if (!res.printed.empty() && res.printed.back() != '\n') out << "\n";
    out << "--- figures (" << res.figures.size() << ")\n" << dump_figures(res.figures);
    out << "--- workspace\n" << dump_workspace(res.workspace);
    out << "--- status " << script::status_name(res.status) << ", seed " << res.seed << ", steps " << res.steps << "\n";
    if (res.error) {
        err << script_file.string() << ": " << (res.error->syntax ? "syntax error, " : "") << res.error->describe() << "\n";
        return 1;
    }
    return res.ok() ? 0 : 1;
}

int cmd_check(const fs::path& task_file, const fs::path& script_file, const CommonFlags& f, std::ostream& out,
              std::ostream& err) {
    auto m = read_task(task_file, err);
    auto src = read_file(script_file, err);
    if (!m || !src) return 2;
    const auto report = grader::grade(m->grading_task(), *src, {.seed = f.seed});
    if (f.json) out << service::to_text(service::grade_report_to_json(report), 2) << "\n";
    else out << grader::render_report(report);
    return report.overall == grader::Overall::Pass ? 0 : 1;
}

int cmd_serve(const fs::path& config_file, std::ostream& out, std::ostream& err) {
    service::ServerConfig cfg;
    try {
        cfg = service::load_server_config(config_file);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    if (!fs::is_regular_file(cfg.course / "course.json")) {
        err << "error: no course found at " << cfg.course.string() << "\n";
        return 1;
    }
    std::shared_ptr<const exercise::Course> course;
    std::unique_ptr<service::Service> svc;
    try {
        course = std::make_shared<const exercise::Course>(exercise::load_course(cfg.course));
        svc = std::make_unique<service::Service>(course, cfg.options);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    service::HttpServer server(*svc);
    const int port = server.bind(cfg.host, cfg.port);
    if (port < 0) {
        err << "error: cannot listen on " << cfg.host << ":" << cfg.port << "\n";
        return 1;
    }
    out << "commlab listening on http://" << cfg.host << ":" << port << "/api/v1 (" << course->tasks.size()
        << " tasks from " << cfg.course.string() << ")" << std::endl;
    server.listen();
    return 0;
}

int main_entry(int argc, char** argv) {
    CLI::App app{"commlab: course tooling for the communication-systems labs"};
    app.require_subcommand(1);
    CommonFlags flags;
    std::uint64_t seed = 0;
    std::string course_dir, task_file, script_file, config_file;

    auto add_common = [&](CLI::App* sub, bool with_seed) {
        if (with_seed) sub->add_option("--seed", seed, "RNG seed (default: entropy)");
        sub->add_flag("--json", flags.json, "machine-readable output");
    };
    auto* validate = app.add_subcommand("validate", "check every task of a course against the authoring rules");
    validate->add_option("course-dir", course_dir)->required();
    add_common(validate, true);

    auto* run = app.add_subcommand("run", "execute a script under a task's builtins and limits");
    run->add_option("task-file", task_file)->required();
    run->add_option("script-file", script_file)->required();
    add_common(run, true);

    auto* check = app.add_subcommand("check", "grade a script; exit 0 iff it passes");
    check->add_option("task-file", task_file)->required();
    check->add_option("script-file", script_file)->required();
    add_common(check, true);

    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    serve->add_option("--config", config_file, "JSON config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    for (auto* sub : {validate, run, check})
        if (sub->parsed() && sub->count("--seed")) flags.seed = seed;

    if (validate->parsed()) return cmd_validate(course_dir, flags, std::cout, std::cerr);
    if (run->parsed()) return cmd_run(task_file, script_file, flags, std::cout, std::cerr);
    if (check->parsed()) return cmd_check(task_file, script_file, flags, std::cout, std::cerr);
    return cmd_serve(config_file, std::cout, std::cerr);
}

}  // namespace commlab::cli
