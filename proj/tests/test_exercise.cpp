#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "commlab/exercise/course.hpp"

using namespace commlab;
using namespace commlab::exercise;
namespace fs = std::filesystem;

namespace {

const fs::path kCourse = COMMLAB_COURSE_DIR;

const Course& course() {
    static const Course c = load_course(kCourse);
    return c;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("commlab-ex-" + std::to_string(std::rand()) + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    void write(const std::string& name, const std::string& text) const {
        fs::create_directories((path / name).parent_path());
        std::ofstream(path / name) << text;
    }
};

const char* kMinimal = R"({
  "title": "t", "kind": "implementation",
  "instructions": "Step 1: do it.",
  "starter": "s.lab", "reference": "r.lab",
  "checks": [{"type": "var_exists", "var": "x"}, {"type": "var_equals", "var": "x"}]
})";

}  // namespace

TEST_CASE("load_manifest: LAB1 task 2") {
    auto m = load_manifest(kCourse / "lab1" / "task2.json");
    CHECK(m.id == "lab1/task2");
    CHECK(m.kind == TaskKind::Implementation);
    REQUIRE(m.banned.size() == 1);
    CHECK(m.banned[0] == "text2bitseq");
    REQUIRE(m.protected_inputs.size() == 2);
    CHECK(m.protected_inputs[0].first == "tx_msg");
    CHECK(m.protected_inputs[0].second == script::Value("Finished!"));
    CHECK(m.protected_inputs[1].first == "SPB");
    CHECK(m.protected_inputs[1].second == script::Value(20.0));
    CHECK(m.starter.find("tx_bs = [byte];") != std::string::npos);
    CHECK(m.reference.find("tx_bs = [tx_bs byte];") != std::string::npos);
    CHECK(m.checks.front().id == "banned");
    CHECK(m.checks[1].id == "inputs");
    CHECK(m.alternates.contains("reversed"));
}

TEST_CASE("load_manifest: schema errors carry the field") {
    TempDir d;
    d.write("s.lab", "x = 1;");
    d.write("r.lab", "x = 2;");
    d.write("ok.json", kMinimal);
    CHECK_NOTHROW(load_manifest(d.path / "ok.json"));

    auto expect = [&](const std::string& json, const std::string& field) {
        d.write("bad.json", json);
        try {
            load_manifest(d.path / "bad.json");
            FAIL("no error for " << field);
        } catch (const ManifestError& e) {
            CHECK(e.field() == field);
        }
    };
    std::string no_ref = kMinimal;
    no_ref.replace(no_ref.find(", \"reference\": \"r.lab\""), 22, "");
    expect(no_ref, "reference");
    std::string bad_profile = kMinimal;
    bad_profile.insert(1, "\"profile\": \"matlab\",");
    expect(bad_profile, "profile");
    std::string bad_type = kMinimal;
    bad_type.replace(bad_type.find("var_equals"), 10, "var_guess");
    expect(bad_type, "checks/1/type");
    std::string typo = kMinimal;
    typo.insert(1, "\"bannned\": [],");
    expect(typo, "bannned");
    std::string missing_file = kMinimal;
    missing_file.replace(missing_file.find("r.lab"), 5, "nope.lab");
    expect(missing_file, "reference");
    expect("[1, 2]", "");
}

TEST_CASE("course config") {
    const auto& cfg = course().config;
    CHECK(cfg.weights.quiz == 0.2);
    CHECK(cfg.weights.lab == 0.3);
    CHECK(cfg.weights.exam == 0.5);
    CHECK(cfg.pass_threshold == 0.6);

    CHECK_THROWS_AS(parse_course_config(nlohmann::ordered_json::parse(R"({"weights": {"quiz": 0.5, "lab": 0.3, "exam": 0.5}})"), "x"),
                    ManifestError);
    CHECK_THROWS_AS(parse_course_config(nlohmann::ordered_json::parse(R"({"pass_threshold": 1.0})"), "x"), ManifestError);
    auto empty = parse_course_config(nlohmann::ordered_json::parse("{}"), "x");
    CHECK(empty.labs.empty());
    Course c;
    c.config = empty;
    CHECK(list_course(c).empty());
}

TEST_CASE("list_course") {
    auto labs = list_course(course());
    REQUIRE(!labs.empty());
    CHECK(labs[0].id == "lab1");
    REQUIRE(labs[0].tasks.size() == 4);
    CHECK(labs[0].tasks[0].kind == TaskKind::Overview);
    for (int i = 1; i < 4; ++i) CHECK(labs[0].tasks[i].kind == TaskKind::Implementation);
    bool found_sw = false;
    std::size_t total = 0;
    for (const auto& lab : labs) {
        total += lab.tasks.size();
        // overview first, evaluation last
        for (std::size_t i = 0; i < lab.tasks.size(); ++i) {
            if (lab.tasks[i].kind == TaskKind::Overview) CHECK(i == 0);
            if (lab.tasks[i].kind == TaskKind::Evaluation) CHECK(i + 1 == lab.tasks.size());
        }
        for (const auto& t : lab.tasks)
            if (course().find_task(t.id)->profile == "stopwait") {
                found_sw = true;
                CHECK(t.kind == TaskKind::Implementation);
                CHECK(lab.part == 3);
            }
    }
    CHECK(found_sw);
    CHECK(total >= 9);
}

TEST_CASE("every shipped manifest validates") {
    for (const auto& [id, m] : course().tasks) {
        auto rep = validate_manifest(*m);
        CHECK_MESSAGE(rep.ok(), rep.render());
    }
}

TEST_CASE("validate_manifest catches broken content") {
    TempDir d;
    d.write("s.lab", "x = [1 2");
    d.write("r.lab", "x = 2;");
    d.write("m.json", kMinimal);
    auto rep = validate_manifest(load_manifest(d.path / "m.json"));
    CHECK_FALSE(rep.ok());
    bool cited = false;
    for (const auto& r : rep.rules)
        if (r.rule == "starter-parses") cited = !r.ok;
    CHECK(cited);

    d.write("s.lab", "x = 1;");
    d.write("r.lab", "x = undefined_name;");
    rep = validate_manifest(load_manifest(d.path / "m.json"));
    CHECK_FALSE(rep.ok());
    for (const auto& r : rep.rules)
        if (r.rule == "reference-passes") CHECK_FALSE(r.ok);

    // starter that already passes
    d.write("s.lab", "x = 2;");
    d.write("r.lab", "x = 2;");
    rep = validate_manifest(load_manifest(d.path / "m.json"));
    for (const auto& r : rep.rules)
        if (r.rule == "starter-fails") CHECK_FALSE(r.ok);
}

TEST_CASE("less code is given as Part I goes on") {
    std::size_t prev = 0;
    for (const auto& lab : course().config.labs) {
        if (lab.part != 1) continue;
        std::size_t delta = 0;
        for (const auto& id : lab.tasks) delta = std::max(delta, line_delta(*course().find_task(id)));
        MESSAGE(lab.id << " line delta " << delta);
        CHECK(delta >= prev);
        prev = delta;
    }
}

TEST_CASE("property: references pass and starters fail across seeds") {
    for (const auto& [id, m] : course().tasks) {
        const auto task = m->grading_task();
        int ref_fail = 0, starter_pass = 0;
        for (std::uint64_t seed = 100; seed < 120; ++seed) {
            if (grader::grade(task, m->reference, {.seed = seed}).overall != grader::Overall::Pass) ++ref_fail;
            if (m->kind != TaskKind::Overview &&
                grader::grade(task, m->starter, {.seed = seed}).overall == grader::Overall::Pass)
                ++starter_pass;
        }
        CHECK_MESSAGE(ref_fail == 0, id);
        CHECK_MESSAGE(starter_pass == 0, id);
    }
}
