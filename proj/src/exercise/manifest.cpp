#include "commlab/exercise/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "commlab/comm/builtins.hpp"
#include "commlab/script/parser.hpp"

namespace commlab::exercise {

using json = nlohmann::ordered_json;
using script::Value;

std::string_view kind_name(TaskKind k) {
    switch (k) {
    case TaskKind::Overview: return "overview";
    case TaskKind::Implementation: return "implementation";
    case TaskKind::Evaluation: return "evaluation";
    }
    return "?";
}

ManifestError::ManifestError(std::string origin, std::string field, const std::string& what)
    : std::runtime_error(origin + (field.empty() ? "" : ": " + field) + ": " + what),
      origin_(std::move(origin)),
      field_(std::move(field)) {}

namespace {

class Reader {
public:
    Reader(const std::string& origin, std::filesystem::path base) : origin_(origin), base_(std::move(base)) {}

    [[noreturn]] void fail(const std::string& field, const std::string& what) const {
        throw ManifestError(origin_, field, what);
    }

    void only_keys(const json& obj, const std::string& at, std::initializer_list<std::string_view> keys) const {
        for (const auto& [k, _] : obj.items())
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(join(at, k), "unknown field");
    }

    static std::string join(const std::string& at, const std::string& k) { return at.empty() ? k : at + "/" + k; }

    const json& need(const json& obj, const std::string& at, const std::string& key) const {
        auto it = obj.find(key);
        if (it == obj.end()) fail(join(at, key), "required field is missing");
        return *it;
    }

    std::string str(const json& v, const std::string& at) const {
        if (!v.is_string()) fail(at, "expected a string");
        return v.get<std::string>();
    }

    double num(const json& v, const std::string& at) const {
        if (!v.is_number()) fail(at, "expected a number");
        return v.get<double>();
    }

    std::vector<std::string> strings(const json& v, const std::string& at) const {
        if (!v.is_array()) fail(at, "expected an array of strings");
        std::vector<std::string> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(str(v[i], at + "/" + std::to_string(i)));
        return out;
    }

    std::string text(const json& v, const std::string& at) const {
        if (v.is_string()) return v.get<std::string>();
        std::string out;
        for (const auto& line : strings(v, at)) out += line + "\n";
        return out;
    }

    std::string script_file(const json& v, const std::string& at) const {
        const auto name = str(v, at);
        const auto path = base_ / name;
        std::ifstream in(path, std::ios::binary);
        if (!in) fail(at, "cannot read script file '" + name + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    Value value(const json& v, const std::string& at) const {
        if (v.is_string()) return Value(v.get<std::string>());
        if (v.is_boolean()) return Value(v.get<bool>());
        if (v.is_number()) return Value(v.get<double>());
        if (v.is_array()) {
            std::vector<double> xs;
            for (std::size_t i = 0; i < v.size(); ++i) xs.push_back(num(v[i], at + "/" + std::to_string(i)));
            return Value::numeric(std::move(xs));
        }
        fail(at, "expected a string, number, boolean or array of numbers");
    }

private:
    std::string origin_;
    std::filesystem::path base_;
};

grader::CheckSpec parse_check(const Reader& r, const json& c, const std::string& at, std::size_t index) {
    if (!c.is_object()) r.fail(at, "expected an object");
    r.only_keys(c, at, {"type", "id", "var", "eps_multiple", "tolerance", "figure", "message", "mistakes"});
    const auto type = r.str(r.need(c, at, "type"), at + "/type");
    auto var = [&] { return r.str(r.need(c, at, "var"), at + "/var"); };
    auto opt_num = [&](const char* key, double dflt) {
        auto it = c.find(key);
        return it == c.end() ? dflt : r.num(*it, at + "/" + key);
    };

    grader::CheckSpec spec;
    std::string default_id;
    if (type == "var_exists") {
        spec.rule = grader::VarExists{var()};
        default_id = "exists-" + std::get<grader::VarExists>(spec.rule).name;
    } else if (type == "var_equals") {
        spec.rule = grader::VarEquals{var()};
        default_id = "value-" + std::get<grader::VarEquals>(spec.rule).name;
    } else if (type == "var_close") {
        grader::VarClose v{var(), opt_num("eps_multiple", 100)};
        if (!(v.eps_multiple > 0)) r.fail(at + "/eps_multiple", "must be positive");
        default_id = "value-" + v.name;
        spec.rule = v;
    } else if (type == "var_mse") {
        grader::VarCloseMSE v{var(), r.num(r.need(c, at, "tolerance"), at + "/tolerance")};
        if (!(v.mse_tolerance >= 0)) r.fail(at + "/tolerance", "must be nonnegative");
        default_id = "value-" + v.name;
        spec.rule = v;
    } else if (type == "figure") {
        grader::FigureRule fr;
        fr.index = static_cast<int>(opt_num("figure", 1));
        if (fr.index < 1) r.fail(at + "/figure", "must be at least 1");
        fr.eps_multiple = opt_num("eps_multiple", 100);
        if (c.contains("tolerance")) fr.mse_tolerance = r.num(c["tolerance"], at + "/tolerance");
        default_id = "figure-" + std::to_string(fr.index);
        spec.rule = grader::FigureMatch{fr};
    } else if (type == "protocol") {
        spec.rule = grader::ProtocolCheck{};
        default_id = "protocol";
    } else {
        r.fail(at + "/type", "unknown check type '" + type + "'");
    }
    (void)index;
    spec.id = c.contains("id") ? r.str(c["id"], at + "/id") : default_id;
    if (c.contains("message")) spec.message = r.str(c["message"], at + "/message");
    if (c.contains("mistakes")) {
        const auto& ms = c["mistakes"];
        const bool value_check = std::holds_alternative<grader::VarEquals>(spec.rule) ||
                                 std::holds_alternative<grader::VarClose>(spec.rule) ||
                                 std::holds_alternative<grader::VarCloseMSE>(spec.rule);
        if (!value_check) r.fail(at + "/mistakes", "only value checks take common mistakes");
        if (!ms.is_array()) r.fail(at + "/mistakes", "expected an array");
        for (std::size_t i = 0; i < ms.size(); ++i) {
            const auto mat = at + "/mistakes/" + std::to_string(i);
            if (!ms[i].is_object()) r.fail(mat, "expected an object");
            r.only_keys(ms[i], mat, {"alternate", "message"});
            spec.mistakes.push_back({r.str(r.need(ms[i], mat, "alternate"), mat + "/alternate"),
                                     r.str(r.need(ms[i], mat, "message"), mat + "/message")});
        }
    }
    return spec;
}

std::string default_id(const std::string& origin) {
    const std::filesystem::path p(origin);
    const auto lab = p.parent_path().filename().string();
    return lab.empty() ? p.stem().string() : lab + "/" + p.stem().string();
}

}  // namespace

TaskManifest parse_manifest(const json& j, const std::filesystem::path& base, const std::string& origin) {
    Reader r(origin, base);
    if (!j.is_object()) r.fail("", "expected a JSON object");
    r.only_keys(j, "", {"id", "title", "kind", "profile", "instructions", "starter", "reference", "alternates",
                        "banned", "protected", "checks", "quizzes", "limits"});
    TaskManifest m;
    m.id = j.contains("id") ? r.str(j["id"], "id") : default_id(origin);
    m.title = r.str(r.need(j, "", "title"), "title");
    const auto kind = r.str(r.need(j, "", "kind"), "kind");
    if (kind == "overview") m.kind = TaskKind::Overview;
    else if (kind == "implementation") m.kind = TaskKind::Implementation;
    else if (kind == "evaluation") m.kind = TaskKind::Evaluation;
    else r.fail("kind", "expected overview, implementation or evaluation");

    m.profile = j.contains("profile") ? r.str(j["profile"], "profile") : "comm";
    m.registry = comm::registry_for_profile(m.profile);
    if (!m.registry) r.fail("profile", "unknown builtin profile '" + m.profile + "'");

    m.instructions = r.text(r.need(j, "", "instructions"), "instructions");
    m.starter = r.script_file(r.need(j, "", "starter"), "starter");
    m.reference = r.script_file(r.need(j, "", "reference"), "reference");

    if (j.contains("alternates")) {
        const auto& alts = j["alternates"];
        if (!alts.is_object()) r.fail("alternates", "expected an object of id: file");
        for (const auto& [id, file] : alts.items()) m.alternates[id] = r.script_file(file, "alternates/" + id);
    }
    if (j.contains("banned")) m.banned = r.strings(j["banned"], "banned");
    if (j.contains("protected")) {
        const auto& p = j["protected"];
        if (!p.is_object()) r.fail("protected", "expected an object of name: value");
        for (const auto& [name, v] : p.items()) m.protected_inputs.emplace_back(name, r.value(v, "protected/" + name));
    }
    if (j.contains("quizzes")) m.quizzes = r.strings(j["quizzes"], "quizzes");
    if (j.contains("limits")) {
        const auto& l = j["limits"];
        if (!l.is_object()) r.fail("limits", "expected an object");
        r.only_keys(l, "limits", {"max_steps", "max_vector_length", "max_figures"});
        auto count = [&](const char* key) {
            const double v = r.num(l[key], std::string("limits/") + key);
            if (v < 1 || v != static_cast<double>(static_cast<std::uint64_t>(v)))
                r.fail(std::string("limits/") + key, "expected a positive integer");
            return static_cast<std::uint64_t>(v);
        };
        if (l.contains("max_steps")) m.limits.max_steps = count("max_steps");
        if (l.contains("max_vector_length")) m.limits.max_vector_length = count("max_vector_length");
        if (l.contains("max_figures")) m.limits.max_figures = count("max_figures");
    }

    if (!m.banned.empty()) m.checks.push_back({"banned", grader::BannedFunctions{m.banned}, std::nullopt, {}});
    if (!m.protected_inputs.empty())
        m.checks.push_back({"inputs", grader::ProtectedInputs{m.protected_inputs}, std::nullopt, {}});
    const auto& checks = r.need(j, "", "checks");
    if (!checks.is_array() || checks.empty()) r.fail("checks", "expected a nonempty array");
    for (std::size_t i = 0; i < checks.size(); ++i)
        m.checks.push_back(parse_check(r, checks[i], "checks/" + std::to_string(i), i));

    std::set<std::string> ids;
    for (std::size_t i = 0; i < m.checks.size(); ++i) {
        const auto& c = m.checks[i];
        if (!ids.insert(c.id).second) r.fail("checks", "duplicate check id '" + c.id + "'");
        for (const auto& mk : c.mistakes)
            if (!m.alternates.contains(mk.alternate))
                r.fail("checks", "check '" + c.id + "' names unknown alternate '" + mk.alternate + "'");
    }
    return m;
}

TaskManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestError(path.string(), "", "cannot open manifest");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ManifestError(path.string(), "", std::string("invalid JSON: ") + e.what());
    }
    return parse_manifest(j, path.parent_path(), path.string());
}

grader::GradingTask TaskManifest::grading_task() const {
    grader::GradingTask t;
    t.id = id;
    t.registry = registry;
    t.reference_source = reference;
    t.alternates = alternates;
    t.checks = checks;
    t.limits = limits;
    return t;
}

bool ValidationReport::ok() const {
    return std::all_of(rules.begin(), rules.end(), [](const RuleOutcome& r) { return r.ok; });
}

std::string ValidationReport::render() const {
    std::string out = task + ": " + (ok() ? "valid" : "INVALID") + "\n";
    for (const auto& r : rules) {
        out += std::string("  [") + (r.ok ? "ok" : "FAIL") + "] " + r.rule;
        if (!r.detail.empty()) out += ": " + r.detail;
        out += "\n";
    }
    return out;
}

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::string failures(const grader::GradeReport& g) {
    if (!g.internal_error.empty()) return "internal error: " + g.internal_error;
    if (g.student_error) return g.student_error->describe();
    std::string out;
    for (const auto& c : g.results)
        if (c.verdict == grader::Verdict::Fail) {
            if (!out.empty()) out += "; ";
            out += c.id + ": " + first_line(c.message);
        }
    return out;
}

}  // namespace

ValidationReport validate_manifest(const TaskManifest& m, std::uint64_t first_seed, int runs) {
    ValidationReport rep;
    rep.task = m.id;
    auto add = [&](std::string rule, bool ok, std::string detail = {}) {
        rep.rules.push_back({std::move(rule), ok, ok ? std::string() : std::move(detail)});
    };

    std::vector<std::string> unknown;
    for (const auto& b : m.banned)
        if (!m.registry->contains(b)) unknown.push_back(b);
    add("banned-names-exist", unknown.empty(), unknown.empty() ? "" : "not builtins: " + unknown.front());

    std::optional<script::Program> starter;
    try {
        starter = script::parse_source(m.starter);
        add("starter-parses", true);
    } catch (const std::exception& e) {
        add("starter-parses", false, e.what());
    }
    if (starter) {
        auto limits = m.limits;
        limits.seed = first_seed;
        auto out = script::execute(*starter, *m.registry, limits);
        add("starter-executes", out.ok(), out.error ? out.error->describe() : std::string(script::status_name(out.status)));
        if (out.ok()) {
            auto prot = grader::check_protected_inputs(out.workspace, m.protected_inputs);
            add("starter-sets-protected-inputs", prot.verdict == grader::Verdict::Pass, prot.message);
        }
    }

    for (const auto& [id, src] : m.alternates) {
        auto limits = m.limits;
        limits.seed = first_seed;
        auto out = script::run_source(src, *m.registry, limits);
        add("alternate-executes:" + id, out.ok(), out.error ? out.error->describe() : "");
    }

    const auto task = m.grading_task();
    bool ref_ok = true, starter_fails = true, starter_specific = true;
    std::string ref_detail, starter_detail;
    for (int i = 0; i < runs; ++i) {
        const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(i);
        auto g = grader::grade(task, m.reference, {.seed = seed});
        if (g.overall != grader::Overall::Pass && ref_ok) {
            ref_ok = false;
            ref_detail = "seed " + std::to_string(seed) + ": " + failures(g);
        }
        if (m.kind == TaskKind::Overview || !starter) continue;
        auto s = grader::grade(task, m.starter, {.seed = seed});
        if (s.overall != grader::Overall::Fail) {
            if (starter_fails) starter_detail = "seed " + std::to_string(seed) + ": starter passes";
            starter_fails = false;
            continue;
        }
        const bool specific = std::any_of(s.results.begin(), s.results.end(), [](const grader::CheckResult& c) {
            return c.verdict == grader::Verdict::Fail && c.specific;
        });
        if (!specific && starter_specific) {
            starter_specific = false;
            if (starter_detail.empty()) starter_detail = "seed " + std::to_string(seed) + ": " + failures(s);
        }
    }
    add("reference-passes", ref_ok, ref_detail);
    if (m.kind == TaskKind::Overview) {
        add("overview-starter-is-reference", m.starter == m.reference, "starter and reference differ");
    } else {
        add("starter-fails", starter_fails, starter_detail);
        add("starter-feedback-specific", starter_fails && starter_specific, starter_detail);
    }
    return rep;
}

namespace {

std::vector<std::string> code_lines(const std::string& src) {
    std::vector<std::string> out;
    std::istringstream in(src);
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '%') continue;
        const auto e = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

std::size_t line_delta(const TaskManifest& m) {
    std::multiset<std::string> have;
    for (auto& l : code_lines(m.starter)) have.insert(std::move(l));
    std::size_t missing = 0;
    for (const auto& l : code_lines(m.reference)) {
        auto it = have.find(l);
        if (it == have.end()) ++missing;
        else have.erase(it);
    }
    return missing;
}

}  // namespace commlab::exercise
