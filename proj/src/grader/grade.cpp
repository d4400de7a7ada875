#include "commlab/grader/grade.hpp"

#include <set>
#include <stdexcept>

#include "commlab/grader/protocol.hpp"
#include "commlab/rng.hpp"
#include "commlab/script/parser.hpp"

namespace commlab::grader {

using script::ExecOutcome;
using script::ExecStatus;
using script::detail::overloaded;

std::string_view kind_name(const CheckRule& rule) {
    return std::visit(overloaded{
                          [](const BannedFunctions&) { return "banned_functions"; },
                          [](const ProtectedInputs&) { return "protected_inputs"; },
                          [](const VarExists&) { return "var_exists"; },
                          [](const VarEquals&) { return "var_equals"; },
                          [](const VarClose&) { return "var_close"; },
                          [](const VarCloseMSE&) { return "var_close_mse"; },
                          [](const FigureMatch&) { return "figure_match"; },
                          [](const ProtocolCheck&) { return "protocol_trace"; },
                      },
                      rule);
}

std::string_view verdict_name(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Skipped: return "skipped";
    }
    return "?";
}

std::string_view overall_name(Overall o) {
    switch (o) {
    case Overall::Pass: return "pass";
    case Overall::Fail: return "fail";
    case Overall::Error: return "error";
    }
    return "?";
}

std::uint64_t reference_seed_for(std::uint64_t student_seed) {
    const std::uint64_t s = mix_seed(student_seed ^ 0x5EED5EED5EED5EEDull);
    return s == student_seed ? s ^ 1 : s;
}

namespace {

void collect_assigned(const script::Block& block, std::set<std::string>& out) {
    for (const auto& s : block)
        std::visit(overloaded{
                       [&](const script::AssignStmt& n) { out.insert(n.name); },
                       [&](const script::MultiAssignStmt& n) { out.insert(n.names.begin(), n.names.end()); },
                       [&](const script::ForStmt& n) {
                           out.insert(n.var);
                           collect_assigned(n.body, out);
                       },
                       [&](const script::WhileStmt& n) { collect_assigned(n.body, out); },
                       [&](const script::IfStmt& n) {
                           for (const auto& b : n.branches) collect_assigned(b.body, out);
                           if (n.otherwise) collect_assigned(*n.otherwise, out);
                       },
                       [](const auto&) {},
                   },
                   s.node);
}

std::string fill(std::string text, const std::map<std::string, std::string>& vars) {
    for (const auto& [key, value] : vars) {
        const std::string token = "{" + key + "}";
        for (std::size_t at = text.find(token); at != std::string::npos; at = text.find(token, at + value.size()))
            text.replace(at, token.size(), value);
    }
    return text;
}

const std::string* var_of(const CheckRule& rule) {
    return std::visit(overloaded{
                          [](const VarExists& r) -> const std::string* { return &r.name; },
                          [](const VarEquals& r) -> const std::string* { return &r.name; },
                          [](const VarClose& r) -> const std::string* { return &r.name; },
                          [](const VarCloseMSE& r) -> const std::string* { return &r.name; },
                          [](const auto&) -> const std::string* { return nullptr; },
                      },
                      rule);
}

Comparison compare_by(const CheckRule& rule, const std::string& var, const Value& s, const Value& r) {
    return std::visit(overloaded{
                          [&](const VarEquals&) { return compare_exact(var, s, r); },
                          [&](const VarClose& c) { return compare_close(var, s, r, c.eps_multiple); },
                          [&](const VarCloseMSE& c) { return compare_mse(var, s, r, c.mse_tolerance); },
                          [&](const auto&) { return compare_exact(var, s, r); },
                      },
                      rule);
}

std::string missing_message(const std::string& var) { return "Expected variable '" + var + "' is missing."; }

class Grading {
public:
    Grading(const GradingTask& task, std::uint64_t seed) : task_(task), student_seed_(seed) {
        report_.student_seed = seed;
        report_.reference_seed = reference_seed_for(seed);
        report_.results.resize(task.checks.size());
        for (std::size_t i = 0; i < task.checks.size(); ++i) {
            report_.results[i].id = task.checks[i].id;
            report_.results[i].kind = std::string(kind_name(task.checks[i].rule));
        }
    }

    GradeReport run(std::string_view submission) {
        script::Program program;
        try {
            program = script::parse_source(submission);
        } catch (const script::SyntaxError& e) {
            report_.student_status = ExecStatus::ScriptError;
            report_.student_error = script::ExecError{e.what(), e.pos(), true};
            report_.headline = "Your code could not run: " + report_.student_error->describe();
            return finish();
        }

        bool banned_failed = false;
        for (std::size_t i = 0; i < task_.checks.size(); ++i)
            if (const auto* b = std::get_if<BannedFunctions>(&task_.checks[i].rule)) {
                auto r = check_banned(program, b->names);
                set(i, std::move(r));
                banned_failed |= report_.results[i].verdict == Verdict::Fail;
            }

        script::ExecLimits lim = task_.limits;
        lim.seed = student_seed_;
        student_ = script::execute(program, *task_.registry, lim);
        report_.student_status = student_.status;
        report_.student_error = student_.error;
        report_.printed = student_.printed;
        report_.figure_count = student_.figures.size();

        if (banned_failed) {
            report_.headline = "Your code uses a function that is not allowed in this task.";
            return finish();
        }
        if (!student_.ok()) {
            report_.headline = std::string(student_.status == ExecStatus::ResourceExceeded
                                               ? "Your code was stopped: "
                                               : "Your code stopped with an error: ") +
                               student_.error->describe();
            return finish();
        }

        bool protected_failed = false;
        for (std::size_t i = 0; i < task_.checks.size(); ++i)
            if (const auto* p = std::get_if<ProtectedInputs>(&task_.checks[i].rule)) {
                set(i, check_protected_inputs(student_.workspace, p->required));
                protected_failed |= report_.results[i].verdict == Verdict::Fail;
            }
        if (protected_failed) {
            report_.headline = "Some input variables were changed or removed.";
            return finish();
        }

        script::ExecLimits rlim = task_.limits;
        rlim.seed = report_.reference_seed;
        reference_ = script::run_source(task_.reference_source, *task_.registry, rlim);
        if (!reference_.ok()) {
            report_.overall = Overall::Error;
            report_.internal_error = "the reference solution of task '" + task_.id + "' failed: " +
                                     (reference_.error ? reference_.error->describe() : std::string("unknown"));
            report_.headline = "The grader could not check this task (internal error). This is not a problem with your code.";
            for (auto& r : report_.results)
                if (r.verdict == Verdict::Skipped) r.message.clear();
            return report_;
        }

        std::set<std::string> missing;
        for (std::size_t i = 0; i < task_.checks.size(); ++i) {
            const auto& spec = task_.checks[i];
            if (std::holds_alternative<BannedFunctions>(spec.rule) || std::holds_alternative<ProtectedInputs>(spec.rule))
                continue;
            if (const std::string* var = var_of(spec.rule); var && missing.contains(*var)) continue;  // stays skipped
            set(i, evaluate(spec, missing));
        }
        return finish();
    }

private:
    void set(std::size_t i, CheckResult r) {
        r.id = report_.results[i].id;
        r.kind = report_.results[i].kind;
        report_.results[i] = std::move(r);
    }

    CheckResult evaluate(const CheckSpec& spec, std::set<std::string>& missing) {
        CheckResult r;
        std::visit(overloaded{
                       [&](const VarExists& c) {
                           if (student_.workspace.contains(c.name)) {
                               r.verdict = Verdict::Pass;
                           } else {
                               missing.insert(c.name);
                               r.verdict = Verdict::Fail;
                               r.specific = true;
                               r.message = headline(spec, c.name, nullptr, nullptr) + missing_message(c.name);
                           }
                       },
                       [&](const FigureMatch& c) {
                           auto cmp = compare_figures(student_.figures, reference_.figures, c.rule);
                           apply(r, spec, cmp, nullptr, nullptr, "");
                       },
                       [&](const ProtocolCheck&) { r = protocol(spec); },
                       [&](const auto&) { r = value_check(spec, *var_of(spec.rule)); },
                   },
                   spec.rule);
        return r;
    }

    CheckResult value_check(const CheckSpec& spec, const std::string& var) {
        CheckResult r;
        const Value* ref = reference_.workspace.find(var);
        if (!ref) throw std::logic_error("the reference solution does not define '" + var + "'");
        const Value* mine = student_.workspace.find(var);
        if (!mine) {
            r.verdict = Verdict::Fail;
            r.specific = true;
            r.message = headline(spec, var, nullptr, ref) + missing_message(var);
            return r;
        }
        Comparison cmp = compare_by(spec.rule, var, *mine, *ref);
        if (!cmp.pass)
            if (auto m = match_mistake(spec, var, *mine)) {
                cmp.message = *m;
                cmp.specific = true;
            }
        apply(r, spec, cmp, mine, ref, var);
        return r;
    }

    std::optional<std::string> match_mistake(const CheckSpec& spec, const std::string& var, const Value& mine) {
        for (const auto& mk : spec.mistakes) {
            const ExecOutcome* alt = alternate(mk.alternate);
            if (!alt || !alt->ok()) continue;
            const Value* v = alt->workspace.find(var);
            if (!v) continue;
            if (compare_by(spec.rule, var, mine, *v).pass)
                return fill(mk.message, {{"var", var}, {"observed", describe(mine)}, {"expected", describe(*v)}});
        }
        return std::nullopt;
    }

    const ExecOutcome* alternate(const std::string& id) {
        if (auto it = alternates_.find(id); it != alternates_.end()) return &it->second;
        auto src = task_.alternates.find(id);
        if (src == task_.alternates.end()) return nullptr;
        script::ExecLimits lim = task_.limits;
        lim.seed = student_seed_;  // same noise as the student so a matching mistake matches exactly
        auto [it, ok] = alternates_.emplace(id, script::run_source(src->second, *task_.registry, lim));
        return &it->second;
    }

    std::string headline(const CheckSpec& spec, const std::string& var, const Value* mine, const Value* ref) const {
        if (!spec.message) return "";
        return fill(*spec.message, {{"var", var},
                                    {"observed", mine ? describe(*mine) : "(missing)"},
                                    {"expected", ref ? describe(*ref) : "(unknown)"},
                                    {"line", ""}}) +
               "\n";
    }

    void apply(CheckResult& r, const CheckSpec& spec, const Comparison& cmp, const Value* mine, const Value* ref,
               const std::string& var) const {
        r.verdict = cmp.pass ? Verdict::Pass : Verdict::Fail;
        r.specific = !cmp.pass && cmp.specific;
        if (!cmp.pass) r.message = headline(spec, var, mine, ref) + cmp.message;
    }

    CheckResult protocol(const CheckSpec& spec) {
        CheckResult r;
        r.verdict = Verdict::Fail;
        r.specific = true;
        const auto mine = read_recorded_run(student_.workspace);
        const auto ref = read_recorded_run(reference_.workspace);
        if (!ref) throw std::logic_error("the reference solution did not run the stop-and-wait simulation");
        if (!mine) {
            r.message = headline(spec, "", nullptr, nullptr) +
                        "The stop-and-wait simulation was not run: sw_init was never called.";
            return r;
        }
        if (!(mine->cfg == ref->cfg) || mine->trace.packets != ref->trace.packets) {
            r.message = headline(spec, "", nullptr, nullptr) +
                        "The simulation parameters were changed. Do not change N, p, dmin, dmax, TO or T.";
            return r;
        }
        const auto verdict = check_protocol_trace(mine->trace, mine->cfg);
        if (verdict.pass()) {
            r.verdict = Verdict::Pass;
            r.specific = false;
            return r;
        }
        r.message = headline(spec, "", nullptr, nullptr) + verdict.message();
        return r;
    }

    GradeReport finish() {
        bool any_fail = false;
        std::size_t failed = 0, decided = 0;
        for (const auto& r : report_.results) {
            if (r.verdict == Verdict::Fail) any_fail = true, ++failed;
            if (r.verdict != Verdict::Skipped) ++decided;
        }
        const bool ran = report_.student_status == ExecStatus::Ok && !report_.student_error;
        report_.overall = ran && !any_fail ? Overall::Pass : Overall::Fail;
        if (report_.headline.empty())
            report_.headline = report_.overall == Overall::Pass
                                   ? "All checks passed."
                                   : std::to_string(failed) + " of " + std::to_string(decided) + " checks failed.";
        return report_;
    }

    const GradingTask& task_;
    std::uint64_t student_seed_;
    GradeReport report_;
    ExecOutcome student_, reference_;
    std::map<std::string, ExecOutcome> alternates_;
};

}  // namespace

std::string protected_literal(const Value& v) {
    if (v.is_string()) return "'" + v.string() + "'";
    return script::summarize(v, 16);
}

CheckResult check_banned(const script::Program& program, const std::vector<std::string>& names) {
    CheckResult r;
    r.kind = "banned_functions";
    std::set<std::string> assigned;
    collect_assigned(program.body, assigned);
    const std::set<std::string> banned(names.begin(), names.end());
    std::map<std::string, int> first_line;
    script::for_each_expr(program, [&](const script::Expr& e) {
        const std::string* name = nullptr;
        if (const auto* c = std::get_if<script::CallOrIndex>(&e.node); c && !c->brace) name = &c->name;
        if (const auto* id = std::get_if<script::Identifier>(&e.node)) name = &id->name;
        if (!name || !banned.contains(*name) || assigned.contains(*name)) return;
        auto [it, fresh] = first_line.emplace(*name, e.pos.line);
        if (!fresh && e.pos.line < it->second) it->second = e.pos.line;
    });
    if (first_line.empty()) {
        r.verdict = Verdict::Pass;
        return r;
    }
    r.verdict = Verdict::Fail;
    r.specific = true;
    for (const auto& [name, line] : first_line) {
        if (!r.message.empty()) r.message += '\n';
        r.message += "Line " + std::to_string(line) + ": you called " + name +
                     ", which is not allowed in this task. Write the code that does its job instead.";
    }
    return r;
}

CheckResult check_protected_inputs(const script::Workspace& ws,
                                   const std::vector<std::pair<std::string, Value>>& required) {
    CheckResult r;
    r.kind = "protected_inputs";
    for (const auto& [name, value] : required) {
        const Value* v = ws.find(name);
        std::string line;
        if (!v)
            line = missing_message(name);
        else if (!(*v == value))
            line = "The variable " + name + " should be " + protected_literal(value) + ". Do not change it.";
        if (line.empty()) continue;
        if (!r.message.empty()) r.message += '\n';
        r.message += line;
    }
    r.verdict = r.message.empty() ? Verdict::Pass : Verdict::Fail;
    r.specific = r.verdict == Verdict::Fail;
    return r;
}

GradeReport grade(const GradingTask& task, std::string_view submission, const GradeOptions& options) {
    const std::uint64_t seed = options.seed ? *options.seed : Rng::entropy_seed();
    try {
        return Grading(task, seed).run(submission);
    } catch (const std::exception& e) {
        GradeReport r;
        r.overall = Overall::Error;
        r.student_seed = seed;
        r.reference_seed = reference_seed_for(seed);
        r.internal_error = e.what();
        r.headline = "The grader could not check this task (internal error). This is not a problem with your code.";
        return r;
    }
}

std::string render_report(const GradeReport& report) {
    std::string out = "Result: ";
    switch (report.overall) {
    case Overall::Pass: out += "PASS"; break;
    case Overall::Fail: out += "FAIL"; break;
    case Overall::Error: out += "ERROR"; break;
    }
    out += "\n" + report.headline + "\n";
    if (!report.internal_error.empty()) out += "internal: " + report.internal_error + "\n";
    for (const auto& r : report.results) {
        const char* tag = r.verdict == Verdict::Pass ? "[pass]" : r.verdict == Verdict::Fail ? "[FAIL]" : "[skip]";
        out += std::string(tag) + " " + r.id;
        if (!r.message.empty()) {
            std::string msg = r.message;
            for (std::size_t at = msg.find('\n'); at != std::string::npos; at = msg.find('\n', at + 1))
                msg.replace(at, 1, "\n       ");
            out += ": " + msg;
        }
        out += "\n";
    }
    return out;
}

}  // namespace commlab::grader
