#include "commlab/service/json_io.hpp"

namespace commlab::service {

using script::Value;
using script::ValueType;

std::string to_text(const json& j, int indent) { return j.dump(indent, ' ', false, json::error_handler_t::replace); }

json value_to_json(const Value& v) {
    switch (v.type()) {
    case ValueType::Number: return v.number();
    case ValueType::Bool: return v.boolean();
    case ValueType::String: return v.string();
    case ValueType::Vector: return v.vector();
    case ValueType::List: {
        json items = json::array();
        for (const auto& item : v.list()) items.push_back(value_to_json(item));
        return json{{"list", std::move(items)}};
    }
    }
    return nullptr;
}

json figure_to_json(const script::FigureData& f) {
    json curves = json::array();
    for (const auto& c : f.curves) {
        json jc{{"x", c.x}, {"y", c.y}};
        jc["label"] = c.label ? json(*c.label) : json(nullptr);
        curves.push_back(std::move(jc));
    }
    json out{{"index", f.index}, {"curves", std::move(curves)}};
    out["title"] = f.title ? json(*f.title) : json(nullptr);
    out["xlabel"] = f.xlabel ? json(*f.xlabel) : json(nullptr);
    out["ylabel"] = f.ylabel ? json(*f.ylabel) : json(nullptr);
    return out;
}

json figures_to_json(const std::vector<script::FigureData>& figs) {
    json out = json::array();
    for (const auto& f : figs) out.push_back(figure_to_json(f));
    return out;
}

json workspace_summary(const script::Workspace& ws) {
    json out = json::array();
    for (const auto& [name, v] : ws) {
        if (script::is_reserved_name(name)) continue;
        out.push_back({{"name", name},
                       {"type", std::string(script::type_name(v.type()))},
                       {"length", v.length()},
                       {"summary", script::summarize(v, 16)}});
    }
    return out;
}

json error_to_json(const script::ExecError& e) {
    json out{{"message", e.message}, {"syntax", e.syntax}, {"text", e.describe()}};
    if (e.pos.line > 0) {
        out["line"] = e.pos.line;
        out["column"] = e.pos.column;
    } else {
        out["line"] = nullptr;
        out["column"] = nullptr;
    }
    return out;
}

json outcome_to_json(const script::ExecOutcome& out) {
    json j{{"status", std::string(script::status_name(out.status))},
           {"printed", out.printed},
           {"figures", figures_to_json(out.figures)},
           {"workspace", workspace_summary(out.workspace)},
           {"steps", out.steps},
           {"seed", out.seed}};
    j["error"] = out.error ? error_to_json(*out.error) : json(nullptr);
    return j;
}

json grade_report_to_json(const grader::GradeReport& r) {
    json checks = json::array();
    for (const auto& c : r.results)
        checks.push_back({{"id", c.id},
                          {"kind", c.kind},
                          {"verdict", std::string(grader::verdict_name(c.verdict))},
                          {"message", c.message},
                          {"specific", c.specific}});
    json student{{"status", std::string(script::status_name(r.student_status))},
                 {"printed", r.printed},
                 {"figure_count", r.figure_count}};
    student["error"] = r.student_error ? error_to_json(*r.student_error) : json(nullptr);
    json j{{"overall", std::string(grader::overall_name(r.overall))},
           {"headline", r.headline},
           {"checks", std::move(checks)},
           {"student", std::move(student)},
           {"seeds", {{"student", r.student_seed}, {"reference", r.reference_seed}}}};
    if (r.overall == grader::Overall::Error) j["internal_error"] = r.internal_error;
    return j;
}

json validation_to_json(const exercise::ValidationReport& r) {
    json rules = json::array();
    for (const auto& x : r.rules) rules.push_back({{"rule", x.rule}, {"ok", x.ok}, {"detail", x.detail}});
    return {{"task", r.task}, {"valid", r.ok()}, {"rules", std::move(rules)}};
}

}  // namespace commlab::service
