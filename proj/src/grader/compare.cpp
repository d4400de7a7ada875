#include "commlab/grader/compare.hpp"

#include <algorithm>
#include <cmath>

namespace commlab::grader {

using script::format_number;
using script::summarize;
using script::ValueType;

namespace {

std::string kind_of(const Value& v) {
    switch (v.type()) {
    case ValueType::String: return "a string";
    case ValueType::List: return "a list";
    case ValueType::Bool: return "a logical value";
    default: return v.length() == 1 ? "a number" : "a numeric vector";
    }
}

bool numeric_like(const Value& v) { return v.is_numeric(); }

std::string both(const Value& s, const Value& r) {
    return "\n  your value: " + describe(s) + "\n  expected:   " + describe(r);
}

Comparison fail(std::string message, bool specific) { return {false, specific, std::move(message)}; }

// shared type and length gate for the numeric comparisons
std::optional<Comparison> shape_gate(const std::string& var, const Value& s, const Value& r) {
    if (numeric_like(s) != numeric_like(r) || s.is_string() != r.is_string() || s.is_list() != r.is_list())
        return fail("Variable '" + var + "' should be " + kind_of(r) + ", but it is " + kind_of(s) + "." + both(s, r),
                    true);
    if (s.length() != r.length())
        return fail("Variable '" + var + "' has length " + std::to_string(s.length()) + " but should have length " +
                        std::to_string(r.length()) + "." + both(s, r),
                    true);
    return std::nullopt;
}

}  // namespace

std::string describe(const Value& v) {
    std::string out = summarize(v, 16);
    if ((v.is_vector() || v.is_list()) && v.length() <= 16) out += " (length " + std::to_string(v.length()) + ")";
    if (v.is_string() && v.length() <= 64) out += " (length " + std::to_string(v.length()) + ")";
    return out;
}

Comparison compare_exact(const std::string& var, const Value& s, const Value& r) {
    if (auto g = shape_gate(var, s, r)) return *g;
    if (s == r) return {};
    if (s.is_list()) {
        for (std::size_t i = 0; i < s.list().size(); ++i)
            if (!(s.list()[i] == r.list()[i]))
                return fail("Variable '" + var + "' differs from the expected value at item " + std::to_string(i + 1) +
                                "." + both(s, r),
                            false);
    }
    const auto a = s.to_doubles(), b = r.to_doubles();
    std::size_t first = 0;
    while (first < a.size() && a[first] == b[first]) ++first;
    return fail("Variable '" + var + "' has the expected length but differs from the expected value, first at element " +
                    std::to_string(first + 1) + "." + both(s, r),
                false);
}

Comparison compare_close(const std::string& var, const Value& s, const Value& r, double eps_multiple) {
    if (r.is_string() || r.is_list()) return compare_exact(var, s, r);
    if (auto g = shape_gate(var, s, r)) return *g;
    const auto a = s.to_doubles(), b = r.to_doubles();
    double scale = 1, worst = 0;
    std::size_t where = 0;
    for (double x : b) scale = std::max(scale, std::fabs(x));
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > worst) worst = d, where = i;
    }
    const double tol = eps_multiple * kMachineEpsilon * scale;
    if (worst <= tol) return {};
    return fail("Variable '" + var + "' differs from the expected value: the largest deviation is " +
                    format_number(worst) + " at element " + std::to_string(where + 1) + ", above the tolerance " +
                    format_number(tol) + "." + both(s, r),
                false);
}

Comparison compare_mse(const std::string& var, const Value& s, const Value& r, double tolerance) {
    if (r.is_string() || r.is_list()) return compare_exact(var, s, r);
    if (auto g = shape_gate(var, s, r)) return *g;
    const auto a = s.to_doubles(), b = r.to_doubles();
    double sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    const double m = a.empty() ? 0 : sum / static_cast<double>(a.size());
    if (m <= tolerance) return {};
    return fail("Variable '" + var + "' is too far from the expected signal: the mean squared error is " +
                    format_number(m) + ", above the tolerance " + format_number(tolerance) + "." + both(s, r),
                false);
}

Comparison compare_figures(const std::vector<script::FigureData>& student,
                           const std::vector<script::FigureData>& reference, const FigureRule& rule) {
    auto plural = [](std::size_t n, const char* word) {
        return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
    };
    if (student.size() != reference.size())
        return fail("Expected " + plural(reference.size(), "figure") + ", found " + std::to_string(student.size()) + ".",
                    true);
    if (rule.index < 1 || static_cast<std::size_t>(rule.index) > reference.size())
        return fail("Figure " + std::to_string(rule.index) + " does not exist in the expected output.", true);
    const auto& sf = student[static_cast<std::size_t>(rule.index - 1)];
    const auto& rf = reference[static_cast<std::size_t>(rule.index - 1)];
    const std::string where = "Figure " + std::to_string(rule.index);
    if (sf.curves.size() != rf.curves.size())
        return fail(where + ": expected " + plural(rf.curves.size(), "curve") + ", found " +
                        std::to_string(sf.curves.size()) + ".",
                    true);
    for (std::size_t j = 0; j < rf.curves.size(); ++j)
        if (sf.curves[j].y.size() != rf.curves[j].y.size())
            return fail(where + ", curve " + std::to_string(j + 1) + ": expected " +
                            plural(rf.curves[j].y.size(), "point") + ", found " +
                            std::to_string(sf.curves[j].y.size()) + ".",
                        true);
    for (std::size_t j = 0; j < rf.curves.size(); ++j) {
        const std::string name = "curve " + std::to_string(j + 1);
        for (int axis = 0; axis < 2; ++axis) {
            const auto& sv = axis == 0 ? sf.curves[j].x : sf.curves[j].y;
            const auto& rv = axis == 0 ? rf.curves[j].x : rf.curves[j].y;
            const Value a = Value::numeric(sv), b = Value::numeric(rv);
            const std::string label = name + (axis == 0 ? " x" : " y");
            Comparison c = rule.mse_tolerance && axis == 1 ? compare_mse(label, a, b, *rule.mse_tolerance)
                                                            : compare_close(label, a, b, rule.eps_multiple);
            if (!c.pass) {
                // reword "Variable 'curve 1 y'" into a figure message
                const std::string prefix = "Variable '" + label + "'";
                if (c.message.rfind(prefix, 0) == 0)
                    c.message = where + ", " + label + " values" + c.message.substr(prefix.size());
                c.specific = false;
                return c;
            }
        }
    }
    return {};
}

}  // namespace commlab::grader
