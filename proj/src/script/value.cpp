#include "commlab/script/value.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "commlab/script/source.hpp"

namespace commlab::script {

std::string SourcePos::str() const {
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string_view type_name(ValueType t) {
    switch (t) {
    case ValueType::Number: return "number";
    case ValueType::Vector: return "vector";
    case ValueType::String: return "string";
    case ValueType::List: return "list";
    case ValueType::Bool: return "boolean";
    }
    return "?";
}

Value Value::numeric(std::vector<double> v) {
    if (v.size() == 1) return Value(v.front());
    Value out;
    out.data_ = std::move(v);
    return out;
}

Value Value::list(List items) {
    Value out;
    out.data_ = std::make_shared<const List>(std::move(items));
    return out;
}

ValueType Value::type() const {
    switch (data_.index()) {
    case 0: return ValueType::Number;
    case 1: return ValueType::Vector;
    case 2: return ValueType::String;
    case 3: return ValueType::List;
    default: return ValueType::Bool;
    }
}

std::size_t Value::length() const {
    switch (type()) {
    case ValueType::Number:
    case ValueType::Bool: return 1;
    case ValueType::Vector: return vector().size();
    case ValueType::String: return string().size();
    case ValueType::List: return list().size();
    }
    return 0;
}

std::vector<double> Value::to_doubles() const {
    switch (type()) {
    case ValueType::Number: return {number()};
    case ValueType::Bool: return {boolean() ? 1.0 : 0.0};
    case ValueType::Vector: return vector();
    case ValueType::String: {
        std::vector<double> out;
        out.reserve(string().size());
        for (unsigned char c : string()) out.push_back(static_cast<double>(c));
        return out;
    }
    case ValueType::List: break;
    }
    throw ScriptError("a list cannot be used as a number");
}

double Value::scalar(std::string_view what) const {
    switch (type()) {
    case ValueType::Number: return number();
    case ValueType::Bool: return boolean() ? 1.0 : 0.0;
    case ValueType::String:
        if (string().size() == 1) return static_cast<unsigned char>(string()[0]);
        break;
    default: break;
    }
    throw ScriptError(std::string(what) + " must be a scalar, got " +
                      std::string(type_name(type())) + " of length " + std::to_string(length()));
}

int Value::depth() const {
    if (!is_list()) return 0;
    int d = 0;
    for (const auto& item : list()) d = std::max(d, item.depth());
    return d + 1;
}

bool operator==(const Value& a, const Value& b) {
    if (a.is_list() || b.is_list()) {
        if (!(a.is_list() && b.is_list())) return false;
        const auto& la = a.list();
        const auto& lb = b.list();
        if (la.size() != lb.size()) return false;
        for (std::size_t i = 0; i < la.size(); ++i)
            if (!(la[i] == lb[i])) return false;
        return true;
    }
    if (a.is_string() || b.is_string()) return a.is_string() && b.is_string() && a.string() == b.string();
    return a.to_doubles() == b.to_doubles();
}

std::string format_number(double x) {
    if (std::isnan(x)) return "NaN";
    if (std::isinf(x)) return x > 0 ? "Inf" : "-Inf";
    if (x == 0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string join_numbers(const std::vector<double>& v, std::size_t max_items) {
    std::string out = "[";
    const std::size_t n = std::min(v.size(), max_items);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += format_number(v[i]);
    }
    if (v.size() > n) out += " ...";
    out += ']';
    return out;
}

}  // namespace

std::string summarize(const Value& v, std::size_t max_items) {
    switch (v.type()) {
    case ValueType::Number: return format_number(v.number());
    case ValueType::Bool: return v.boolean() ? "true" : "false";
    case ValueType::String: {
        const auto& s = v.string();
        if (s.size() <= 4 * max_items) return "'" + s + "'";
        return "'" + s.substr(0, 4 * max_items) + "...' (" + std::to_string(s.size()) + " characters)";
    }
    case ValueType::Vector: {
        std::string out = join_numbers(v.vector(), max_items);
        if (v.vector().size() > max_items) out += " (" + std::to_string(v.vector().size()) + " elements)";
        return out;
    }
    case ValueType::List: {
        std::string out = "{";
        const auto& items = v.list();
        const std::size_t n = std::min(items.size(), max_items);
        for (std::size_t i = 0; i < n; ++i) {
            if (i) out += ", ";
            out += summarize(items[i], max_items);
        }
        if (items.size() > n) out += ", ...";
        out += "}";
        if (items.size() > n) out += " (" + std::to_string(items.size()) + " items)";
        return out;
    }
    }
    return {};
}

std::string render(const Value& v) {
    return summarize(v, static_cast<std::size_t>(-1) / 8);
}

}  // namespace commlab::script
