#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace commlab::script {

class Value;
using List = std::vector<Value>;

enum class ValueType { Number, Vector, String, List, Bool };

std::string_view type_name(ValueType t);

/// Runtime datum of LabScript.
///
/// Numeric data with exactly one element is always held as a Number, so `[5]`,
/// `5` and `v(1:1)` compare and print identically. Lists are immutable once
/// built and share storage between copies.
class Value {
public:
    Value() : data_(std::vector<double>{}) {}
    Value(double x) : data_(x) {}
    Value(bool b) : data_(b) {}
    Value(std::string s) : data_(std::move(s)) {}
    Value(const char* s) : data_(std::string(s)) {}

    static Value numeric(std::vector<double> v);
    static Value list(List items);

    ValueType type() const;
    bool is_number() const { return std::holds_alternative<double>(data_); }
    bool is_vector() const { return std::holds_alternative<std::vector<double>>(data_); }
    bool is_string() const { return std::holds_alternative<std::string>(data_); }
    bool is_list() const { return std::holds_alternative<ListPtr>(data_); }
    bool is_bool() const { return std::holds_alternative<bool>(data_); }
    /// Number, Vector or Bool.
    bool is_numeric() const { return is_number() || is_vector() || is_bool(); }

    double number() const { return std::get<double>(data_); }
    const std::vector<double>& vector() const { return std::get<std::vector<double>>(data_); }
    // in-place element writes; callers keep the length at two or more
    std::vector<double>& vector_mut() { return std::get<std::vector<double>>(data_); }
    const std::string& string() const { return std::get<std::string>(data_); }
    const List& list() const { return *std::get<ListPtr>(data_); }
    bool boolean() const { return std::get<bool>(data_); }

    /// Element count: 1 for Number/Bool, characters for String.
    std::size_t length() const;

    /// Numeric content as a flat vector (Bool → 0/1, String → character codes).
    std::vector<double> to_doubles() const;

    /// Scalar view of a Number/Bool/one-character string; throws ScriptError otherwise.
    double scalar(std::string_view what) const;

    /// Nesting depth of lists (0 for non-list values).
    int depth() const;

    friend bool operator==(const Value& a, const Value& b);

private:
    using ListPtr = std::shared_ptr<const List>;
    std::variant<double, std::vector<double>, std::string, ListPtr, bool> data_;
};

/// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

/// One-line human summary; vectors and lists are truncated after `max_items`.
std::string summarize(const Value& v, std::size_t max_items = 16);

/// Full rendering used for echoed output (`x = ...`).
std::string render(const Value& v);

inline constexpr int kMaxListDepth = 8;

}  // namespace commlab::script
