#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "commlab/script/value.hpp"

namespace commlab::script {

/// Names starting with this prefix belong to the grader and builtins.
inline constexpr std::string_view kReservedPrefix = "__";

inline bool is_reserved_name(std::string_view name) {
    return name.starts_with(kReservedPrefix);
}

/// Ordered name → Value map; iteration follows first-assignment order.
class Workspace {
public:
    const Value* find(std::string_view name) const;
    Value* find_mutable(std::string_view name);
    bool contains(std::string_view name) const { return find(name) != nullptr; }

    /// Inserts or overwrites. Name validity is the caller's responsibility.
    void set(std::string name, Value value);
    bool erase(std::string_view name);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    friend bool operator==(const Workspace& a, const Workspace& b) { return a.entries_ == b.entries_; }

private:
    std::vector<std::pair<std::string, Value>> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct Curve {
    std::vector<double> x;
    std::vector<double> y;
    std::optional<std::string> label;

    friend bool operator==(const Curve&, const Curve&) = default;
};

struct FigureData {
    int index = 1;  // 1-based, in creation order
    std::vector<Curve> curves;
    std::optional<std::string> title;
    std::optional<std::string> xlabel;
    std::optional<std::string> ylabel;

    friend bool operator==(const FigureData&, const FigureData&) = default;
};

}  // namespace commlab::script
