#pragma once

#include <any>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "commlab/rng.hpp"
#include "commlab/script/source.hpp"
#include "commlab/script/value.hpp"
#include "commlab/script/workspace.hpp"

namespace commlab::script {

struct ExecState;

/// What a builtin sees of the running script.
///
/// Besides its arguments and return values a builtin may only touch hidden
/// (`__`-prefixed) workspace names, the figure list, printed output and the
/// execution's random stream.
class CallContext {
public:
    CallContext(ExecState& state, std::string_view name, SourcePos pos, int nargout)
        : state_(state), name_(name), pos_(pos), nargout_(nargout) {}

    std::string_view name() const { return name_; }
    SourcePos pos() const { return pos_; }
    /// Number of outputs requested by the caller (0 for a bare statement).
    int nargout() const { return nargout_; }

    Rng& rng();
    void print(std::string_view text);

    /// Opens a new figure and makes it current.
    FigureData& new_figure();
    /// The current figure, creating figure 1 when none exists yet.
    FigureData& current_figure();
    void add_curve(Curve curve);

    const Value* hidden(std::string_view name) const;
    void set_hidden(std::string name, Value value);

    /// Throws ResourceExceeded when a vector of `n` elements would break the cap.
    void check_length(std::size_t n) const;

    /// Per-execution scratch state shared by a family of builtins.
    std::any& slot(const std::string& key);

    [[noreturn]] void fail(const std::string& message) const;

private:
    ExecState& state_;
    std::string_view name_;
    SourcePos pos_;
    int nargout_;
};

using BuiltinFn = std::function<std::vector<Value>(CallContext&, std::span<const Value>)>;

struct Arity {
    int min_args = 0;
    int max_args = 0;     // -1: unbounded
    int max_outputs = 1;
};

struct Builtin {
    std::string name;
    Arity arity;
    BuiltinFn fn;
};

class RegistryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Named builtins callable from scripts. Build once, then share as const.
class BuiltinRegistry {
public:
    /// Registers `name`; throws RegistryError on a duplicate or an invalid name.
    BuiltinRegistry& add(std::string name, Arity arity, BuiltinFn fn);

    const Builtin* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }
    std::vector<std::string> names() const;

private:
    std::map<std::string, Builtin, std::less<>> builtins_;
};

}  // namespace commlab::script
