#include "commlab/script/interpreter.hpp"

#include <cmath>
#include <map>
#include <new>

#include "commlab/script/lexer.hpp"
#include "commlab/script/parser.hpp"

namespace commlab::script {

using detail::overloaded;

std::string_view status_name(ExecStatus s) {
    switch (s) {
    case ExecStatus::Ok: return "ok";
    case ExecStatus::ScriptError: return "script-error";
    case ExecStatus::ResourceExceeded: return "resource-exceeded";
    }
    return "?";
}

std::string ExecError::describe() const {
    std::string prefix = syntax ? "syntax error" : "error";
    if (pos.known()) prefix += " at " + pos.str();
    return prefix + ": " + message;
}

struct ExecState {
    ExecState(const BuiltinRegistry& b, const ExecLimits& l)
        : builtins(b), limits(l), rng(l.seed ? *l.seed : Rng::entropy_seed()) {}

    const BuiltinRegistry& builtins;
    const ExecLimits& limits;
    Rng rng;
    Workspace ws;
    std::vector<FigureData> figures;
    int current_figure = -1;
    std::size_t total_points = 0;
    std::string printed;
    std::uint64_t steps = 0;
    std::map<std::string, std::any> slots;

    void print(std::string_view text) {
        if (printed.size() + text.size() > limits.max_output_bytes)
            throw ResourceExceeded("printed output exceeds " + std::to_string(limits.max_output_bytes) + " bytes");
        printed.append(text);
    }

    void check_length(std::size_t n) const {
        if (n > limits.max_vector_length)
            throw ResourceExceeded("vector length " + std::to_string(n) + " exceeds the limit of " +
                                   std::to_string(limits.max_vector_length));
    }

    FigureData& new_figure() {
        if (figures.size() >= limits.max_figures)
            throw ResourceExceeded("more than " + std::to_string(limits.max_figures) + " figures");
        FigureData f;
        f.index = static_cast<int>(figures.size()) + 1;
        figures.push_back(std::move(f));
        current_figure = static_cast<int>(figures.size()) - 1;
        return figures.back();
    }

    FigureData& current() {
        if (current_figure < 0) return new_figure();
        return figures[static_cast<std::size_t>(current_figure)];
    }
};

// ---- CallContext ------------------------------------------------------------

Rng& CallContext::rng() { return state_.rng; }

void CallContext::print(std::string_view text) { state_.print(text); }

FigureData& CallContext::new_figure() { return state_.new_figure(); }

FigureData& CallContext::current_figure() { return state_.current(); }

void CallContext::add_curve(Curve curve) {
    if (curve.x.size() != curve.y.size())
        fail("x and y must have the same length (" + std::to_string(curve.x.size()) + " vs " +
             std::to_string(curve.y.size()) + ")");
    if (curve.y.empty()) fail("cannot plot an empty vector");
    state_.total_points += curve.y.size();
    if (state_.total_points > 4 * state_.limits.max_vector_length)
        throw ResourceExceeded("too many plotted points", pos_);
    state_.current().curves.push_back(std::move(curve));
}

const Value* CallContext::hidden(std::string_view name) const {
    if (!is_reserved_name(name)) fail("internal: builtin may only read reserved names");
    return state_.ws.find(name);
}

void CallContext::set_hidden(std::string name, Value value) {
    if (!is_reserved_name(name)) fail("internal: builtin may only write reserved names");
    state_.ws.set(std::move(name), std::move(value));
}

void CallContext::check_length(std::size_t n) const {
    try {
        state_.check_length(n);
    } catch (ResourceExceeded& e) {
        e.set_pos_if_unknown(pos_);
        throw;
    }
}

std::any& CallContext::slot(const std::string& key) { return state_.slots[key]; }

void CallContext::fail(const std::string& message) const {
    throw ScriptError(std::string(name_) + ": " + message, pos_);
}

// ---- BuiltinRegistry --------------------------------------------------------

BuiltinRegistry& BuiltinRegistry::add(std::string name, Arity arity, BuiltinFn fn) {
    if (!is_valid_identifier(name) || is_reserved_name(name))
        throw RegistryError("invalid builtin name '" + name + "'");
    if (builtins_.contains(name)) throw RegistryError("builtin '" + name + "' is already registered");
    if (arity.min_args < 0 || (arity.max_args >= 0 && arity.max_args < arity.min_args))
        throw RegistryError("invalid arity for builtin '" + name + "'");
    Builtin b{name, arity, std::move(fn)};
    builtins_.emplace(std::move(name), std::move(b));
    return *this;
}

const Builtin* BuiltinRegistry::find(std::string_view name) const {
    auto it = builtins_.find(name);
    return it == builtins_.end() ? nullptr : &it->second;
}

std::vector<std::string> BuiltinRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(builtins_.size());
    for (const auto& [name, b] : builtins_) out.push_back(name);
    return out;
}

// ---- Interpreter ------------------------------------------------------------

namespace {

enum class Flow { Normal, Break, Continue };

bool is_integer(double x) {
    return std::isfinite(x) && std::floor(x) == x;
}

class Interpreter {
public:
    explicit Interpreter(ExecState& st) : st_(st) {}

    void run(const Program& program) {
        const Flow f = exec_block(program.body);
        (void)f;  // break/continue outside a loop simply end the block
    }

private:
    void tick(SourcePos pos) {
        if (++st_.steps > st_.limits.max_steps)
            throw ResourceExceeded("step limit of " + std::to_string(st_.limits.max_steps) + " exceeded", pos);
    }

    // ---- statements -------------------------------------------------------

    Flow exec_block(const Block& block) {
        for (const auto& s : block) {
            const Flow f = exec(s);
            if (f != Flow::Normal) return f;
        }
        return Flow::Normal;
    }

    Flow exec(const Stmt& s) {
        tick(s.pos);
        try {
            return std::visit(
                overloaded{
                    [&](const AssignStmt& n) {
                        exec_assign(n, s.echo);
                        return Flow::Normal;
                    },
                    [&](const MultiAssignStmt& n) {
                        exec_multi_assign(n, s.echo);
                        return Flow::Normal;
                    },
                    [&](const ExprStmt& n) {
                        exec_expr_stmt(n, s.echo);
                        return Flow::Normal;
                    },
                    [&](const ForStmt& n) { return exec_for(n); },
                    [&](const WhileStmt& n) { return exec_while(n); },
                    [&](const IfStmt& n) {
                        for (const auto& b : n.branches)
                            if (truthy(eval(*b.cond), b.cond->pos)) return exec_block(b.body);
                        if (n.otherwise) return exec_block(*n.otherwise);
                        return Flow::Normal;
                    },
                    [](const BreakStmt&) { return Flow::Break; },
                    [](const ContinueStmt&) { return Flow::Continue; },
                },
                s.node);
        } catch (ScriptError& e) {
            e.set_pos_if_unknown(s.pos);
            throw;
        } catch (ResourceExceeded& e) {
            e.set_pos_if_unknown(s.pos);
            throw;
        }
    }

    void check_assignable(const std::string& name, SourcePos pos) const {
        if (is_reserved_name(name))
            throw ScriptError("cannot assign to reserved name '" + name + "'", pos);
    }

    void echo(const std::string& name, const Value& v) {
        st_.print(name + " = " + summarize(v, 1000) + "\n");
    }

    void store(const std::string& name, Value v) {
        check_value(v);
        st_.ws.set(name, std::move(v));
    }

    void check_value(const Value& v) const {
        if (v.is_vector() || v.is_string() || v.is_list()) st_.check_length(v.length());
        if (v.is_list() && v.depth() > kMaxListDepth)
            throw ResourceExceeded("list nesting deeper than " + std::to_string(kMaxListDepth));
    }

    void exec_assign(const AssignStmt& n, bool show) {
        check_assignable(n.name, n.name_pos);
        if (!n.index) {
            Value v = eval(*n.value);
            store(n.name, std::move(v));
        } else {
            assign_indexed(n);
        }
        if (show) echo(n.name, *st_.ws.find(n.name));
    }

    void exec_multi_assign(const MultiAssignStmt& n, bool show) {
        for (std::size_t i = 0; i < n.names.size(); ++i) check_assignable(n.names[i], n.name_pos[i]);
        const auto& call = std::get<CallOrIndex>(n.call->node);
        if (st_.ws.contains(call.name))
            throw ScriptError("'" + call.name + "' is a variable; multiple assignment needs a function call",
                              n.call->pos);
        auto results = call_builtin(call, n.call->pos, static_cast<int>(n.names.size()));
        if (results.size() < n.names.size())
            throw ScriptError("'" + call.name + "' returns " + std::to_string(results.size()) + " value(s) but " +
                                  std::to_string(n.names.size()) + " were requested",
                              n.call->pos);
        for (std::size_t i = 0; i < n.names.size(); ++i) {
            store(n.names[i], std::move(results[i]));
            if (show) echo(n.names[i], *st_.ws.find(n.names[i]));
        }
    }

    void exec_expr_stmt(const ExprStmt& n, bool show) {
        const Expr& e = *n.expr;
        if (const auto* id = std::get_if<Identifier>(&e.node); id && st_.ws.contains(id->name)) {
            tick(e.pos);
            if (show) echo(id->name, *st_.ws.find(id->name));
            return;
        }
        std::vector<Value> results;
        if (const auto* id = std::get_if<Identifier>(&e.node); id && st_.builtins.contains(id->name)) {
            tick(e.pos);
            CallOrIndex c{id->name, {}, false};
            results = call_builtin(c, e.pos, 0);
        } else if (const auto* c = std::get_if<CallOrIndex>(&e.node);
                   c && !c->brace && !st_.ws.contains(c->name) && st_.builtins.contains(c->name)) {
            tick(e.pos);
            results = call_builtin(*c, e.pos, 0);
        } else {
            results.push_back(eval(e));
        }
        if (results.empty()) return;
        store("ans", std::move(results.front()));
        if (show) echo("ans", *st_.ws.find("ans"));
    }

    Flow exec_for(const ForStmt& n) {
        check_assignable(n.var, n.var_pos);
        auto body = [&]() -> bool {
            const Flow f = exec_block(n.body);
            return f != Flow::Break;
        };
        if (const auto* r = std::get_if<RangeExpr>(&n.range->node)) {
            tick(n.range->pos);
            const double start = eval(*r->start).scalar("range start");
            const double step = r->step ? eval(*r->step).scalar("range step") : 1.0;
            const double stop = eval(*r->stop).scalar("range end");
            const double count = range_count(start, step, stop, n.range->pos);
            for (double k = 0; k < count; ++k) {
                st_.ws.set(n.var, Value(start + k * step));
                if (!body()) break;
            }
            return Flow::Normal;
        }
        const Value seq = eval(*n.range);
        if (seq.is_list()) {
            for (const auto& item : seq.list()) {
                st_.ws.set(n.var, item);
                if (!body()) break;
            }
        } else if (seq.is_string()) {
            for (char c : seq.string()) {
                st_.ws.set(n.var, Value(std::string(1, c)));
                if (!body()) break;
            }
        } else {
            for (double x : seq.to_doubles()) {
                st_.ws.set(n.var, Value(x));
                if (!body()) break;
            }
        }
        return Flow::Normal;
    }

    Flow exec_while(const WhileStmt& n) {
        while (truthy(eval(*n.cond), n.cond->pos)) {
            tick(n.cond->pos);
            if (exec_block(n.body) == Flow::Break) break;
        }
        return Flow::Normal;
    }

    // ---- indexing -----------------------------------------------------------

    static std::size_t to_index(double x, SourcePos pos) {
        if (!is_integer(x) || x < 1)
            throw ScriptError("index must be a positive integer, got " + format_number(x), pos);
        return static_cast<std::size_t>(x);
    }

    std::vector<std::size_t> indices(const Value& idx, SourcePos pos) {
        if (idx.is_list() || idx.is_string()) throw ScriptError("index must be numeric", pos);
        std::vector<std::size_t> out;
        for (double x : idx.to_doubles()) out.push_back(to_index(x, pos));
        return out;
    }

    std::vector<Value> eval_index_args(const std::vector<ExprPtr>& args, std::size_t end_value, SourcePos pos) {
        if (args.empty()) throw ScriptError("an index is required", pos);
        end_stack_.push_back(end_value);
        std::vector<Value> out;
        try {
            for (const auto& a : args) out.push_back(eval(*a));
        } catch (...) {
            end_stack_.pop_back();
            throw;
        }
        end_stack_.pop_back();
        if (out.size() == 2) {
            // v(1, k) addresses a row vector
            const auto first = out.front().to_doubles();
            if (first.size() != 1 || first[0] != 1)
                throw ScriptError("only row vectors are supported: the first of two indices must be 1", pos);
            out.erase(out.begin());
        }
        if (out.size() != 1) throw ScriptError("at most two indices are supported", pos);
        return out;
    }

    Value index_value(const Value& base, const Value& idx, bool brace, SourcePos pos) {
        const auto ix = indices(idx, pos);
        const std::size_t len = base.length();
        for (auto i : ix)
            if (i > len)
                throw ScriptError("index " + std::to_string(i) + " out of bounds; valid range is 1.." +
                                      std::to_string(len),
                                  pos);
        if (brace) {
            if (!base.is_list()) throw ScriptError("brace indexing requires a list", pos);
            if (ix.size() != 1) throw ScriptError("brace indexing takes a single index", pos);
            return base.list()[ix[0] - 1];
        }
        switch (base.type()) {
        case ValueType::String: {
            std::string out;
            for (auto i : ix) out += base.string()[i - 1];
            return Value(std::move(out));
        }
        case ValueType::List: {
            List out;
            for (auto i : ix) out.push_back(base.list()[i - 1]);
            return Value::list(std::move(out));
        }
        case ValueType::Bool: return base;
        case ValueType::Vector: {
            const auto& data = base.vector();
            std::vector<double> out;
            out.reserve(ix.size());
            for (auto i : ix) out.push_back(data[i - 1]);
            return Value::numeric(std::move(out));
        }
        default: {
            const auto data = base.to_doubles();
            std::vector<double> out;
            out.reserve(ix.size());
            for (auto i : ix) out.push_back(data[i - 1]);
            return Value::numeric(std::move(out));
        }
        }
    }

    void assign_indexed(const AssignStmt& n) {
        Value* slot = st_.ws.find_mutable(n.name);
        const std::size_t len = slot ? slot->length() : 0;
        const auto args = eval_index_args(n.index->args, len, n.name_pos);
        Value rhs = eval(*n.value);
        slot = st_.ws.find_mutable(n.name);  // evaluation may have grown the workspace
        const auto ix = indices(args[0], n.name_pos);
        std::size_t max_index = len;
        for (auto i : ix) max_index = std::max(max_index, i);
        st_.check_length(max_index);

        if (n.index->brace) {
            if (ix.size() != 1) throw ScriptError("brace assignment takes a single index", n.name_pos);
            List items;
            if (slot) {
                if (!slot->is_list() && slot->length() != 0)
                    throw ScriptError("'" + n.name + "' is not a list", n.name_pos);
                if (slot->is_list()) items = slot->list();
            }
            if (items.size() < max_index) items.resize(max_index, Value());
            items[ix[0] - 1] = std::move(rhs);
            store(n.name, Value::list(std::move(items)));
            return;
        }

        if (slot && slot->is_list()) throw ScriptError("use braces to assign list elements", n.name_pos);

        // v(k) = [] deletes elements
        if (rhs.is_vector() && rhs.length() == 0 && slot && !slot->is_string()) {
            auto data = slot->to_doubles();
            std::vector<bool> drop(data.size(), false);
            for (auto i : ix) {
                if (i > data.size())
                    throw ScriptError("index " + std::to_string(i) + " out of bounds for deletion", n.name_pos);
                drop[i - 1] = true;
            }
            std::vector<double> kept;
            for (std::size_t i = 0; i < data.size(); ++i)
                if (!drop[i]) kept.push_back(data[i]);
            store(n.name, Value::numeric(std::move(kept)));
            return;
        }

        if (rhs.length() != 1 && rhs.length() != ix.size())
            throw ScriptError("assignment mismatch: " + std::to_string(ix.size()) + " index position(s) but " +
                                  std::to_string(rhs.length()) + " value(s)",
                              n.name_pos);

        const bool string_target = slot && slot->is_string();
        if (string_target) {
            if (!rhs.is_string()) throw ScriptError("cannot assign numbers into a string", n.name_pos);
            std::string s = slot->string();
            if (s.size() < max_index) s.resize(max_index, ' ');
            for (std::size_t k = 0; k < ix.size(); ++k)
                s[ix[k] - 1] = rhs.string()[rhs.length() == 1 ? 0 : k];
            store(n.name, Value(std::move(s)));
            return;
        }
        if (rhs.is_list()) throw ScriptError("cannot assign a list into a vector", n.name_pos);
        const auto values = rhs.to_doubles();
        if (slot && slot->is_vector() && max_index <= len) {
            auto& data = slot->vector_mut();
            for (std::size_t k = 0; k < ix.size(); ++k) data[ix[k] - 1] = values[values.size() == 1 ? 0 : k];
            return;
        }
        std::vector<double> data = slot ? slot->to_doubles() : std::vector<double>{};
        if (data.size() < max_index) data.resize(max_index, 0.0);
        for (std::size_t k = 0; k < ix.size(); ++k) data[ix[k] - 1] = values[values.size() == 1 ? 0 : k];
        store(n.name, Value::numeric(std::move(data)));
    }

    // ---- expressions --------------------------------------------------------

    static double range_count(double start, double step, double stop, SourcePos pos) {
        if (!std::isfinite(start) || !std::isfinite(step) || !std::isfinite(stop))
            throw ScriptError("range bounds must be finite", pos);
        if (step == 0) return 0;
        const double n = std::floor((stop - start) / step + 1e-10) + 1;
        return n > 0 ? n : 0;
    }

    Value eval(const Expr& e) {
        tick(e.pos);
        try {
            return eval_node(e);
        } catch (ScriptError& err) {
            err.set_pos_if_unknown(e.pos);
            throw;
        } catch (ResourceExceeded& err) {
            err.set_pos_if_unknown(e.pos);
            throw;
        }
    }

    Value eval_node(const Expr& e) {
        return std::visit(
            overloaded{
                [](const NumberLit& n) { return Value(n.value); },
                [](const StringLit& n) { return Value(n.value); },
                [](const BoolLit& n) { return Value(n.value); },
                [&](const Identifier& n) {
                    if (const Value* v = st_.ws.find(n.name)) return *v;
                    if (st_.builtins.contains(n.name)) {
                        CallOrIndex c{n.name, {}, false};
                        return first_result(c, e.pos);
                    }
                    throw ScriptError("undefined identifier '" + n.name + "'", e.pos);
                },
                [&](const CallOrIndex& n) {
                    if (const Value* v = st_.ws.find(n.name)) {
                        const auto args = eval_index_args(n.args, v->length(), e.pos);
                        // re-lookup: evaluating arguments cannot add names, but keep it obvious
                        return index_value(*st_.ws.find(n.name), args[0], n.brace, e.pos);
                    }
                    if (n.brace) throw ScriptError("undefined identifier '" + n.name + "'", e.pos);
                    return first_result(n, e.pos);
                },
                [&](const IndexExpr& n) {
                    const Value base = eval(*n.base);
                    const auto args = eval_index_args(n.args, base.length(), e.pos);
                    return index_value(base, args[0], n.brace, e.pos);
                },
                [&](const RangeExpr& n) {
                    const double start = eval(*n.start).scalar("range start");
                    const double step = n.step ? eval(*n.step).scalar("range step") : 1.0;
                    const double stop = eval(*n.stop).scalar("range end");
                    const double count = range_count(start, step, stop, e.pos);
                    if (count > static_cast<double>(st_.limits.max_vector_length))
                        st_.check_length(st_.limits.max_vector_length + 1);
                    std::vector<double> out(static_cast<std::size_t>(count));
                    for (std::size_t k = 0; k < out.size(); ++k) out[k] = start + static_cast<double>(k) * step;
                    return Value::numeric(std::move(out));
                },
                [&](const MatrixExpr& n) { return concat(n, e.pos); },
                [&](const ListExpr& n) {
                    List items;
                    for (const auto& a : n.elements) items.push_back(eval(*a));
                    Value v = Value::list(std::move(items));
                    check_value(v);
                    return v;
                },
                [&](const BinaryExpr& n) { return binary(n, e.pos); },
                [&](const UnaryExpr& n) { return unary(n.op, eval(*n.operand), e.pos); },
                [&](const TransposeExpr& n) {
                    Value v = eval(*n.operand);
                    if (v.is_list()) throw ScriptError("cannot transpose a list", e.pos);
                    return v;
                },
                [&](const EndExpr&) {
                    if (end_stack_.empty()) throw ScriptError("'end' used outside of an index", e.pos);
                    return Value(static_cast<double>(end_stack_.back()));
                },
            },
            e.node);
    }

    Value first_result(const CallOrIndex& c, SourcePos pos) {
        auto results = call_builtin(c, pos, 1);
        if (results.empty()) throw ScriptError("'" + c.name + "' does not return a value", pos);
        return std::move(results.front());
    }

    std::vector<Value> call_builtin(const CallOrIndex& c, SourcePos pos, int nargout) {
        const Builtin* b = st_.builtins.find(c.name);
        if (!b) throw ScriptError("unknown function '" + c.name + "'", pos);
        for (const auto& a : c.args)
            if (std::holds_alternative<EndExpr>(a->node) && end_stack_.empty())
                throw ScriptError("'end' used outside of an index", a->pos);
        std::vector<Value> args;
        args.reserve(c.args.size());
        for (const auto& a : c.args) args.push_back(eval(*a));
        const int n = static_cast<int>(args.size());
        if (n < b->arity.min_args || (b->arity.max_args >= 0 && n > b->arity.max_args)) {
            std::string expected = std::to_string(b->arity.min_args);
            if (b->arity.max_args != b->arity.min_args)
                expected += b->arity.max_args < 0 ? " or more" : " to " + std::to_string(b->arity.max_args);
            throw ScriptError("'" + c.name + "' expects " + expected + " argument(s), got " + std::to_string(n), pos);
        }
        if (nargout > b->arity.max_outputs)
            throw ScriptError("'" + c.name + "' returns at most " + std::to_string(b->arity.max_outputs) +
                                  " value(s)",
                              pos);
        CallContext ctx(st_, b->name, pos, nargout);
        std::vector<Value> results;
        try {
            results = b->fn(ctx, args);
        } catch (ScriptError& e) {
            e.set_pos_if_unknown(pos);
            throw;
        } catch (ResourceExceeded& e) {
            e.set_pos_if_unknown(pos);
            throw;
        } catch (const std::bad_alloc&) {
            throw ResourceExceeded("out of memory in '" + c.name + "'", pos);
        } catch (const std::exception& e) {
            throw ScriptError(c.name + ": " + e.what(), pos);
        }
        for (const auto& r : results) check_value(r);
        return results;
    }

    Value concat(const MatrixExpr& n, SourcePos pos) {
        std::vector<Value> parts;
        parts.reserve(n.elements.size());
        for (const auto& a : n.elements) parts.push_back(eval(*a));
        bool any_string = false, any_numeric = false;
        std::size_t total = 0;
        for (const auto& p : parts) {
            if (p.is_list()) throw ScriptError("cannot concatenate lists with []; use {}", pos);
            if (p.is_vector() && p.length() == 0) continue;
            (p.is_string() ? any_string : any_numeric) = true;
            total += p.length();
        }
        if (any_string && any_numeric) throw ScriptError("cannot concatenate strings and numbers", pos);
        st_.check_length(total);
        if (any_string) {
            std::string out;
            out.reserve(total);
            for (const auto& p : parts)
                if (p.is_string()) out += p.string();
            return Value(std::move(out));
        }
        std::vector<double> out;
        out.reserve(total);
        for (const auto& p : parts) {
            const auto d = p.to_doubles();
            out.insert(out.end(), d.begin(), d.end());
        }
        return Value::numeric(std::move(out));
    }

    static bool truthy(const Value& v, SourcePos pos) {
        if (v.is_bool()) return v.boolean();
        if (v.is_list()) throw ScriptError("a list cannot be used as a condition", pos);
        const auto d = v.to_doubles();
        if (d.empty()) return false;
        for (double x : d)
            if (x == 0) return false;
        return true;
    }

    static bool scalar_truth(const Value& v, std::string_view op, SourcePos pos) {
        if (v.is_list() || v.length() != 1)
            throw ScriptError("operands of '" + std::string(op) + "' must be scalars", pos);
        return truthy(v, pos);
    }

    Value binary(const BinaryExpr& n, SourcePos pos) {
        if (n.op == BinaryOp::AndAnd) {
            if (!scalar_truth(eval(*n.lhs), "&&", pos)) return Value(false);
            return Value(scalar_truth(eval(*n.rhs), "&&", pos));
        }
        if (n.op == BinaryOp::OrOr) {
            if (scalar_truth(eval(*n.lhs), "||", pos)) return Value(true);
            return Value(scalar_truth(eval(*n.rhs), "||", pos));
        }
        const Value a = eval(*n.lhs);
        const Value b = eval(*n.rhs);
        return elementwise(n.op, a, b, pos);
    }

    static double apply(BinaryOp op, double x, double y) {
        switch (op) {
        case BinaryOp::Add: return x + y;
        case BinaryOp::Sub: return x - y;
        case BinaryOp::Mul:
        case BinaryOp::ElemMul: return x * y;
        case BinaryOp::Div:
        case BinaryOp::ElemDiv: return x / y;
        case BinaryOp::Pow:
        case BinaryOp::ElemPow: return std::pow(x, y);
        case BinaryOp::Eq: return x == y;
        case BinaryOp::Ne: return x != y;
        case BinaryOp::Lt: return x < y;
        case BinaryOp::Le: return x <= y;
        case BinaryOp::Gt: return x > y;
        case BinaryOp::Ge: return x >= y;
        case BinaryOp::And: return (x != 0) && (y != 0);
        case BinaryOp::Or: return (x != 0) || (y != 0);
        default: return 0;
        }
    }

    static bool is_comparison(BinaryOp op) {
        switch (op) {
        case BinaryOp::Eq:
        case BinaryOp::Ne:
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge:
        case BinaryOp::And:
        case BinaryOp::Or: return true;
        default: return false;
        }
    }

    Value elementwise(BinaryOp op, const Value& a, const Value& b, SourcePos pos) {
        if (a.is_list() || b.is_list())
            throw ScriptError("operator '" + std::string(spelling(op)) + "' cannot be applied to a list", pos);
        const auto x = a.to_doubles();
        const auto y = b.to_doubles();
        const bool scalar_result = x.size() == 1 && y.size() == 1 && !a.is_vector() && !b.is_vector();
        std::vector<double> out;
        if (x.size() == y.size()) {
            out.resize(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = apply(op, x[i], y[i]);
        } else if (x.size() == 1) {
            out.resize(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) out[i] = apply(op, x[0], y[i]);
        } else if (y.size() == 1) {
            out.resize(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = apply(op, x[i], y[0]);
        } else {
            throw ScriptError("shape mismatch in '" + std::string(spelling(op)) + "': lengths " +
                                  std::to_string(x.size()) + " and " + std::to_string(y.size()),
                              pos);
        }
        for (double v : out)
            if (!std::isfinite(v))
                throw ScriptError("'" + std::string(spelling(op)) + "' produced a non-finite value", pos);
        if (is_comparison(op) && scalar_result) return Value(out[0] != 0);
        return Value::numeric(std::move(out));
    }

    static Value unary(UnaryOp op, const Value& v, SourcePos pos) {
        if (v.is_list()) throw ScriptError("unary operator cannot be applied to a list", pos);
        if (op == UnaryOp::Not) {
            if (v.is_bool()) return Value(!v.boolean());
            auto d = v.to_doubles();
            if (d.size() == 1 && !v.is_vector()) return Value(d[0] == 0);
            for (auto& x : d) x = x == 0 ? 1.0 : 0.0;
            return Value::numeric(std::move(d));
        }
        auto d = v.to_doubles();
        if (op == UnaryOp::Neg)
            for (auto& x : d) x = -x;
        return Value::numeric(std::move(d));
    }

    ExecState& st_;
    std::vector<std::size_t> end_stack_;
};

}  // namespace

ExecOutcome execute(const Program& program, const BuiltinRegistry& builtins, const ExecLimits& limits) {
    ExecState st(builtins, limits);
    ExecOutcome out;
    out.seed = st.rng.seed();
    try {
        Interpreter(st).run(program);
    } catch (const ScriptError& e) {
        out.status = ExecStatus::ScriptError;
        out.error = ExecError{e.what(), e.pos(), false};
    } catch (const ResourceExceeded& e) {
        out.status = ExecStatus::ResourceExceeded;
        out.error = ExecError{e.what(), e.pos(), false};
    } catch (const std::bad_alloc&) {
        out.status = ExecStatus::ResourceExceeded;
        out.error = ExecError{"out of memory", {}, false};
    }
    out.workspace = std::move(st.ws);
    out.figures = std::move(st.figures);
    out.printed = std::move(st.printed);
    out.steps = std::min(st.steps, limits.max_steps);
    return out;
}

ExecOutcome run_source(std::string_view source, const BuiltinRegistry& builtins, const ExecLimits& limits) {
    Program program;
    try {
        program = parse_source(source);
    } catch (const SyntaxError& e) {
        ExecOutcome out;
        out.status = ExecStatus::ScriptError;
        out.error = ExecError{e.what(), e.pos(), true};
        out.seed = limits.seed.value_or(0);
        return out;
    }
    return execute(program, builtins, limits);
}

}  // namespace commlab::script
