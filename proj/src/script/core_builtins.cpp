#include "commlab/script/core_builtins.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "commlab/script/builtin_util.hpp"

namespace commlab::script {

namespace {

using Args = std::span<const Value>;

BuiltinFn unary_math(double (*f)(double)) {
    return [f](CallContext& ctx, Args a) {
        auto v = arg_vector(ctx, a[0], "argument");
        for (auto& x : v) x = f(x);
        return one(Value::numeric(std::move(v)));
    };
}

Value filled(CallContext& ctx, Args a, double fill) {
    long long n = 0;
    if (a.size() == 1) {
        n = arg_count(ctx, a[0], "size");
    } else {
        const auto rows = arg_count(ctx, a[0], "rows");
        const auto cols = arg_count(ctx, a[1], "columns");
        if (rows != 1 && cols != 1 && rows * cols != 0) ctx.fail("only vectors are supported (one dimension must be 1)");
        n = rows * cols;
    }
    ctx.check_length(static_cast<std::size_t>(n));
    return Value::numeric(std::vector<double>(static_cast<std::size_t>(n), fill));
}

std::vector<Value> extremum(CallContext& ctx, Args a, bool want_max) {
    if (a.size() == 2) {
        const auto x = arg_vector(ctx, a[0], "first argument");
        const auto y = arg_vector(ctx, a[1], "second argument");
        if (x.size() != y.size() && x.size() != 1 && y.size() != 1)
            ctx.fail("arguments must have equal lengths or be scalars");
        const std::size_t n = std::max(x.size(), y.size());
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = x[x.size() == 1 ? 0 : i], q = y[y.size() == 1 ? 0 : i];
            out[i] = want_max ? std::max(p, q) : std::min(p, q);
        }
        return one(Value::numeric(std::move(out)));
    }
    const auto v = arg_vector(ctx, a[0], "argument");
    if (v.empty()) return {Value(), Value()};
    const auto it = want_max ? std::max_element(v.begin(), v.end()) : std::min_element(v.begin(), v.end());
    return {Value(*it), Value(static_cast<double>(it - v.begin() + 1))};
}

std::string num2str(const Value& v) {
    if (v.is_string()) return v.string();
    if (v.is_bool()) return v.boolean() ? "1" : "0";
    if (v.is_number()) return format_number(v.number());
    std::string out;
    for (double x : v.to_doubles()) {
        if (!out.empty()) out += "  ";
        out += format_number(x);
    }
    return out;
}

}  // namespace

void register_core(BuiltinRegistry& reg) {
    reg.add("disp", {1, 1, 0}, [](CallContext& ctx, Args a) {
        if (a[0].is_list()) ctx.fail("cannot display a list; display its elements");
        ctx.print((a[0].is_string() ? a[0].string() : num2str(a[0])) + "\n");
        return std::vector<Value>{};
    });
    reg.add("num2str", {1, 1, 1}, [](CallContext& ctx, Args a) {
        if (a[0].is_list()) ctx.fail("argument must not be a list");
        return one(Value(num2str(a[0])));
    });
    reg.add("length", {1, 1, 1}, [](CallContext&, Args a) {
        return one(Value(static_cast<double>(a[0].length())));
    });
    reg.add("numel", {1, 1, 1}, [](CallContext&, Args a) {
        return one(Value(static_cast<double>(a[0].length())));
    });
    reg.add("isempty", {1, 1, 1}, [](CallContext&, Args a) { return one(Value(a[0].length() == 0)); });
    reg.add("zeros", {1, 2, 1}, [](CallContext& ctx, Args a) { return one(filled(ctx, a, 0.0)); });
    reg.add("ones", {1, 2, 1}, [](CallContext& ctx, Args a) { return one(filled(ctx, a, 1.0)); });
    reg.add("floor", {1, 1, 1}, unary_math([](double x) { return std::floor(x); }));
    reg.add("ceil", {1, 1, 1}, unary_math([](double x) { return std::ceil(x); }));
    reg.add("round", {1, 1, 1}, unary_math([](double x) { return std::round(x); }));
    reg.add("abs", {1, 1, 1}, unary_math([](double x) { return std::fabs(x); }));
    reg.add("sqrt", {1, 1, 1}, [](CallContext& ctx, Args a) {
        auto v = arg_vector(ctx, a[0], "argument");
        for (auto& x : v) {
            if (x < 0) ctx.fail("argument must be nonnegative, got " + format_number(x));
            x = std::sqrt(x);
        }
        return one(Value::numeric(std::move(v)));
    });
    reg.add("mod", {2, 2, 1}, [](CallContext& ctx, Args a) {
        const auto x = arg_vector(ctx, a[0], "dividend");
        const auto y = arg_vector(ctx, a[1], "divisor");
        if (x.size() != y.size() && x.size() != 1 && y.size() != 1)
            ctx.fail("arguments must have equal lengths or be scalars");
        const std::size_t n = std::max(x.size(), y.size());
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = x[x.size() == 1 ? 0 : i], q = y[y.size() == 1 ? 0 : i];
            // result takes the sign of the divisor; mod(x, 0) is x
            out[i] = q == 0 ? p : p - std::floor(p / q) * q;
        }
        return one(Value::numeric(std::move(out)));
    });
    reg.add("sum", {1, 1, 1}, [](CallContext& ctx, Args a) {
        const auto v = arg_vector(ctx, a[0], "argument");
        return one(Value(std::accumulate(v.begin(), v.end(), 0.0)));
    });
    reg.add("mean", {1, 1, 1}, [](CallContext& ctx, Args a) {
        const auto v = arg_vector(ctx, a[0], "argument");
        if (v.empty()) ctx.fail("mean of an empty vector");
        return one(Value(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size())));
    });
    reg.add("max", {1, 2, 2}, [](CallContext& ctx, Args a) { return extremum(ctx, a, true); });
    reg.add("min", {1, 2, 2}, [](CallContext& ctx, Args a) { return extremum(ctx, a, false); });
    reg.add("double", {1, 1, 1}, [](CallContext& ctx, Args a) {
        if (a[0].is_list()) ctx.fail("argument must not be a list");
        return one(Value::numeric(a[0].to_doubles()));
    });
    reg.add("char", {1, 1, 1}, [](CallContext& ctx, Args a) {
        if (a[0].is_string()) return one(a[0]);
        std::string out;
        for (double x : arg_vector(ctx, a[0], "argument")) {
            if (x < 0 || x > 255 || std::floor(x) != x)
                ctx.fail("character codes must be integers in 0..255, got " + format_number(x));
            out += static_cast<char>(static_cast<unsigned char>(x));
        }
        return one(Value(std::move(out)));
    });
    reg.add("xor", {2, 2, 1}, [](CallContext& ctx, Args a) {
        const auto x = arg_vector(ctx, a[0], "first argument");
        const auto y = arg_vector(ctx, a[1], "second argument");
        if (x.size() != y.size() && x.size() != 1 && y.size() != 1)
            ctx.fail("arguments must have equal lengths (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
        const std::size_t n = std::max(x.size(), y.size());
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = ((x[x.size() == 1 ? 0 : i] != 0) != (y[y.size() == 1 ? 0 : i] != 0)) ? 1.0 : 0.0;
        return one(Value::numeric(std::move(out)));
    });
    reg.add("fliplr", {1, 1, 1}, [](CallContext& ctx, Args a) {
        if (a[0].is_string()) {
            std::string s = a[0].string();
            std::reverse(s.begin(), s.end());
            return one(Value(std::move(s)));
        }
        auto v = arg_vector(ctx, a[0], "argument");
        std::reverse(v.begin(), v.end());
        return one(Value::numeric(std::move(v)));
    });

    reg.add("figure", {0, 0, 0}, [](CallContext& ctx, Args) {
        ctx.new_figure();
        return std::vector<Value>{};
    });
    reg.add("plot", {1, 3, 0}, [](CallContext& ctx, Args a) {
        Curve c;
        std::size_t numeric = a.size();
        if (a.back().is_string()) {
            c.label = a.back().string();
            --numeric;
        }
        if (numeric == 0) ctx.fail("nothing to plot");
        if (numeric == 1) {
            c.y = arg_vector(ctx, a[0], "y");
            c.x.resize(c.y.size());
            std::iota(c.x.begin(), c.x.end(), 1.0);
        } else if (numeric == 2) {
            c.x = arg_vector(ctx, a[0], "x");
            c.y = arg_vector(ctx, a[1], "y");
        } else {
            ctx.fail("expected plot(y), plot(x, y) or plot(x, y, label)");
        }
        ctx.add_curve(std::move(c));
        return std::vector<Value>{};
    });
    reg.add("title", {1, 1, 0}, [](CallContext& ctx, Args a) {
        ctx.current_figure().title = arg_string(ctx, a[0], "title");
        return std::vector<Value>{};
    });
    reg.add("xlabel", {1, 1, 0}, [](CallContext& ctx, Args a) {
        ctx.current_figure().xlabel = arg_string(ctx, a[0], "label");
        return std::vector<Value>{};
    });
    reg.add("ylabel", {1, 1, 0}, [](CallContext& ctx, Args a) {
        ctx.current_figure().ylabel = arg_string(ctx, a[0], "label");
        return std::vector<Value>{};
    });
}

}  // namespace commlab::script
