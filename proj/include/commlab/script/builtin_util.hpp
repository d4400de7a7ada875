#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "commlab/script/registry.hpp"

namespace commlab::script {

// Argument helpers shared by builtin families. All of them report through
// ctx.fail(), so messages carry the builtin name and the call position.

inline std::vector<double> arg_vector(CallContext& ctx, const Value& v, const char* what) {
    if (v.is_list()) ctx.fail(std::string(what) + " must be numeric, got a list");
    if (v.is_string()) ctx.fail(std::string(what) + " must be numeric, got a string");
    return v.to_doubles();
}

inline double arg_scalar(CallContext& ctx, const Value& v, const char* what) {
    if (!v.is_numeric() || v.length() != 1) ctx.fail(std::string(what) + " must be a scalar");
    return v.to_doubles()[0];
}

inline long long arg_count(CallContext& ctx, const Value& v, const char* what, long long min_value = 0) {
    const double x = arg_scalar(ctx, v, what);
    if (!std::isfinite(x) || std::floor(x) != x)
        ctx.fail(std::string(what) + " must be an integer, got " + format_number(x));
    if (x < static_cast<double>(min_value))
        ctx.fail(std::string(what) + " must be at least " + std::to_string(min_value) + ", got " + format_number(x));
    if (x > 1e15) ctx.fail(std::string(what) + " is too large");
    return static_cast<long long>(x);
}

inline const std::string& arg_string(CallContext& ctx, const Value& v, const char* what) {
    if (!v.is_string()) ctx.fail(std::string(what) + " must be a string");
    return v.string();
}

inline std::vector<double> arg_bits(CallContext& ctx, const Value& v, const char* what) {
    auto bits = arg_vector(ctx, v, what);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] != 0 && bits[i] != 1)
            ctx.fail(std::string(what) + " must contain only 0 and 1; element " + std::to_string(i + 1) + " is " +
                     format_number(bits[i]));
    return bits;
}

inline std::vector<Value> one(Value v) {
    std::vector<Value> out;
    out.push_back(std::move(v));
    return out;
}

}  // namespace commlab::script
