#pragma once

#include <string_view>
#include <vector>

#include "commlab/script/ast.hpp"
#include "commlab/script/lexer.hpp"

namespace commlab::script {

/// Builds a Program from a token stream produced by tokenize(). Throws
/// SyntaxError with the offending position and a hint of what was expected.
Program parse(const std::vector<Token>& tokens);

/// tokenize() followed by parse().
Program parse_source(std::string_view source);

/// Nesting limit for blocks and expressions; deeper input is a syntax error.
inline constexpr int kMaxParseDepth = 200;

}  // namespace commlab::script
