#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "commlab/script/source.hpp"

namespace commlab::script {

enum class BinaryOp {
    Add, Sub, Mul, Div, Pow,       // + - * / ^  (elementwise on vectors)
    ElemMul, ElemDiv, ElemPow,     // .* ./ .^
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or,                       // & |
    AndAnd, OrOr,                  // && ||  (short-circuit, scalar)
};

enum class UnaryOp { Neg, Plus, Not };

std::string_view spelling(BinaryOp op);
std::string_view spelling(UnaryOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct NumberLit { double value; };
struct StringLit { std::string value; };
struct BoolLit { bool value; };
struct Identifier { std::string name; };
/// `name(args)` or `name{args}`: indexing when `name` is a variable, otherwise a builtin call.
struct CallOrIndex {
    std::string name;
    std::vector<ExprPtr> args;
    bool brace = false;
};
/// Postfix indexing of an arbitrary expression, e.g. `c{2}(3)`.
struct IndexExpr {
    ExprPtr base;
    std::vector<ExprPtr> args;
    bool brace = false;
};
struct RangeExpr { ExprPtr start, step, stop; };  // step may be null
struct MatrixExpr { std::vector<ExprPtr> elements; };
struct ListExpr { std::vector<ExprPtr> elements; };
struct BinaryExpr { BinaryOp op; ExprPtr lhs, rhs; };
struct UnaryExpr { UnaryOp op; ExprPtr operand; };
struct TransposeExpr { ExprPtr operand; };
struct EndExpr {};  // `end` inside an index: length of the indexed value

struct Expr {
    SourcePos pos;
    std::variant<NumberLit, StringLit, BoolLit, Identifier, CallOrIndex, IndexExpr, RangeExpr,
                 MatrixExpr, ListExpr, BinaryExpr, UnaryExpr, TransposeExpr, EndExpr>
        node;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct IndexSpec {
    std::vector<ExprPtr> args;
    bool brace = false;
};

struct AssignStmt {
    std::string name;
    SourcePos name_pos;
    std::optional<IndexSpec> index;
    ExprPtr value;
};
struct MultiAssignStmt {
    std::vector<std::string> names;
    std::vector<SourcePos> name_pos;
    ExprPtr call;
};
struct ExprStmt { ExprPtr expr; };
struct ForStmt {
    std::string var;
    SourcePos var_pos;
    ExprPtr range;
    Block body;
};
struct WhileStmt {
    ExprPtr cond;
    Block body;
};
struct IfBranch {
    ExprPtr cond;
    Block body;
};
struct IfStmt {
    std::vector<IfBranch> branches;
    std::optional<Block> otherwise;
};
struct BreakStmt {};
struct ContinueStmt {};

struct Stmt {
    SourcePos pos;
    bool echo = false;  // not terminated by ';'
    std::variant<AssignStmt, MultiAssignStmt, ExprStmt, ForStmt, WhileStmt, IfStmt, BreakStmt,
                 ContinueStmt>
        node;
};

struct Program {
    Block body;
};

/// Canonical LabScript text for the program. Re-parsing the output yields a
/// structurally identical tree.
std::string unparse(const Program& program);
std::string unparse(const Expr& expr);

/// Position-free S-expression of the tree, used for structural comparison.
std::string dump(const Program& program);
std::string dump(const Expr& expr);

/// Calls `visit(const Expr&)` for every expression node in the program.
template <class F>
void for_each_expr(const Program& program, F&& visit);

}  // namespace commlab::script

#include "commlab/script/ast_visit.inl"
