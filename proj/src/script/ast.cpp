#include "commlab/script/ast.hpp"

#include "commlab/script/value.hpp"

namespace commlab::script {

using detail::overloaded;

std::string_view spelling(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "^";
    case BinaryOp::ElemMul: return ".*";
    case BinaryOp::ElemDiv: return "./";
    case BinaryOp::ElemPow: return ".^";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "~=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&";
    case BinaryOp::Or: return "|";
    case BinaryOp::AndAnd: return "&&";
    case BinaryOp::OrOr: return "||";
    }
    return "?";
}

std::string_view spelling(UnaryOp op) {
    switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Plus: return "+";
    case UnaryOp::Not: return "~";
    }
    return "?";
}

namespace {

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += '\'';
        out += c;
    }
    return out + "'";
}

std::string args_text(const std::vector<ExprPtr>& args) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += unparse(*args[i]);
    }
    return out;
}

std::string bracket(const std::vector<ExprPtr>& args, bool brace) {
    return (brace ? "{" : "(") + args_text(args) + (brace ? "}" : ")");
}

void unparse_block(const Block& block, int indent, std::string& out);

void unparse_stmt(const Stmt& s, int indent, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
    const std::string term = s.echo ? "\n" : ";\n";
    std::visit(overloaded{
                   [&](const AssignStmt& n) {
                       out += pad + n.name;
                       if (n.index) out += bracket(n.index->args, n.index->brace);
                       out += " = " + unparse(*n.value) + term;
                   },
                   [&](const MultiAssignStmt& n) {
                       out += pad + "[";
                       for (std::size_t i = 0; i < n.names.size(); ++i) {
                           if (i) out += ", ";
                           out += n.names[i];
                       }
                       out += "] = " + unparse(*n.call) + term;
                   },
                   [&](const ExprStmt& n) { out += pad + unparse(*n.expr) + term; },
                   [&](const ForStmt& n) {
                       out += pad + "for " + n.var + " = " + unparse(*n.range) + "\n";
                       unparse_block(n.body, indent + 1, out);
                       out += pad + "end\n";
                   },
                   [&](const WhileStmt& n) {
                       out += pad + "while " + unparse(*n.cond) + "\n";
                       unparse_block(n.body, indent + 1, out);
                       out += pad + "end\n";
                   },
                   [&](const IfStmt& n) {
                       for (std::size_t i = 0; i < n.branches.size(); ++i) {
                           out += pad + (i == 0 ? "if " : "elseif ") + unparse(*n.branches[i].cond) + "\n";
                           unparse_block(n.branches[i].body, indent + 1, out);
                       }
                       if (n.otherwise) {
                           out += pad + "else\n";
                           unparse_block(*n.otherwise, indent + 1, out);
                       }
                       out += pad + "end\n";
                   },
                   [&](const BreakStmt&) { out += pad + "break;\n"; },
                   [&](const ContinueStmt&) { out += pad + "continue;\n"; },
               },
               s.node);
}

void unparse_block(const Block& block, int indent, std::string& out) {
    for (const auto& s : block) unparse_stmt(s, indent, out);
}

std::string dump_list(const std::vector<ExprPtr>& items) {
    std::string out;
    for (const auto& a : items) out += " " + dump(*a);
    return out;
}

std::string dump_block(const Block& block);

std::string dump_stmt(const Stmt& s) {
    const std::string echo = s.echo ? " echo" : "";
    return std::visit(
        overloaded{
            [&](const AssignStmt& n) {
                std::string out = "(assign " + n.name;
                if (n.index) out += std::string(n.index->brace ? " {" : " (") + dump_list(n.index->args) + ")";
                return out + " " + dump(*n.value) + echo + ")";
            },
            [&](const MultiAssignStmt& n) {
                std::string out = "(massign";
                for (const auto& name : n.names) out += " " + name;
                return out + " " + dump(*n.call) + echo + ")";
            },
            [&](const ExprStmt& n) { return "(expr " + dump(*n.expr) + echo + ")"; },
            [&](const ForStmt& n) {
                return "(for " + n.var + " " + dump(*n.range) + " " + dump_block(n.body) + ")";
            },
            [&](const WhileStmt& n) { return "(while " + dump(*n.cond) + " " + dump_block(n.body) + ")"; },
            [&](const IfStmt& n) {
                std::string out = "(if";
                for (const auto& b : n.branches) out += " (" + dump(*b.cond) + " " + dump_block(b.body) + ")";
                if (n.otherwise) out += " (else " + dump_block(*n.otherwise) + ")";
                return out + ")";
            },
            [](const BreakStmt&) { return std::string("(break)"); },
            [](const ContinueStmt&) { return std::string("(continue)"); },
        },
        s.node);
}

std::string dump_block(const Block& block) {
    std::string out = "(block";
    for (const auto& s : block) out += " " + dump_stmt(s);
    return out + ")";
}

}  // namespace

std::string unparse(const Expr& e) {
    return std::visit(
        overloaded{
            [](const NumberLit& n) { return format_number(n.value); },
            [](const StringLit& n) { return quote(n.value); },
            [](const BoolLit& n) { return std::string(n.value ? "true" : "false"); },
            [](const Identifier& n) { return n.name; },
            [](const CallOrIndex& n) { return n.name + bracket(n.args, n.brace); },
            [](const IndexExpr& n) {
                const bool postfix = std::holds_alternative<CallOrIndex>(n.base->node) ||
                                     std::holds_alternative<IndexExpr>(n.base->node);
                std::string base = unparse(*n.base);
                if (!postfix) base = "(" + base + ")";
                return base + bracket(n.args, n.brace);
            },
            [](const RangeExpr& n) {
                std::string out = "(" + unparse(*n.start) + ":";
                if (n.step) out += unparse(*n.step) + ":";
                return out + unparse(*n.stop) + ")";
            },
            [](const MatrixExpr& n) { return "[" + args_text(n.elements) + "]"; },
            [](const ListExpr& n) { return "{" + args_text(n.elements) + "}"; },
            [](const BinaryExpr& n) {
                return "(" + unparse(*n.lhs) + " " + std::string(spelling(n.op)) + " " + unparse(*n.rhs) + ")";
            },
            [](const UnaryExpr& n) { return "(" + std::string(spelling(n.op)) + unparse(*n.operand) + ")"; },
            [](const TransposeExpr& n) { return "(" + unparse(*n.operand) + ")'"; },
            [](const EndExpr&) { return std::string("end"); },
        },
        e.node);
}

std::string unparse(const Program& program) {
    std::string out;
    unparse_block(program.body, 0, out);
    return out;
}

std::string dump(const Expr& e) {
    return std::visit(
        overloaded{
            [](const NumberLit& n) { return "(num " + format_number(n.value) + ")"; },
            [](const StringLit& n) { return "(str " + quote(n.value) + ")"; },
            [](const BoolLit& n) { return std::string(n.value ? "(true)" : "(false)"); },
            [](const Identifier& n) { return "(id " + n.name + ")"; },
            [](const CallOrIndex& n) {
                return std::string(n.brace ? "(cell " : "(call ") + n.name + dump_list(n.args) + ")";
            },
            [](const IndexExpr& n) {
                return std::string(n.brace ? "(cellidx " : "(idx ") + dump(*n.base) + dump_list(n.args) + ")";
            },
            [](const RangeExpr& n) {
                return "(range " + dump(*n.start) + " " + (n.step ? dump(*n.step) : "_") + " " + dump(*n.stop) + ")";
            },
            [](const MatrixExpr& n) { return "(matrix" + dump_list(n.elements) + ")"; },
            [](const ListExpr& n) { return "(list" + dump_list(n.elements) + ")"; },
            [](const BinaryExpr& n) {
                return "(" + std::string(spelling(n.op)) + " " + dump(*n.lhs) + " " + dump(*n.rhs) + ")";
            },
            [](const UnaryExpr& n) { return "(u" + std::string(spelling(n.op)) + " " + dump(*n.operand) + ")"; },
            [](const TransposeExpr& n) { return "(transpose " + dump(*n.operand) + ")"; },
            [](const EndExpr&) { return std::string("(end)"); },
        },
        e.node);
}

std::string dump(const Program& program) {
    return dump_block(program.body);
}

}  // namespace commlab::script
