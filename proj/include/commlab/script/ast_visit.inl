#pragma once

// Implementation of for_each_expr; included from ast.hpp.

namespace commlab::script {

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <class F>
void walk_expr(const Expr& e, F& visit) {
    visit(e);
    auto sub = [&](const ExprPtr& p) {
        if (p) walk_expr(*p, visit);
    };
    std::visit(overloaded{
                   [&](const CallOrIndex& n) { for (const auto& a : n.args) sub(a); },
                   [&](const IndexExpr& n) {
                       sub(n.base);
                       for (const auto& a : n.args) sub(a);
                   },
                   [&](const RangeExpr& n) {
                       sub(n.start);
                       sub(n.step);
                       sub(n.stop);
                   },
                   [&](const MatrixExpr& n) { for (const auto& a : n.elements) sub(a); },
                   [&](const ListExpr& n) { for (const auto& a : n.elements) sub(a); },
                   [&](const BinaryExpr& n) {
                       sub(n.lhs);
                       sub(n.rhs);
                   },
                   [&](const UnaryExpr& n) { sub(n.operand); },
                   [&](const TransposeExpr& n) { sub(n.operand); },
                   [](const auto&) {},
               },
               e.node);
}

template <class F>
void walk_block(const Block& block, F& visit) {
    for (const auto& s : block) {
        std::visit(overloaded{
                       [&](const AssignStmt& n) {
                           if (n.index)
                               for (const auto& a : n.index->args) walk_expr(*a, visit);
                           walk_expr(*n.value, visit);
                       },
                       [&](const MultiAssignStmt& n) { walk_expr(*n.call, visit); },
                       [&](const ExprStmt& n) { walk_expr(*n.expr, visit); },
                       [&](const ForStmt& n) {
                           walk_expr(*n.range, visit);
                           walk_block(n.body, visit);
                       },
                       [&](const WhileStmt& n) {
                           walk_expr(*n.cond, visit);
                           walk_block(n.body, visit);
                       },
                       [&](const IfStmt& n) {
                           for (const auto& b : n.branches) {
                               walk_expr(*b.cond, visit);
                               walk_block(b.body, visit);
                           }
                           if (n.otherwise) walk_block(*n.otherwise, visit);
                       },
                       [](const auto&) {},
                   },
                   s.node);
    }
}

}  // namespace detail

template <class F>
void for_each_expr(const Program& program, F&& visit) {
    detail::walk_block(program.body, visit);
}

}  // namespace commlab::script
