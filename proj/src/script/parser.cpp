#include "commlab/script/parser.hpp"

#include <initializer_list>

namespace commlab::script {

namespace {

enum class Context { Statement, Paren, Matrix };

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    Program program() {
        Program p;
        p.body = block({});
        if (!at(TokenKind::EndOfInput)) {
            const Token& t = cur();
            throw SyntaxError("unexpected " + describe(t), t.pos);
        }
        return p;
    }

private:
    // ---- token helpers -------------------------------------------------

    const Token& cur() const { return toks_[i_]; }
    const Token& ahead(std::size_t k) const {
        const std::size_t j = i_ + k;
        return j < toks_.size() ? toks_[j] : toks_.back();
    }
    bool at(TokenKind k) const { return cur().kind == k; }
    bool at_op(std::string_view op) const { return cur().is_op(op); }
    bool at_keyword(std::string_view kw) const { return cur().is_keyword(kw); }
    const Token& take() {
        const Token& t = toks_[i_];
        if (t.kind != TokenKind::EndOfInput) ++i_;
        return t;
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
        case TokenKind::Identifier: return "identifier '" + t.text + "'";
        case TokenKind::Keyword: return "keyword '" + t.text + "'";
        case TokenKind::Number: return "number " + t.text;
        case TokenKind::String: return "string literal";
        case TokenKind::Operator: return "'" + t.text + "'";
        default: return std::string(token_kind_name(t.kind));
        }
    }

    [[noreturn]] void fail_expected(std::string_view what) const {
        const Token& t = cur();
        throw SyntaxError("expected " + std::string(what) + " but found " + describe(t), t.pos);
    }

    void expect(TokenKind k, std::string_view what) {
        if (!at(k)) fail_expected(what);
        take();
    }

    void skip_newlines() {
        while (at(TokenKind::Newline)) take();
    }

    struct DepthGuard {
        explicit DepthGuard(Parser& p) : p_(p) {
            if (++p_.depth_ > kMaxParseDepth)
                throw SyntaxError("program is nested too deeply", p_.cur().pos);
        }
        ~DepthGuard() { --p_.depth_; }
        Parser& p_;
    };

    struct ContextGuard {
        ContextGuard(Parser& p, Context c) : p_(p) { p_.ctx_.push_back(c); }
        ~ContextGuard() { p_.ctx_.pop_back(); }
        Parser& p_;
    };

    bool in_matrix() const { return !ctx_.empty() && ctx_.back() == Context::Matrix; }

    // ---- statements -----------------------------------------------------

    bool at_block_end(std::initializer_list<std::string_view> stops) const {
        if (at(TokenKind::EndOfInput)) return true;
        if (at(TokenKind::Keyword))
            for (auto s : stops)
                if (cur().text == s) return true;
        return false;
    }

    Block block(std::initializer_list<std::string_view> stops) {
        DepthGuard guard(*this);
        Block out;
        while (true) {
            while (at(TokenKind::Newline) || at(TokenKind::Semicolon) || at(TokenKind::Comma)) take();
            if (at_block_end(stops)) break;
            if (at_keyword("end") || at_keyword("else") || at_keyword("elseif"))
                throw SyntaxError("unexpected keyword '" + cur().text + "'", cur().pos);
            out.push_back(statement(stops));
        }
        return out;
    }

    // Consumes the statement terminator and reports whether output is echoed.
    bool terminator(std::initializer_list<std::string_view> stops) {
        if (at(TokenKind::Semicolon)) {
            take();
            return false;
        }
        if (at(TokenKind::Comma) || at(TokenKind::Newline)) {
            take();
            return true;
        }
        if (at_block_end(stops)) return true;
        fail_expected("';', ',' or end of line");
    }

    void compound_terminator() {
        if (at(TokenKind::Semicolon) || at(TokenKind::Comma) || at(TokenKind::Newline)) take();
    }

    // Header separator after `for x = r`, `while c`, `if c`.
    void header_end() {
        if (at(TokenKind::Comma) || at(TokenKind::Semicolon) || at(TokenKind::Newline)) take();
    }

    Stmt statement(std::initializer_list<std::string_view> stops) {
        DepthGuard guard(*this);
        Stmt s;
        s.pos = cur().pos;
        if (at(TokenKind::Keyword)) {
            const std::string kw = cur().text;
            if (kw == "for") {
                take();
                ForStmt f;
                const bool paren = at(TokenKind::LParen) && ahead(1).kind == TokenKind::Identifier &&
                                   ahead(2).is_op("=");
                if (paren) take();
                if (!at(TokenKind::Identifier)) fail_expected("loop variable");
                f.var = cur().text;
                f.var_pos = cur().pos;
                take();
                if (!at_op("=")) fail_expected("'=' after loop variable");
                take();
                f.range = expr();
                if (paren) expect(TokenKind::RParen, "')'");
                header_end();
                f.body = block({"end"});
                if (!at_keyword("end")) fail_expected("'end' to close 'for'");
                take();
                compound_terminator();
                s.node = std::move(f);
                return s;
            }
            if (kw == "while") {
                take();
                WhileStmt w;
                w.cond = expr();
                header_end();
                w.body = block({"end"});
                if (!at_keyword("end")) fail_expected("'end' to close 'while'");
                take();
                compound_terminator();
                s.node = std::move(w);
                return s;
            }
            if (kw == "if") {
                take();
                IfStmt f;
                IfBranch first;
                first.cond = expr();
                header_end();
                first.body = block({"end", "else", "elseif"});
                f.branches.push_back(std::move(first));
                while (at_keyword("elseif")) {
                    take();
                    IfBranch b;
                    b.cond = expr();
                    header_end();
                    b.body = block({"end", "else", "elseif"});
                    f.branches.push_back(std::move(b));
                }
                if (at_keyword("else")) {
                    take();
                    f.otherwise = block({"end"});
                }
                if (!at_keyword("end")) fail_expected("'end' to close 'if'");
                take();
                compound_terminator();
                s.node = std::move(f);
                return s;
            }
            if (kw == "break" || kw == "continue") {
                take();
                if (kw == "break")
                    s.node = BreakStmt{};
                else
                    s.node = ContinueStmt{};
                terminator(stops);
                return s;
            }
        }

        if (at(TokenKind::LBracket) && looks_like_multi_assign()) {
            MultiAssignStmt m;
            take();
            while (!at(TokenKind::RBracket)) {
                m.names.push_back(cur().text);
                m.name_pos.push_back(cur().pos);
                take();
                if (at(TokenKind::Comma)) take();
            }
            take();  // ]
            take();  // =
            m.call = expr();
            if (!std::holds_alternative<CallOrIndex>(m.call->node) ||
                std::get<CallOrIndex>(m.call->node).brace)
                throw SyntaxError("multiple assignment requires a function call on the right", m.call->pos);
            s.node = std::move(m);
            s.echo = terminator(stops);
            return s;
        }

        if (at(TokenKind::Identifier)) {
            if (ahead(1).is_op("=")) {
                AssignStmt a;
                a.name = cur().text;
                a.name_pos = cur().pos;
                take();
                take();
                a.value = expr();
                s.node = std::move(a);
                s.echo = terminator(stops);
                return s;
            }
            if ((ahead(1).kind == TokenKind::LParen || ahead(1).kind == TokenKind::LBrace) &&
                indexed_assign_follows()) {
                AssignStmt a;
                a.name = cur().text;
                a.name_pos = cur().pos;
                take();
                IndexSpec idx;
                idx.brace = at(TokenKind::LBrace);
                idx.args = index_args();
                a.index = std::move(idx);
                take();  // =
                a.value = expr();
                s.node = std::move(a);
                s.echo = terminator(stops);
                return s;
            }
        }

        ExprStmt e;
        e.expr = expr();
        s.node = std::move(e);
        s.echo = terminator(stops);
        return s;
    }

    bool looks_like_multi_assign() const {
        std::size_t k = 1;
        bool any = false;
        while (true) {
            const Token& t = ahead(k);
            if (t.kind == TokenKind::Identifier) {
                any = true;
                ++k;
                if (ahead(k).kind == TokenKind::Comma) ++k;
                continue;
            }
            if (t.kind == TokenKind::RBracket) return any && ahead(k + 1).is_op("=");
            return false;
        }
    }

    // cur() is an identifier followed by '(' or '{'; scans to the matching
    // closer and checks for a plain '='.
    bool indexed_assign_follows() const {
        std::size_t k = 1;
        int depth = 0;
        while (true) {
            const Token& t = ahead(k);
            switch (t.kind) {
            case TokenKind::LParen:
            case TokenKind::LBrace:
            case TokenKind::LBracket: ++depth; break;
            case TokenKind::RParen:
            case TokenKind::RBrace:
            case TokenKind::RBracket:
                if (--depth == 0) return ahead(k + 1).is_op("=");
                break;
            case TokenKind::Newline:
            case TokenKind::Semicolon:
            case TokenKind::EndOfInput: return false;
            default: break;
            }
            ++k;
        }
    }

    // ---- expressions ----------------------------------------------------

    ExprPtr make(SourcePos pos, auto node) {
        auto e = std::make_unique<Expr>();
        e->pos = pos;
        e->node = std::move(node);
        return e;
    }

    ExprPtr binary(BinaryOp op, SourcePos pos, ExprPtr lhs, ExprPtr rhs) {
        return make(pos, BinaryExpr{op, std::move(lhs), std::move(rhs)});
    }

    ExprPtr expr() {
        DepthGuard guard(*this);
        return oror();
    }

    ExprPtr oror() {
        auto lhs = andand();
        while (at_op("||")) {
            const auto pos = take().pos;
            lhs = binary(BinaryOp::OrOr, pos, std::move(lhs), andand());
        }
        return lhs;
    }

    ExprPtr andand() {
        auto lhs = elem_or();
        while (at_op("&&")) {
            const auto pos = take().pos;
            lhs = binary(BinaryOp::AndAnd, pos, std::move(lhs), elem_or());
        }
        return lhs;
    }

    ExprPtr elem_or() {
        auto lhs = elem_and();
        while (at_op("|") && !matrix_break()) {
            const auto pos = take().pos;
            lhs = binary(BinaryOp::Or, pos, std::move(lhs), elem_and());
        }
        return lhs;
    }

    ExprPtr elem_and() {
        auto lhs = comparison();
        while (at_op("&") && !matrix_break()) {
            const auto pos = take().pos;
            lhs = binary(BinaryOp::And, pos, std::move(lhs), comparison());
        }
        return lhs;
    }

    ExprPtr comparison() {
        auto lhs = range();
        while (true) {
            BinaryOp op;
            if (at_op("=="))
                op = BinaryOp::Eq;
            else if (at_op("~="))
                op = BinaryOp::Ne;
            else if (at_op("<"))
                op = BinaryOp::Lt;
            else if (at_op("<="))
                op = BinaryOp::Le;
            else if (at_op(">"))
                op = BinaryOp::Gt;
            else if (at_op(">="))
                op = BinaryOp::Ge;
            else
                break;
            const auto pos = take().pos;
            lhs = binary(op, pos, std::move(lhs), range());
        }
        return lhs;
    }

    ExprPtr range() {
        auto first = additive();
        if (!at_op(":")) return first;
        const auto pos = take().pos;
        auto second = additive();
        RangeExpr r;
        r.start = std::move(first);
        if (at_op(":")) {
            take();
            r.step = std::move(second);
            r.stop = additive();
        } else {
            r.stop = std::move(second);
        }
        return make(pos, std::move(r));
    }

    // Inside [...], `a -b` is two elements while `a - b` and `a-b` are one.
    bool matrix_break() const {
        if (!in_matrix()) return false;
        const Token& op = cur();
        return op.space_before && !ahead(1).space_before;
    }

    ExprPtr additive() {
        auto lhs = multiplicative();
        while ((at_op("+") || at_op("-")) && !matrix_break()) {
            const Token& t = take();
            const auto op = t.text == "+" ? BinaryOp::Add : BinaryOp::Sub;
            lhs = binary(op, t.pos, std::move(lhs), multiplicative());
        }
        return lhs;
    }

    ExprPtr multiplicative() {
        auto lhs = unary();
        while (true) {
            BinaryOp op;
            if (at_op("*"))
                op = BinaryOp::Mul;
            else if (at_op("/"))
                op = BinaryOp::Div;
            else if (at_op(".*"))
                op = BinaryOp::ElemMul;
            else if (at_op("./"))
                op = BinaryOp::ElemDiv;
            else
                break;
            const auto pos = take().pos;
            lhs = binary(op, pos, std::move(lhs), unary());
        }
        return lhs;
    }

    ExprPtr unary() {
        DepthGuard guard(*this);
        if (at_op("-") || at_op("+") || at_op("~")) {
            const Token& t = take();
            const auto op = t.text == "-" ? UnaryOp::Neg : t.text == "+" ? UnaryOp::Plus : UnaryOp::Not;
            return make(t.pos, UnaryExpr{op, unary()});
        }
        return power();
    }

    ExprPtr power() {
        auto lhs = postfix();
        while (at_op("^") || at_op(".^")) {
            const Token& t = take();
            const auto op = t.text == "^" ? BinaryOp::Pow : BinaryOp::ElemPow;
            lhs = binary(op, t.pos, std::move(lhs), power_operand());
        }
        return lhs;
    }

    // Exponent: allows a sign (2^-1) but binds tighter than a following ^.
    ExprPtr power_operand() {
        DepthGuard guard(*this);
        if (at_op("-") || at_op("+") || at_op("~")) {
            const Token& t = take();
            const auto op = t.text == "-" ? UnaryOp::Neg : t.text == "+" ? UnaryOp::Plus : UnaryOp::Not;
            return make(t.pos, UnaryExpr{op, power_operand()});
        }
        return postfix();
    }

    std::vector<ExprPtr> index_args() {
        const bool brace = at(TokenKind::LBrace);
        take();
        ContextGuard ctx(*this, Context::Paren);
        ++index_depth_;
        std::vector<ExprPtr> args;
        skip_newlines();
        const TokenKind close = brace ? TokenKind::RBrace : TokenKind::RParen;
        if (!at(close)) {
            while (true) {
                skip_newlines();
                args.push_back(expr());
                skip_newlines();
                if (at(TokenKind::Comma)) {
                    take();
                    continue;
                }
                break;
            }
        }
        --index_depth_;
        expect(close, brace ? "'}'" : "')'");
        return args;
    }

    ExprPtr postfix() {
        auto base = primary();
        while (true) {
            if ((at(TokenKind::LParen) || at(TokenKind::LBrace)) && !(in_matrix() && cur().space_before)) {
                const bool brace = at(TokenKind::LBrace);
                const auto pos = cur().pos;
                if (auto* id = std::get_if<Identifier>(&base->node)) {
                    CallOrIndex c;
                    c.name = id->name;
                    c.brace = brace;
                    c.args = index_args();
                    base = make(base->pos, std::move(c));
                } else {
                    IndexExpr ix;
                    ix.brace = brace;
                    ix.args = index_args();
                    ix.base = std::move(base);
                    base = make(pos, std::move(ix));
                }
                continue;
            }
            if (at_op("'")) {
                const auto pos = take().pos;
                base = make(pos, TransposeExpr{std::move(base)});
                continue;
            }
            break;
        }
        return base;
    }

    ExprPtr primary() {
        const Token& t = cur();
        switch (t.kind) {
        case TokenKind::Number: take(); return make(t.pos, NumberLit{t.number});
        case TokenKind::String: take(); return make(t.pos, StringLit{t.text});
        case TokenKind::Identifier: take(); return make(t.pos, Identifier{t.text});
        case TokenKind::Keyword:
            if (t.text == "true" || t.text == "false") {
                take();
                return make(t.pos, BoolLit{t.text == "true"});
            }
            if (t.text == "end" && index_depth_ > 0) {
                take();
                return make(t.pos, EndExpr{});
            }
            break;
        case TokenKind::LParen: {
            take();
            ContextGuard ctx(*this, Context::Paren);
            skip_newlines();
            auto inner = expr();
            skip_newlines();
            expect(TokenKind::RParen, "')'");
            return inner;
        }
        case TokenKind::LBracket:
        case TokenKind::LBrace: return matrix();
        default: break;
        }
        fail_expected("an expression");
    }

    ExprPtr matrix() {
        const bool brace = at(TokenKind::LBrace);
        const auto pos = take().pos;
        const TokenKind close = brace ? TokenKind::RBrace : TokenKind::RBracket;
        ContextGuard ctx(*this, Context::Matrix);
        std::vector<ExprPtr> elems;
        while (true) {
            while (at(TokenKind::Comma) || at(TokenKind::Semicolon) || at(TokenKind::Newline)) take();
            if (at(close)) break;
            if (at(TokenKind::EndOfInput)) fail_expected(brace ? "'}'" : "']'");
            elems.push_back(expr());
            if (at(TokenKind::Comma) || at(TokenKind::Semicolon) || at(TokenKind::Newline) || at(close))
                continue;
            if (!cur().space_before) fail_expected(brace ? "',' or '}'" : "',' or ']'");
        }
        take();
        if (brace) return make(pos, ListExpr{std::move(elems)});
        return make(pos, MatrixExpr{std::move(elems)});
    }

    const std::vector<Token>& toks_;
    std::size_t i_ = 0;
    int depth_ = 0;
    int index_depth_ = 0;
    std::vector<Context> ctx_;
};

}  // namespace

Program parse(const std::vector<Token>& tokens) {
    if (tokens.empty() || tokens.back().kind != TokenKind::EndOfInput) {
        std::vector<Token> copy = tokens;
        copy.push_back(Token{TokenKind::EndOfInput, "", 0, {}, true});
        return Parser(copy).program();
    }
    return Parser(tokens).program();
}

Program parse_source(std::string_view source) {
    return parse(tokenize(source));
}

}  // namespace commlab::script
