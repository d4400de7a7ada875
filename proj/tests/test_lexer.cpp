#include <doctest.h>

#include "commlab/script/lexer.hpp"

using namespace commlab::script;

namespace {

// drop the layout tokens so tests can talk about the visible ones
std::vector<Token> visible(std::string_view src) {
    std::vector<Token> out;
    for (auto& t : tokenize(src))
        if (t.kind != TokenKind::Newline && t.kind != TokenKind::EndOfInput) out.push_back(t);
    return out;
}

}  // namespace

TEST_CASE("comment is stripped") {
    auto t = visible("x = [1 2] % hi");
    REQUIRE(t.size() == 6);
    CHECK(t[0].kind == TokenKind::Identifier);
    CHECK(t[0].text == "x");
    CHECK(t[1].is_op("="));
    CHECK(t[2].kind == TokenKind::LBracket);
    CHECK(t[3].number == 1);
    CHECK(t[4].number == 2);
    CHECK(t[5].kind == TokenKind::RBracket);
}

TEST_CASE("range tokens") {
    auto t = visible("a:b");
    REQUIRE(t.size() == 3);
    CHECK(t[0].text == "a");
    CHECK(t[1].is_op(":"));
    CHECK(t[2].text == "b");
}

TEST_CASE("the task 2 fix line") {
    // six visible tokens plus the end-of-input marker
    CHECK(tokenize("tx_bs = [tx_bs byte]").size() == 7);
    auto t = visible("tx_bs = [tx_bs byte]");
    REQUIRE(t.size() == 6);
    int seen = 0;
    for (auto& tok : t)
        if (tok.kind == TokenKind::Identifier && tok.text == "tx_bs") ++seen;
    CHECK(seen == 2);
    CHECK(t[3].pos == SourcePos{1, 10});
}

TEST_CASE("positions are 1-based") {
    auto t = visible("a = 1;\n  bb = 'it''s'");
    CHECK(t[0].pos == SourcePos{1, 1});
    CHECK(t[4].pos == SourcePos{2, 3});
    CHECK(t[6].kind == TokenKind::String);
    CHECK(t[6].text == "it's");
}

TEST_CASE("quote after identifier is transpose, elsewhere a string") {
    auto t = visible("y = x'");
    CHECK(t.back().is_op("'"));
    t = visible("y = 'x'");
    CHECK(t.back().kind == TokenKind::String);
    t = visible("y = [x' 'a']");
    CHECK(t[4].is_op("'"));
    CHECK(t[5].kind == TokenKind::String);
}

TEST_CASE("number forms") {
    auto t = visible("1.5e3 .25 3");
    REQUIRE(t.size() == 3);
    CHECK(t[0].number == 1500);
    CHECK(t[1].number == 0.25);
    CHECK(t[2].number == 3);
}

TEST_CASE("continuation joins lines") {
    auto all = tokenize("x = [1 ...\n 2]");
    int newlines = 0;
    for (auto& tok : all) newlines += tok.kind == TokenKind::Newline;
    CHECK(newlines == 0);
}

TEST_CASE("keywords and aliases") {
    auto t = visible("if a != b && !c end");
    CHECK(t[0].kind == TokenKind::Keyword);
    CHECK(t[2].is_op("~="));
    CHECK(t[5].is_op("~"));
    CHECK(t.back().is_keyword("end"));
}

TEST_CASE("illegal character reports line and column") {
    try {
        tokenize("x = 1;\ny = $");
        FAIL("expected an error");
    } catch (const SyntaxError& e) {
        CHECK(e.pos() == SourcePos{2, 5});
    }
    CHECK_THROWS_AS(tokenize("s = 'open"), SyntaxError);
    CHECK_THROWS_AS(tokenize("x = 12abc"), SyntaxError);
}

TEST_CASE("identifier validity") {
    CHECK(is_valid_identifier("tx_bs"));
    CHECK(is_valid_identifier("__cur_seq"));
    CHECK_FALSE(is_valid_identifier("1x"));
    CHECK_FALSE(is_valid_identifier("end"));
    CHECK_FALSE(is_valid_identifier(""));
}
