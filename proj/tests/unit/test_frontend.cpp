// Copyright (c) 2026 The codegraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <functional>

#include "codegraph/frontend/parser.hpp"
#include "codegraph/frontend/printer.hpp"
#include "codegraph/synth/synth.hpp"

using namespace codegraph;
using namespace codegraph::frontend;

TEST_SUITE("frontend") {

TEST_CASE("tokenize empty input") { CHECK(tokenize("").empty()); }

TEST_CASE("tokenize a declaration") {
    auto toks = tokenize("int x = 1;");
    REQUIRE(toks.size() == 5);
    std::vector<std::string> got;
    for (const auto& t : toks) got.push_back(std::string(to_string(t.kind)) + ":" + t.text);
    CHECK(got == std::vector<std::string>{"kw:int", "ident:x", "op:=", "lit:1", "punc:;"});
    CHECK(toks[1].span.offset == 4);
    CHECK(toks[1].span.column == 5);
}

TEST_CASE("hex literal is a lex error with position") {
    try {
        tokenize("int 0x = ;");
        FAIL("expected LexError");
    } catch (const LexError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 5);
    }
}

TEST_CASE("comments and whitespace are dropped") {
    auto toks = tokenize("a // line\n /* block\n */ b");
    REQUIRE(toks.size() == 2);
    CHECK(toks[1].span.line == 3);
}

TEST_CASE("characters outside the alphabet") {
    CHECK_THROWS_AS(tokenize("int x = 1 # 2;"), LexError);
    CHECK_THROWS_AS(tokenize("\"unterminated"), LexError);
    CHECK_THROWS_AS(tokenize("a & b"), LexError);
}

TEST_CASE("empty method") {
    auto m = parse_method_source("void f() {}");
    CHECK(m.name == "f");
    CHECK(m.params.empty());
    CHECK(m.body.kind == AstKind::Block);
    CHECK(m.body.children.empty());
}

TEST_CASE("return of a parameter") {
    auto m = parse_method_source("int g(int a) { return a; }");
    REQUIRE(m.params.size() == 1);
    REQUIRE(m.body.children.size() == 1);
    const auto& r = m.body.children[0];
    CHECK(r.kind == AstKind::Return);
    REQUIRE(r.children.size() == 1);
    CHECK(r.children[0].kind == AstKind::VarRef);
    CHECK(r.children[0].text == "a");
    CHECK(r.children[0].var_id == m.params[0].var_id);
}

TEST_CASE("unresolved variable") {
    try {
        parse_method_source("void h() { y = 1; }");
        FAIL("expected UnresolvedVariable");
    } catch (const UnresolvedVariable& e) {
        CHECK(e.name() == "y");
    }
    CHECK_THROWS_AS(parse_method_source("void h() { if (true) { int z = 1; } z = 2; }"), UnresolvedVariable);
    CHECK_THROWS_AS(parse_method_source("void h() { int x = x; }"), UnresolvedVariable);
}

TEST_CASE("parse errors carry expected and found") {
    try {
        parse_method_source("void f() { int x = ; }");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.found() == "punc ';'");
        CHECK_FALSE(e.expected().empty());
        CHECK(e.where().line == 1);
    }
    CHECK_THROWS_AS(parse_method_source("void f() { int x = 1; int x = 2; }"), ParseError);
    CHECK_THROWS_AS(parse_method_source("void f(int a) { int a = 2; }"), ParseError);
    CHECK_THROWS_AS(parse_method_source("void f() { return; g(); }"), ParseError);
    CHECK_THROWS_AS(parse_method_source("void f(void v) { }"), ParseError);
    CHECK_THROWS_AS(parse_method_source("void f() { try { } catch (E e) { } }"), ParseError);
    CHECK_THROWS_AS(parse_method_source("void f() { try { g(); } }"), ParseError);
    CHECK_THROWS_AS(parse_method_source("void f() {} void g() {}"), ParseError);
}

TEST_CASE("precedence and postfix calls") {
    auto m = parse_method_source("boolean f(int a, Request r) { return a + 1 * 2 < 3 && r.ok(a).done(); }");
    const auto& e = m.body.children[0].children[0];
    CHECK(e.kind == AstKind::InfixOperator);
    CHECK(e.text == "&&");
    CHECK(e.children[0].text == "<");
    CHECK(e.children[0].children[0].text == "+");
    CHECK(e.children[0].children[0].children[1].text == "*");
    CHECK(e.children[1].kind == AstKind::Call);
    CHECK(e.children[1].text == "done");
    CHECK(e.children[1].has_receiver);
    CHECK(e.children[1].children[0].text == "ok");
}

TEST_CASE("all statement kinds") {
    auto m = parse_method_source(R"(
        int f(List xs) {
            int n = 0;
            for (int i = 0; i < xs.size(); i = i + 1) { n = n + i; }
            while (n > 10) { n = n - 1; }
            try { xs.clear(); } catch (IOException e) { log(e); } catch (Exception e2) { } finally { done(); }
            if (n == 0) { throw new Exception("zero"); } else { n = 1; }
            return n;
        })");
    std::vector<AstKind> kinds;
    for (const auto& s : m.body.children) kinds.push_back(s.kind);
    CHECK(kinds == std::vector<AstKind>{AstKind::VarDecl, AstKind::For, AstKind::While, AstKind::TryCatchFinally,
                                        AstKind::If, AstKind::Return});
    CHECK(m.body.children[3].has_finally);
    CHECK(m.body.children[3].children.size() == 6);
}

TEST_CASE("split methods and source trees") {
    auto parts = split_methods("void a() { if (x) { } }\nint b() { return 1; }\n");
    REQUIRE(parts.size() == 2);
    CHECK(parse_method_source(parts[1]).name == "b");
    CHECK_THROWS_AS(split_methods("void a() { "), ParseError);
}

TEST_CASE("spans nest within parents") {
    Rng rng(7);
    for (int k = 0; k < 200; ++k) {
        auto m = parse_method_source(synth::random_method(rng));
        std::function<void(const AstNode&)> check = [&](const AstNode& n) {
            for (const auto& c : n.children) {
                CHECK(n.span.contains(c.span));
                check(c);
            }
        };
        CHECK(m.span.contains(m.body.span));
        check(m.body);
    }
}

TEST_CASE("print then reparse is structurally identical") {
    Rng rng(11);
    for (int k = 0; k < 500; ++k) {
        const std::string src = synth::random_method(rng);
        MethodAst a = parse_method_source(src);
        MethodAst b = parse_method_source(print_method(a));
        INFO(src);
        CHECK(structurally_equal(a, b));
    }
}

TEST_CASE("parser is total on mutated inputs") {
    Rng rng(3);
    const std::string alphabet = "{}();=.+<>&|!\"abc1 \n";
    for (int k = 0; k < 2000; ++k) {
        std::string src = synth::random_method(rng);
        const int edits = 1 + static_cast<int>(rng.uniform_index(4));
        for (int e = 0; e < edits && !src.empty(); ++e) {
            std::size_t pos = rng.uniform_index(src.size());
            switch (rng.uniform_index(3)) {
                case 0: src.erase(pos, 1); break;
                case 1: src.insert(pos, 1, alphabet[rng.uniform_index(alphabet.size())]); break;
                default: src.resize(pos); break;
            }
        }
        try {
            parse_method_source(src);
        } catch (const Error&) {
        }
    }
    CHECK(true);
}

}
