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

#include <algorithm>
#include <fstream>
#include <sstream>

#include "codegraph/frontend/parser.hpp"

namespace codegraph::frontend {

namespace {

std::string describe(const Token& t) {
    if (t.kind == TokenKind::End) return "end of input";
    return std::string(to_string(t.kind)) + " '" + t.text + "'";
}

std::string where_text(const Span& s) {
    return std::to_string(s.line) + ":" + std::to_string(s.column);
}

int precedence(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "/" || op == "%") return 6;
    return -1;
}

bool produces_operation(const AstNode& n) {
    bool found = false;
    walk(n, [&](const AstNode& x) {
        switch (x.kind) {
            case AstKind::Call:
            case AstKind::New:
            case AstKind::InfixOperator:
            case AstKind::Assign:
                found = true;
                break;
            case AstKind::VarDecl:
                if (!x.children.empty()) found = true;
                break;
            default:
                break;
        }
    });
    return found;
}

class Parser {
public:
    explicit Parser(const TokenSequence& tokens) : toks_(tokens) {
        Token end;
        end.kind = TokenKind::End;
        if (!toks_.empty()) {
            const Span& last = toks_.back().span;
            end.span = Span{last.end(), 0, last.line, last.column + last.length};
        }
        toks_.push_back(end);
    }

    MethodAst method() {
        MethodAst m;
        const Span start = peek().span;
        m.return_type = type_name(/*allow_void=*/true);
        m.name = expect_ident("method name").text;
        expect_punct("(");
        scopes_.emplace_back();
        if (!peek().is_punct(")")) {
            while (true) {
                Param p;
                p.span = peek().span;
                p.type = type_name(false);
                const Token& id = expect_ident("parameter name");
                p.name = id.text;
                p.span = Span::cover(p.span, id.span);
                p.var_id = declare(p.name, p.type, true, p.span);
                m.params.push_back(p);
                if (peek().is_punct(",")) {
                    ++pos_;
                    continue;
                }
                break;
            }
        }
        expect_punct(")");
        m.body = block();
        scopes_.pop_back();
        if (peek().kind != TokenKind::End) {
            throw error("end of method", peek());
        }
        m.span = Span::cover(start, m.body.span);
        m.variables = std::move(vars_);
        return m;
    }

private:
    TokenSequence toks_;
    std::size_t pos_ = 0;
    std::vector<std::vector<int>> scopes_;
    std::vector<VariableInfo> vars_;

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token& prev() const { return toks_[pos_ - 1]; }

    ParseError error(const std::string& expected, const Token& found) const {
        return ParseError("parse error at " + where_text(found.span) + ": expected " + expected +
                              ", found " + describe(found),
                          expected, describe(found), found.span);
    }

    const Token& expect_punct(std::string_view p) {
        if (!peek().is_punct(p)) throw error("'" + std::string(p) + "'", peek());
        return toks_[pos_++];
    }

    const Token& expect_ident(const std::string& what) {
        if (peek().kind != TokenKind::Identifier) throw error(what, peek());
        return toks_[pos_++];
    }

    std::string type_name(bool allow_void) {
        const Token& t = peek();
        if (t.kind == TokenKind::Identifier || (t.kind == TokenKind::Keyword && is_primitive_type(t.text))) {
            ++pos_;
            return t.text;
        }
        if (t.is_keyword("void")) {
            if (!allow_void) {
                throw ParseError("parse error at " + where_text(t.span) +
                                     ": 'void' is only allowed as a return type",
                                 "type", describe(t), t.span);
            }
            ++pos_;
            return t.text;
        }
        throw error("type", t);
    }

    int lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            for (int id : *it) {
                if (vars_[id].name == name) return id;
            }
        }
        return -1;
    }

    int declare(const std::string& name, const std::string& type, bool is_param, Span span) {
        if (lookup(name) >= 0) {
            throw ParseError("parse error at " + where_text(span) + ": variable '" + name +
                                 "' shadows an existing declaration",
                             "fresh variable name", "'" + name + "'", span);
        }
        vars_.push_back(VariableInfo{name, type, is_param, span});
        int id = static_cast<int>(vars_.size()) - 1;
        scopes_.back().push_back(id);
        return id;
    }

    int resolve(const Token& t) const {
        int id = lookup(t.text);
        if (id < 0) throw UnresolvedVariable(t.text, t.span);
        return id;
    }

    bool at_type_start() const {
        const Token& t = peek();
        if (t.kind == TokenKind::Keyword && (is_primitive_type(t.text) || t.text == "void")) return true;
        return t.kind == TokenKind::Identifier && peek(1).kind == TokenKind::Identifier;
    }

    // block := "{" stmt* "}"
    AstNode block() {
        AstNode b;
        b.kind = AstKind::Block;
        const Token& open = expect_punct("{");
        scopes_.emplace_back();
        bool reachable = true;
        while (!peek().is_punct("}")) {
            if (peek().kind == TokenKind::End) throw error("'}'", peek());
            if (!reachable) {
                throw ParseError("parse error at " + where_text(peek().span) + ": unreachable statement",
                                 "end of block", describe(peek()), peek().span);
            }
            b.children.push_back(statement());
            reachable = completes_normally(b.children.back());
        }
        const Token& close = expect_punct("}");
        scopes_.pop_back();
        b.span = Span::cover(open.span, close.span);
        return b;
    }

    static bool completes_normally(const AstNode& s) {
        switch (s.kind) {
            case AstKind::Return:
            case AstKind::Throw:
                return false;
            case AstKind::Block:
                return s.children.empty() || completes_normally(s.children.back());
            case AstKind::If:
                if (!s.has_else) return true;
                return completes_normally(s.children[1]) || completes_normally(s.children[2]);
            case AstKind::TryCatchFinally: {
                bool normal = completes_normally(s.children[0]);
                const std::size_t catches_end = s.children.size() - (s.has_finally ? 1 : 0);
                for (std::size_t i = 2; i < catches_end; i += 2) {
                    normal = normal || completes_normally(s.children[i]);
                }
                if (s.has_finally) normal = normal && completes_normally(s.children.back());
                return normal;
            }
            default:
                return true;
        }
    }

    AstNode statement() {
        const Token& t = peek();
        if (t.is_keyword("if")) return if_stmt();
        if (t.is_keyword("while")) return while_stmt();
        if (t.is_keyword("for")) return for_stmt();
        if (t.is_keyword("try")) return try_stmt();
        if (t.is_keyword("return")) {
            AstNode r;
            r.kind = AstKind::Return;
            ++pos_;
            if (!peek().is_punct(";")) r.children.push_back(expr());
            const Token& semi = expect_punct(";");
            r.span = Span::cover(t.span, semi.span);
            return r;
        }
        if (t.is_keyword("throw")) {
            AstNode r;
            r.kind = AstKind::Throw;
            ++pos_;
            r.children.push_back(expr());
            const Token& semi = expect_punct(";");
            r.span = Span::cover(t.span, semi.span);
            return r;
        }
        if (at_type_start()) return var_decl();
        if (t.kind == TokenKind::Identifier && peek(1).is_operator("=")) {
            AstNode a = assign();
            const Token& semi = expect_punct(";");
            a.span = Span::cover(a.span, semi.span);
            return a;
        }
        AstNode s;
        s.kind = AstKind::ExprStmt;
        s.children.push_back(expr());
        const Token& semi = expect_punct(";");
        s.span = Span::cover(s.children[0].span, semi.span);
        return s;
    }

    // varDecl := type ident ["=" expr] ";"
    AstNode var_decl() {
        AstNode d;
        d.kind = AstKind::VarDecl;
        const Span start = peek().span;
        d.type_name = type_name(false);
        const Token& id = expect_ident("variable name");
        d.text = id.text;
        if (peek().is_operator("=")) {
            ++pos_;
            d.children.push_back(expr());
        }
        // Declared after the initializer: `int x = x;` is unresolved.
        const Token& semi = expect_punct(";");
        d.span = Span::cover(start, semi.span);
        d.var_id = declare(d.text, d.type_name, false, Span::cover(start, id.span));
        return d;
    }

    // assign := ident "=" expr   (terminator handled by caller)
    AstNode assign() {
        AstNode a;
        a.kind = AstKind::Assign;
        const Token& id = expect_ident("assignment target");
        a.text = id.text;
        a.var_id = resolve(id);
        if (!peek().is_operator("=")) throw error("'='", peek());
        ++pos_;
        a.children.push_back(expr());
        a.span = Span::cover(id.span, a.children[0].span);
        return a;
    }

    AstNode if_stmt() {
        AstNode n;
        n.kind = AstKind::If;
        const Token& kw = toks_[pos_++];
        expect_punct("(");
        n.children.push_back(expr());
        expect_punct(")");
        n.children.push_back(block());
        if (peek().is_keyword("else")) {
            ++pos_;
            n.has_else = true;
            n.children.push_back(block());
        }
        n.span = Span::cover(kw.span, n.children.back().span);
        return n;
    }

    AstNode while_stmt() {
        AstNode n;
        n.kind = AstKind::While;
        const Token& kw = toks_[pos_++];
        expect_punct("(");
        n.children.push_back(expr());
        expect_punct(")");
        n.children.push_back(block());
        n.span = Span::cover(kw.span, n.children.back().span);
        return n;
    }

    // forStmt := "for" "(" varDecl expr ";" assignNoSemi ")" block
    AstNode for_stmt() {
        AstNode n;
        n.kind = AstKind::For;
        const Token& kw = toks_[pos_++];
        expect_punct("(");
        scopes_.emplace_back();
        if (!at_type_start()) throw error("loop variable declaration", peek());
        n.children.push_back(var_decl());
        n.children.push_back(expr());
        expect_punct(";");
        n.children.push_back(assign());
        expect_punct(")");
        n.children.push_back(block());
        scopes_.pop_back();
        if (!completes_normally(n.children.back())) {
            throw ParseError("parse error at " + where_text(kw.span) +
                                 ": for-loop update unreachable, body never completes normally",
                             "loop body that completes normally", "abrupt loop body", kw.span);
        }
        n.span = Span::cover(kw.span, n.children.back().span);
        return n;
    }

    // tryStmt := "try" block ("catch" "(" type ident ")" block)+ ["finally" block]
    AstNode try_stmt() {
        AstNode n;
        n.kind = AstKind::TryCatchFinally;
        const Token& kw = toks_[pos_++];
        n.children.push_back(block());
        if (!produces_operation(n.children[0])) {
            throw ParseError("parse error at " + where_text(kw.span) +
                                 ": catch clause unreachable, try body contains no operation",
                             "operation inside try body", "empty try body", kw.span);
        }
        if (!peek().is_keyword("catch")) throw error("'catch'", peek());
        while (peek().is_keyword("catch")) {
            ++pos_;
            expect_punct("(");
            scopes_.emplace_back();
            AstNode param;
            param.kind = AstKind::VarDecl;
            const Span start = peek().span;
            param.type_name = type_name(false);
            const Token& id = expect_ident("exception variable");
            param.text = id.text;
            param.span = Span::cover(start, id.span);
            param.var_id = declare(param.text, param.type_name, false, param.span);
            expect_punct(")");
            n.children.push_back(std::move(param));
            n.children.push_back(block());
            scopes_.pop_back();
        }
        if (peek().is_keyword("finally")) {
            ++pos_;
            n.has_finally = true;
            n.children.push_back(block());
        }
        n.span = Span::cover(kw.span, n.children.back().span);
        return n;
    }

    AstNode expr(int min_prec = 1) {
        AstNode lhs = postfix();
        while (peek().kind == TokenKind::Operator) {
            const std::string op = peek().text;
            int p = precedence(op);
            if (p < min_prec) break;
            ++pos_;
            AstNode rhs = expr(p + 1);
            AstNode bin;
            bin.kind = AstKind::InfixOperator;
            bin.text = op;
            bin.span = Span::cover(lhs.span, rhs.span);
            bin.children.push_back(std::move(lhs));
            bin.children.push_back(std::move(rhs));
            lhs = std::move(bin);
        }
        return lhs;
    }

    std::vector<AstNode> args(Span* close_span) {
        std::vector<AstNode> out;
        expect_punct("(");
        if (!peek().is_punct(")")) {
            while (true) {
                out.push_back(expr());
                if (peek().is_punct(",")) {
                    ++pos_;
                    continue;
                }
                break;
            }
        }
        *close_span = expect_punct(")").span;
        return out;
    }

    AstNode postfix() {
        AstNode e = primary();
        while (peek().is_punct(".")) {
            ++pos_;
            const Token& name = expect_ident("method name");
            AstNode call;
            call.kind = AstKind::Call;
            call.text = name.text;
            call.has_receiver = true;
            Span close;
            std::vector<AstNode> a = args(&close);
            call.span = Span::cover(e.span, close);
            call.children.push_back(std::move(e));
            for (auto& x : a) call.children.push_back(std::move(x));
            e = std::move(call);
        }
        return e;
    }

    AstNode primary() {
        const Token& t = peek();
        AstNode n;
        switch (t.kind) {
            case TokenKind::IntLiteral:
            case TokenKind::StringLiteral:
            case TokenKind::BoolLiteral:
                ++pos_;
                n.kind = AstKind::Literal;
                n.text = t.text;
                n.type_name = t.kind == TokenKind::IntLiteral      ? "int"
                              : t.kind == TokenKind::StringLiteral ? "String"
                                                                   : "boolean";
                n.span = t.span;
                return n;
            case TokenKind::Identifier:
                ++pos_;
                if (peek().is_punct("(")) {
                    n.kind = AstKind::Call;
                    n.text = t.text;
                    Span close;
                    n.children = args(&close);
                    n.span = Span::cover(t.span, close);
                    return n;
                }
                n.kind = AstKind::VarRef;
                n.text = t.text;
                n.var_id = resolve(t);
                n.span = t.span;
                return n;
            case TokenKind::Keyword:
                if (t.text == "new") {
                    ++pos_;
                    const Token& cls = expect_ident("class name");
                    n.kind = AstKind::New;
                    n.text = cls.text;
                    Span close;
                    n.children = args(&close);
                    n.span = Span::cover(t.span, close);
                    return n;
                }
                break;
            case TokenKind::Punct:
                if (t.text == "(") {
                    ++pos_;
                    n = expr();
                    const Token& close = expect_punct(")");
                    n.span = Span::cover(t.span, close.span);
                    return n;
                }
                break;
            default:
                break;
        }
        throw error("expression", t);
    }
};

}  // namespace

ParseError::ParseError(const std::string& message, std::string expected, std::string found, Span where)
    : Error(message), expected_(std::move(expected)), found_(std::move(found)), where_(where) {}

UnresolvedVariable::UnresolvedVariable(const std::string& name, Span where)
    : Error("unresolved variable '" + name + "' at " + where_text(where)), name_(name), where_(where) {}

MethodAst parse_method(const TokenSequence& tokens) { return Parser(tokens).method(); }

MethodAst parse_method_source(std::string_view source) { return parse_method(tokenize(source)); }

std::vector<std::string> split_methods(std::string_view source) {
    const TokenSequence toks = tokenize(source);
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < toks.size()) {
        const std::size_t start = toks[i].span.offset;
        int depth = 0;
        bool opened = false;
        std::size_t j = i;
        for (; j < toks.size(); ++j) {
            if (toks[j].is_punct("{")) {
                ++depth;
                opened = true;
            } else if (toks[j].is_punct("}")) {
                if (--depth < 0) {
                    throw ParseError("parse error at " + where_text(toks[j].span) + ": unbalanced '}'",
                                     "method", describe(toks[j]), toks[j].span);
                }
                if (depth == 0 && opened) break;
            }
        }
        if (j == toks.size()) {
            const Token& last = toks.back();
            throw ParseError("parse error at " + where_text(last.span) + ": unterminated method",
                             "'}'", "end of input", last.span);
        }
        out.emplace_back(source.substr(start, toks[j].span.end() - start));
        i = j + 1;
    }
    return out;
}

std::vector<SourceUnit> load_source_tree(const std::filesystem::path& root,
                                         std::vector<SourceLoadError>* errors) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().extension() == ".mj") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<SourceUnit> units;
    for (const auto& file : files) {
        SourceUnit u;
        u.origin = fs::relative(file, root).generic_string();
        fs::path parent = fs::relative(file, root).parent_path();
        if (parent.empty()) {
            u.package_name = "default";
        } else {
            std::string pkg = parent.generic_string();
            std::replace(pkg.begin(), pkg.end(), '/', '.');
            u.package_name = pkg;
        }
        std::ifstream in(file, std::ios::binary);
        if (!in) throw IoError("cannot read " + file.string());
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            u.methods = split_methods(ss.str());
        } catch (const Error& e) {
            if (!errors) throw;
            errors->push_back({u.origin, e.what()});
            continue;
        }
        units.push_back(std::move(u));
    }
    return units;
}

}  // namespace codegraph::frontend
