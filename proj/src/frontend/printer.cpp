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

#include "codegraph/frontend/printer.hpp"

#include <sstream>

namespace codegraph::frontend {

namespace {

void print_args(std::ostringstream& os, const AstNode& n, std::size_t first) {
    os << '(';
    for (std::size_t i = first; i < n.children.size(); ++i) {
        if (i > first) os << ", ";
        os << print_expr(n.children[i]);
    }
    os << ')';
}

class Printer {
public:
    std::string run(const MethodAst& m) {
        os_ << m.return_type << ' ' << m.name << '(';
        for (std::size_t i = 0; i < m.params.size(); ++i) {
            if (i) os_ << ", ";
            os_ << m.params[i].type << ' ' << m.params[i].name;
        }
        os_ << ") ";
        block(m.body);
        os_ << '\n';
        return os_.str();
    }

private:
    std::ostringstream os_;
    int indent_ = 0;

    void pad() {
        for (int i = 0; i < indent_; ++i) os_ << "    ";
    }

    void block(const AstNode& b) {
        os_ << "{\n";
        ++indent_;
        for (const auto& s : b.children) {
            pad();
            stmt(s);
            os_ << '\n';
        }
        --indent_;
        pad();
        os_ << '}';
    }

    void var_decl(const AstNode& d) {
        os_ << d.type_name << ' ' << d.text;
        if (!d.children.empty()) os_ << " = " << print_expr(d.children[0]);
        os_ << ';';
    }

    void stmt(const AstNode& s) {
        switch (s.kind) {
            case AstKind::VarDecl:
                var_decl(s);
                break;
            case AstKind::Assign:
                os_ << s.text << " = " << print_expr(s.children[0]) << ';';
                break;
            case AstKind::If:
                os_ << "if (" << print_expr(s.children[0]) << ") ";
                block(s.children[1]);
                if (s.has_else) {
                    os_ << " else ";
                    block(s.children[2]);
                }
                break;
            case AstKind::While:
                os_ << "while (" << print_expr(s.children[0]) << ") ";
                block(s.children[1]);
                break;
            case AstKind::For:
                os_ << "for (";
                var_decl(s.children[0]);
                os_ << ' ' << print_expr(s.children[1]) << "; " << s.children[2].text << " = "
                    << print_expr(s.children[2].children[0]) << ") ";
                block(s.children[3]);
                break;
            case AstKind::TryCatchFinally: {
                os_ << "try ";
                block(s.children[0]);
                const std::size_t end = s.children.size() - (s.has_finally ? 1 : 0);
                for (std::size_t i = 1; i < end; i += 2) {
                    os_ << " catch (" << s.children[i].type_name << ' ' << s.children[i].text << ") ";
                    block(s.children[i + 1]);
                }
                if (s.has_finally) {
                    os_ << " finally ";
                    block(s.children.back());
                }
                break;
            }
            case AstKind::Return:
                os_ << "return";
                if (!s.children.empty()) os_ << ' ' << print_expr(s.children[0]);
                os_ << ';';
                break;
            case AstKind::Throw:
                os_ << "throw " << print_expr(s.children[0]) << ';';
                break;
            case AstKind::ExprStmt:
                os_ << print_expr(s.children[0]) << ';';
                break;
            default:
                os_ << print_expr(s) << ';';
                break;
        }
    }
};

}  // namespace

std::string print_expr(const AstNode& e) {
    std::ostringstream os;
    switch (e.kind) {
        case AstKind::Literal:
        case AstKind::VarRef:
            os << e.text;
            break;
        case AstKind::New:
            os << "new " << e.text;
            print_args(os, e, 0);
            break;
        case AstKind::Call:
            if (e.has_receiver) {
                const AstNode& r = e.children[0];
                if (r.kind == AstKind::InfixOperator) {
                    os << '(' << print_expr(r) << ')';
                } else {
                    os << print_expr(r);
                }
                os << '.';
            }
            os << e.text;
            print_args(os, e, e.has_receiver ? 1 : 0);
            break;
        case AstKind::InfixOperator: {
            auto operand = [&](const AstNode& x) {
                if (x.kind == AstKind::InfixOperator) {
                    os << '(' << print_expr(x) << ')';
                } else {
                    os << print_expr(x);
                }
            };
            operand(e.children[0]);
            os << ' ' << e.text << ' ';
            operand(e.children[1]);
            break;
        }
        default:
            os << "/*" << to_string(e.kind) << "*/";
            break;
    }
    return os.str();
}

std::string print_method(const MethodAst& method) { return Printer().run(method); }

}  // namespace codegraph::frontend
