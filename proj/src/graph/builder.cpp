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

#include "codegraph/graph/builder.hpp"

#include <numeric>

#include "codegraph/common/error.hpp"

namespace codegraph::graph {

using frontend::AstKind;
using frontend::AstNode;
using frontend::MethodAst;

namespace {

bool is_comparison_or_logical(std::string_view op) {
    return op == "==" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=" || op == "&&" ||
           op == "||";
}

std::vector<std::string> arg_types(const AstNode& call, std::size_t first, const MethodAst& m) {
    std::vector<std::string> out;
    for (std::size_t i = first; i < call.children.size(); ++i) out.push_back(static_type(call.children[i], m));
    return out;
}

// A value flowing out of an expression: the node carrying it (data or
// action; -1 for none) and the variable it reads, if any.
struct Value {
    int node = -1;
    int var = -1;
};

class Builder {
public:
    Builder(const MethodAst& m, bool sigma1, std::string id) : m_(m), sigma1_(sigma1) {
        g_.method_id = std::move(id);
        g_.flavor = sigma1 ? Flavor::Sigma1 : Flavor::Sigma0;
        var_node_.assign(m.variables.size(), -1);
        uses_.resize(m.variables.size());
    }

    SigmaGraph run() {
        entry_ = add_node(NodeType::Entry, std::string(kEntryFeature), "Block", m_.span);
        exit_ = add_node(NodeType::Exit, std::string(kExitFeature), "Block", m_.span);
        for (const auto& p : m_.params) {
            var_node_[p.var_id] = add_node(NodeType::Data, p.type, "VarDecl", p.span);
        }
        frontier_ = {entry_};
        block(m_.body);
        for (int f : frontier_) add_edge(f, EdgeType::Dep, exit_);
        frontier_.clear();

        if (sigma1_) {
            add_use_edges();
            add_alias_edges();
            g_.edges.insert(g_.edges.end(), extra_.begin(), extra_.end());
        } else {
            for (auto& n : g_.nodes) n.ast_kind.reset();
        }
        return std::move(g_);
    }

private:
    struct TryContext {
        bool has_finally = false;
        std::vector<int> actions;          // every action emitted inside the try body
        std::vector<int> to_first_catch;   // frontier of explicit throws caught here
        std::vector<int> pending_finally;  // abrupt exits routed through finally
    };
    struct Region {
        bool try_body;  // false: a catch body
        int try_index;
    };

    const MethodAst& m_;
    bool sigma1_;
    SigmaGraph g_;
    std::vector<SigmaEdge> extra_;
    std::vector<int> var_node_;
    // Pending predecessors of the next emitted node. A multiset: an if with
    // an empty branch contributes itself twice so it keeps two out-edges.
    std::vector<int> frontier_;
    int entry_ = -1;
    int exit_ = -1;
    std::vector<TryContext> tries_;
    std::vector<Region> regions_;
    std::vector<int> governing_;
    std::vector<std::vector<int>> uses_;
    std::vector<std::pair<int, int>> direct_assign_;

    int add_node(NodeType t, std::string feature, const char* ast_kind, frontend::Span span) {
        SigmaNode n;
        n.id = static_cast<int>(g_.nodes.size());
        n.ntype = t;
        n.feature = std::move(feature);
        n.ast_kind = std::string(ast_kind);
        n.span = span;
        g_.nodes.push_back(std::move(n));
        return g_.nodes.back().id;
    }

    void add_edge(int src, EdgeType t, int dst) { g_.edges.push_back({src, t, dst}); }

    void add_governed(int id) {
        for (int c : governing_) extra_.push_back({c, EdgeType::ControlDep, id});
    }

    // Makes `id` the next node in execution order.
    void enter_flow(int id) {
        for (int f : frontier_) add_edge(f, EdgeType::Dep, id);
        frontier_ = {id};
        add_governed(id);
        if (g_.nodes[id].ntype == NodeType::Action) {
            for (const auto& r : regions_) {
                if (r.try_body) tries_[r.try_index].actions.push_back(id);
            }
        }
    }

    void data_edge(const Value& v, EdgeType t, int consumer) {
        if (v.node < 0) return;
        add_edge(v.node, t, consumer);
        if (v.var >= 0) uses_[v.var].push_back(consumer);
    }

    std::vector<int> take_frontier() {
        std::vector<int> out;
        out.swap(frontier_);
        return out;
    }

    static void append(std::vector<int>& dst, const std::vector<int>& src) {
        dst.insert(dst.end(), src.begin(), src.end());
    }

    Value eval(const AstNode& e) {
        switch (e.kind) {
            case AstKind::Literal:
                return {add_node(NodeType::Data, e.type_name, "Literal", e.span), -1};
            case AstKind::VarRef:
                return {var_node_[e.var_id], e.var_id};
            case AstKind::Call: {
                const std::size_t first = e.has_receiver ? 1 : 0;
                Value recv;
                if (e.has_receiver) recv = eval(e.children[0]);
                std::vector<Value> args;
                for (std::size_t i = first; i < e.children.size(); ++i) args.push_back(eval(e.children[i]));
                int id = add_node(NodeType::Action, node_feature_string(e, m_), "Call", e.span);
                enter_flow(id);
                data_edge(recv, EdgeType::Receiver, id);
                for (const auto& a : args) data_edge(a, EdgeType::Parameter, id);
                return {id, -1};
            }
            case AstKind::New: {
                std::vector<Value> args;
                for (const auto& c : e.children) args.push_back(eval(c));
                int id = add_node(NodeType::Action, node_feature_string(e, m_), "New", e.span);
                enter_flow(id);
                for (const auto& a : args) data_edge(a, EdgeType::Parameter, id);
                return {id, -1};
            }
            case AstKind::InfixOperator: {
                Value l = eval(e.children[0]);
                Value r = eval(e.children[1]);
                int id = add_node(NodeType::Action, e.text, "InfixOperator", e.span);
                enter_flow(id);
                data_edge(l, EdgeType::Parameter, id);
                data_edge(r, EdgeType::Parameter, id);
                return {id, -1};
            }
            default:
                throw InternalError(std::string("not an expression: ") + frontend::to_string(e.kind));
        }
    }

    int declare(const AstNode& decl) {
        int id = add_node(NodeType::Data, decl.type_name, "VarDecl", decl.span);
        var_node_[decl.var_id] = id;
        return id;
    }

    // Assignment of `v` to variable `var`. An operation on the right-hand
    // side defines the variable directly; a plain value goes through an "="
    // action.
    void define(int var, const Value& v, const AstNode& stmt) {
        const int target = var_node_[var];
        if (v.node >= 0 && g_.nodes[v.node].ntype == NodeType::Action) {
            add_edge(v.node, EdgeType::Definition, target);
        } else {
            int id = add_node(NodeType::Action, "=", frontend::to_string(stmt.kind), stmt.span);
            enter_flow(id);
            data_edge(v, EdgeType::Parameter, id);
            add_edge(id, EdgeType::Definition, target);
        }
        if (v.var >= 0 && !frontend::is_primitive_type(m_.variables[var].type) &&
            !frontend::is_primitive_type(m_.variables[v.var].type)) {
            direct_assign_.emplace_back(var, v.var);
        }
    }

    // Control leaves the current statement abruptly (return or throw): send
    // the frontier to the innermost handler.
    void jump_abrupt(bool is_throw) {
        for (auto it = regions_.rbegin(); it != regions_.rend(); ++it) {
            TryContext& t = tries_[it->try_index];
            if (is_throw && it->try_body) {
                append(t.to_first_catch, frontier_);
                frontier_.clear();
                return;
            }
            if (t.has_finally) {
                append(t.pending_finally, frontier_);
                frontier_.clear();
                return;
            }
        }
        for (int f : frontier_) add_edge(f, EdgeType::Dep, exit_);
        frontier_.clear();
    }

    void back_edges(int loop) {
        for (int f : frontier_) {
            if (f != loop) add_edge(f, EdgeType::Dep, loop);
        }
    }

    void block(const AstNode& b) {
        for (const auto& s : b.children) stmt(s);
    }

    void stmt(const AstNode& s) {
        switch (s.kind) {
            case AstKind::VarDecl:
                declare(s);
                if (!s.children.empty()) define(s.var_id, eval(s.children[0]), s);
                break;
            case AstKind::Assign:
                define(s.var_id, eval(s.children[0]), s);
                break;
            case AstKind::ExprStmt:
                eval(s.children[0]);
                break;
            case AstKind::Return:
                if (!s.children.empty()) eval(s.children[0]);
                jump_abrupt(false);
                break;
            case AstKind::Throw:
                eval(s.children[0]);
                jump_abrupt(true);
                break;
            case AstKind::If:
                if_stmt(s);
                break;
            case AstKind::While:
                while_stmt(s);
                break;
            case AstKind::For:
                for_stmt(s);
                break;
            case AstKind::TryCatchFinally:
                try_stmt(s);
                break;
            default:
                throw InternalError(std::string("not a statement: ") + frontend::to_string(s.kind));
        }
    }

    void if_stmt(const AstNode& s) {
        Value c = eval(s.children[0]);
        int n = add_node(NodeType::Control, "if", "If", s.span);
        enter_flow(n);
        data_edge(c, EdgeType::Condition, n);
        governing_.push_back(n);
        frontier_ = {n};
        block(s.children[1]);
        std::vector<int> taken = take_frontier();
        frontier_ = {n};
        if (s.has_else) block(s.children[2]);
        governing_.pop_back();
        append(frontier_, taken);
    }

    void while_stmt(const AstNode& s) {
        Value c = eval(s.children[0]);
        int w = add_node(NodeType::Control, "while", "While", s.span);
        enter_flow(w);
        data_edge(c, EdgeType::Condition, w);
        governing_.push_back(w);
        frontier_ = {w};
        block(s.children[1]);
        back_edges(w);
        governing_.pop_back();
        frontier_ = {w};
    }

    void for_stmt(const AstNode& s) {
        stmt(s.children[0]);
        Value c = eval(s.children[1]);
        int f = add_node(NodeType::Control, "for", "For", s.span);
        enter_flow(f);
        data_edge(c, EdgeType::Condition, f);
        governing_.push_back(f);
        frontier_ = {f};
        block(s.children[3]);
        stmt(s.children[2]);
        back_edges(f);
        governing_.pop_back();
        frontier_ = {f};
    }

    void try_stmt(const AstNode& s) {
        const int ti = static_cast<int>(tries_.size());
        tries_.push_back(TryContext{});
        tries_[ti].has_finally = s.has_finally;

        regions_.push_back({true, ti});
        block(s.children[0]);
        std::vector<int> normal_exits = take_frontier();
        regions_.pop_back();

        const std::size_t clauses_end = s.children.size() - (s.has_finally ? 1 : 0);
        std::vector<int> catch_nodes;
        for (std::size_t i = 1; i < clauses_end; i += 2) {
            int c = add_node(NodeType::Control, "catch", "TryCatchFinally", s.children[i].span);
            add_governed(c);
            catch_nodes.push_back(c);
        }
        for (int a : tries_[ti].actions) {
            for (int c : catch_nodes) add_edge(a, EdgeType::Throw, c);
        }
        for (int f : tries_[ti].to_first_catch) add_edge(f, EdgeType::Dep, catch_nodes.front());

        for (std::size_t i = 1, k = 0; i < clauses_end; i += 2, ++k) {
            const int c = catch_nodes[k];
            regions_.push_back({false, ti});
            governing_.push_back(c);
            frontier_ = {c};
            int param = declare(s.children[i]);
            add_edge(c, EdgeType::Definition, param);
            block(s.children[i + 1]);
            append(normal_exits, frontier_);
            frontier_.clear();
            governing_.pop_back();
            regions_.pop_back();
        }

        if (!s.has_finally) {
            frontier_ = std::move(normal_exits);
            return;
        }
        // Abrupt exits that pass through finally rejoin the normal path after
        // it when the statement can complete normally.
        const bool completes = !normal_exits.empty();
        frontier_ = std::move(normal_exits);
        append(frontier_, tries_[ti].pending_finally);
        int fin = add_node(NodeType::Control, "finally", "TryCatchFinally", s.children.back().span);
        enter_flow(fin);
        governing_.push_back(fin);
        block(s.children.back());
        governing_.pop_back();
        if (!completes) jump_abrupt(false);
    }

    void add_use_edges() {
        for (std::size_t v = 0; v < uses_.size(); ++v) {
            std::vector<int> order;
            for (int c : uses_[v]) {
                if (order.empty() || order.back() != c) order.push_back(c);
            }
            if (order.empty()) continue;
            extra_.push_back({var_node_[v], EdgeType::FirstUse, order.front()});
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                extra_.push_back({order[i], EdgeType::LastUse, order[i + 1]});
            }
        }
    }

    void add_alias_edges() {
        std::vector<int> parent(m_.variables.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        bool any = false;
        for (auto [a, b] : direct_assign_) {
            int ra = find(a), rb = find(b);
            if (ra != rb) {
                parent[std::max(ra, rb)] = std::min(ra, rb);
                any = true;
            }
        }
        if (!any) return;
        const int n = static_cast<int>(parent.size());
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a != b && find(a) == find(b) && var_node_[a] >= 0 && var_node_[b] >= 0) {
                    extra_.push_back({var_node_[a], EdgeType::Alias, var_node_[b]});
                }
            }
        }
    }
};

}  // namespace

std::string call_feature(std::string_view receiver_type, std::string_view method,
                         std::span<const std::string> arg_types) {
    std::string out;
    out.append(receiver_type).append(".").append(method).append("#");
    for (const auto& t : arg_types) out.append(t).append("#");
    return out;
}

std::string constructor_feature(std::string_view class_name, std::span<const std::string> arg_types) {
    return call_feature(class_name, "<init>", arg_types);
}

std::string static_type(const AstNode& e, const MethodAst& m) {
    switch (e.kind) {
        case AstKind::Literal:
            return e.type_name;
        case AstKind::VarRef:
            return m.variables[e.var_id].type;
        case AstKind::New:
            return e.text;
        case AstKind::InfixOperator: {
            if (is_comparison_or_logical(e.text)) return "boolean";
            std::string l = static_type(e.children[0], m);
            std::string r = static_type(e.children[1], m);
            if (e.text == "+" && (l == "String" || r == "String")) return "String";
            if (l == "int" && r == "int") return "int";
            return "?";
        }
        default:
            return "?";
    }
}

std::string node_feature_string(const AstNode& e, const MethodAst& m) {
    switch (e.kind) {
        case AstKind::VarDecl:
        case AstKind::Literal:
            return e.type_name;
        case AstKind::VarRef:
            return m.variables[e.var_id].type;
        case AstKind::Call: {
            const std::size_t first = e.has_receiver ? 1 : 0;
            std::string recv = e.has_receiver ? static_type(e.children[0], m) : "?";
            return call_feature(recv, e.text, arg_types(e, first, m));
        }
        case AstKind::New:
            return constructor_feature(e.text, arg_types(e, 0, m));
        case AstKind::InfixOperator:
            return e.text;
        case AstKind::Assign:
            return "=";
        case AstKind::If:
            return "if";
        case AstKind::While:
            return "while";
        case AstKind::For:
            return "for";
        case AstKind::TryCatchFinally:
            return "catch";
        default:
            return {};
    }
}

SigmaGraph build_sigma0(const MethodAst& ast, std::string method_id) {
    return Builder(ast, false, std::move(method_id)).run();
}

SigmaGraph build_sigma1(const MethodAst& ast, std::string method_id) {
    return Builder(ast, true, std::move(method_id)).run();
}

SigmaGraph build_graph(const MethodAst& ast, Flavor flavor, std::string method_id) {
    return flavor == Flavor::Sigma0 ? build_sigma0(ast, std::move(method_id))
                                    : build_sigma1(ast, std::move(method_id));
}

}  // namespace codegraph::graph
