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

#include "codegraph/synth/synth.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "codegraph/common/error.hpp"

namespace codegraph::synth {

namespace {

const std::vector<std::string> kRefTypes = {"Request", "Iterator", "List", "Buffer", "String"};
const std::vector<std::string> kMethodNames = {"run",     "getItemId", "setValue", "process",
                                               "compute", "handle",    "loadFile", "wait_for_task_ended"};
const std::vector<std::string> kCallNames = {"get", "put", "size", "hasNext", "next", "append", "close", "open"};
const std::vector<std::string> kArith = {"+", "-", "*", "/", "%"};
const std::vector<std::string> kCompare = {"==", "!=", "<", ">", "<=", ">="};
const std::vector<std::string> kLogic = {"&&", "||"};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[rng.uniform_index(v.size())];
}

class MethodGen {
public:
    MethodGen(Rng& rng, const RandomMethodOptions& opt) : rng_(rng), opt_(opt) {}

    std::string run() {
        std::ostringstream out;
        static const std::vector<std::string> ret_types = {"void", "int", "boolean", "String", "Request"};
        ret_ = pick(rng_, ret_types);
        out << ret_ << ' ' << pick(rng_, kMethodNames) << '(';
        scopes_.emplace_back();
        const int np = static_cast<int>(rng_.uniform_index(opt_.max_params + 1));
        for (int i = 0; i < np; ++i) {
            std::string t = random_type();
            std::string n = fresh();
            if (i) out << ", ";
            out << t << ' ' << n;
            scopes_.back().push_back({n, t});
        }
        out << ") ";
        block(out, 0, false, false, 1);
        out << '\n';
        return out.str();
    }

private:
    struct Var {
        std::string name;
        std::string type;
    };

    Rng& rng_;
    RandomMethodOptions opt_;
    std::string ret_;
    std::vector<std::vector<Var>> scopes_;
    int counter_ = 0;

    std::string fresh() { return "v" + std::to_string(counter_++); }

    std::string random_type() {
        static const std::vector<std::string> types = {"int", "int", "boolean", "String", "Request",
                                                       "Iterator", "List"};
        return pick(rng_, types);
    }

    std::vector<Var> visible(const std::string& type) const {
        std::vector<Var> out;
        for (const auto& s : scopes_) {
            for (const auto& v : s) {
                if (type.empty() || v.type == type) out.push_back(v);
            }
        }
        return out;
    }

    static void indent(std::ostream& out, int level) {
        for (int i = 0; i < level; ++i) out << "  ";
    }

    std::string literal(const std::string& type) {
        if (type == "int") return std::to_string(rng_.uniform_index(100));
        if (type == "boolean") return rng_.bernoulli(0.5) ? "true" : "false";
        static const std::vector<std::string> strs = {"\"a\"", "\"key\"", "\"\"", "\"x y\"", "\"q\\\"t\""};
        return pick(rng_, strs);
    }

    std::string args(int depth) {
        const int n = static_cast<int>(rng_.uniform_index(3));
        std::string s;
        for (int i = 0; i < n; ++i) {
            if (i) s += ", ";
            static const std::vector<std::string> at = {"int", "boolean", "String", "Request"};
            s += expr(pick(rng_, at), depth + 1);
        }
        return s;
    }

    std::string call(int depth) {
        auto refs = visible("");
        std::vector<Var> receivers;
        for (const auto& v : refs) {
            if (v.type != "int" && v.type != "boolean") receivers.push_back(v);
        }
        const std::string m = pick(rng_, kCallNames);
        const double r = rng_.uniform();
        if (r < 0.5 && !receivers.empty()) return pick(rng_, receivers).name + "." + m + "(" + args(depth) + ")";
        if (r < 0.7) return m + "(" + args(depth) + ")";
        if (r < 0.85) return "new " + pick(rng_, kRefTypes) + "(" + args(depth) + ")." + m + "(" + args(depth) + ")";
        return "(" + expr("String", depth + 1) + ")." + m + "(" + args(depth) + ")";
    }

    std::string expr(const std::string& type, int depth) {
        const bool leaf = depth >= opt_.max_depth + 1 || rng_.bernoulli(0.45);
        auto vars = visible(type);
        if (leaf) {
            if (!vars.empty() && rng_.bernoulli(0.6)) return pick(rng_, vars).name;
            if (type == "int" || type == "boolean" || type == "String") return literal(type);
            return "new " + type + "(" + (depth < 2 ? args(depth) : std::string()) + ")";
        }
        const double r = rng_.uniform();
        if (r < 0.25) return call(depth);
        if (type == "int") {
            std::string e = expr("int", depth + 1) + " " + pick(rng_, kArith) + " " + expr("int", depth + 1);
            return rng_.bernoulli(0.3) ? "(" + e + ")" : e;
        }
        if (type == "boolean") {
            if (r < 0.7) return expr("int", depth + 1) + " " + pick(rng_, kCompare) + " " + expr("int", depth + 1);
            return "(" + expr("boolean", depth + 1) + ") " + pick(rng_, kLogic) + " (" +
                   expr("boolean", depth + 1) + ")";
        }
        if (type == "String") return expr("String", depth + 1) + " + " + expr("int", depth + 1);
        return "new " + type + "(" + args(depth) + ")";
    }

    // Returns whether the block completes normally.
    bool block(std::ostream& out, int depth, bool in_for, bool need_op, int level) {
        out << "{\n";
        scopes_.emplace_back();
        const int n = static_cast<int>(rng_.uniform_index(opt_.max_block_statements + 1));
        bool completes = true;
        if (need_op) {
            indent(out, level);
            out << call(depth) << ";\n";
        }
        for (int i = 0; i < n && completes; ++i) {
            const bool last = i + 1 == n;
            completes = statement(out, depth, in_for, last, level);
        }
        scopes_.pop_back();
        indent(out, level - 1);
        out << "}";
        return completes;
    }

    bool statement(std::ostream& out, int depth, bool in_for, bool last, int level) {
        const bool nest = depth < opt_.max_depth;
        double r = rng_.uniform();
        if (last && !in_for && r < 0.2) {
            indent(out, level);
            if (rng_.bernoulli(0.7)) {
                out << "return";
                if (ret_ != "void") out << ' ' << expr(ret_, depth + 1);
                out << ";\n";
            } else {
                out << "throw new " << pick(rng_, std::vector<std::string>{"Exception", "IOException"}) << "("
                    << args(depth) << ");\n";
            }
            return false;
        }
        r = rng_.uniform();
        indent(out, level);
        if (r < 0.2) {
            std::string t = random_type();
            std::string name = fresh();
            out << t << ' ' << name;
            if (rng_.bernoulli(0.7)) out << " = " << expr(t, depth + 1);
            out << ";\n";
            scopes_.back().push_back({name, t});
            return true;
        }
        if (r < 0.35) {
            auto vars = visible("");
            if (!vars.empty()) {
                const Var& v = pick(rng_, vars);
                out << v.name << " = " << expr(v.type, depth + 1) << ";\n";
                return true;
            }
        }
        if (r < 0.55 || !nest) {
            out << call(depth) << ";\n";
            return true;
        }
        if (r < 0.68) {
            out << "if (" << expr("boolean", depth + 1) << ") ";
            bool a = block(out, depth + 1, in_for, false, level + 1);
            bool b = true;
            if (rng_.bernoulli(0.5)) {
                out << " else ";
                b = block(out, depth + 1, in_for, false, level + 1);
            }
            out << "\n";
            return a || b;
        }
        if (r < 0.78) {
            out << "while (" << expr("boolean", depth + 1) << ") ";
            block(out, depth + 1, in_for, false, level + 1);
            out << "\n";
            return true;
        }
        if (r < 0.88) {
            std::string i = fresh();
            out << "for (int " << i << " = 0; " << i << " < " << expr("int", depth + 1) << "; " << i << " = " << i
                << " + 1) ";
            scopes_.emplace_back();
            scopes_.back().push_back({i, "int"});
            block(out, depth + 1, true, false, level + 1);
            scopes_.pop_back();
            out << "\n";
            return true;
        }
        out << "try ";
        bool normal = block(out, depth + 1, in_for, true, level + 1);
        const int catches = 1 + static_cast<int>(rng_.uniform_index(2));
        for (int c = 0; c < catches; ++c) {
            std::string e = fresh();
            out << " catch (" << pick(rng_, std::vector<std::string>{"Exception", "IOException"}) << ' ' << e
                << ") ";
            scopes_.emplace_back();
            scopes_.back().push_back({e, "Exception"});
            normal = block(out, depth + 1, in_for, false, level + 1) || normal;
            scopes_.pop_back();
        }
        if (rng_.bernoulli(0.4)) {
            out << " finally ";
            // A finally that never completes would make the whole try abrupt
            // inside a for body, so keep it simple there.
            normal = block(out, depth + 1, true, false, level + 1) && normal;
        }
        out << "\n";
        return normal;
    }
};

// Fixture vocabulary.
const std::vector<std::string> kNouns = {"Item",    "User",    "Order",  "File",   "Task",    "Buffer",
                                         "Account", "Message", "Node",   "Config", "Session", "Report"};
const std::vector<std::string> kAttrs = {"Id", "Name", "Size", "Count", "Status"};
const std::vector<std::string> kVerbs = {"get",  "set",   "is",     "create", "add",   "remove", "find",
                                         "load", "count", "update", "check",  "save",  "print"};

std::string lower_first(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    return s;
}

std::string attr_type(const std::string& attr) { return attr == "Name" ? "String" : "int"; }

std::string noise(Rng& rng, int& counter) {
    std::ostringstream o;
    const std::string v = "tmp" + std::to_string(counter++);
    switch (rng.uniform_index(5)) {
        case 0: o << "  trace(\"enter\");\n"; break;
        case 1: o << "  Logger " << v << " = new Logger();\n  " << v << ".debug(\"start\");\n"; break;
        case 2: o << "  int " << v << " = " << rng.uniform_index(10) << ";\n"; break;
        default: break;
    }
    return o.str();
}

FixtureMethod templated(Rng& rng, const std::string& verb, const std::string& noun, const std::string& attr) {
    FixtureMethod m;
    const std::string n = lower_first(noun);
    int counter = 0;
    std::ostringstream b;
    std::string sig;
    std::string name;
    const std::string at = attr_type(attr);
    if (verb == "get") {
        name = "get" + noun + attr;
        sig = at + " " + name + "(" + noun + " " + n + ")";
        b << noise(rng, counter);
        if (rng.bernoulli(0.5)) {
            b << "  " << at << " result = " << n << ".get" << attr << "();\n  return result;\n";
        } else {
            b << "  return " << n << ".get" << attr << "();\n";
        }
    } else if (verb == "set") {
        name = "set" + noun + attr;
        sig = "void " + name + "(" + noun + " " + n + ", " + at + " value)";
        b << noise(rng, counter);
        b << "  " << n << ".set" << attr << "(value);\n";
        if (rng.bernoulli(0.4)) b << "  " << n << ".markDirty();\n";
    } else if (verb == "is") {
        name = "is" + noun + "Valid";
        sig = "boolean " + name + "(" + noun + " " + n + ")";
        b << noise(rng, counter);
        b << "  if (" << n << ".getStatus() != 0) {\n    return true;\n  }\n  return false;\n";
    } else if (verb == "create") {
        name = "create" + noun;
        sig = noun + " " + name + "(int id)";
        b << noise(rng, counter);
        b << "  " << noun << " " << n << " = new " << noun << "(id);\n";
        if (rng.bernoulli(0.5)) b << "  " << n << ".init();\n";
        b << "  return " << n << ";\n";
    } else if (verb == "add") {
        name = "add" + noun;
        sig = "void " + name + "(List items, " + noun + " " + n + ")";
        b << noise(rng, counter);
        if (rng.bernoulli(0.5)) b << "  if (" << n << ".isValid()) {\n    items.add(" << n << ");\n  }\n";
        else b << "  items.add(" << n << ");\n";
    } else if (verb == "remove") {
        name = "remove" + noun;
        sig = "boolean " + name + "(List items, " + noun + " " + n + ")";
        b << noise(rng, counter);
        b << "  if (items.contains(" << n << ")) {\n    items.remove(" << n << ");\n    return true;\n  }\n"
          << "  return false;\n";
    } else if (verb == "find") {
        name = "find" + noun + "By" + attr;
        sig = noun + " " + name + "(List items, " + at + " key)";
        b << noise(rng, counter);
        b << "  Iterator it = items.iterator();\n  while (it.hasNext()) {\n    " << noun << " " << n
          << " = it.next();\n    if (" << n << ".get" << attr << "() == key) {\n      return " << n
          << ";\n    }\n  }\n  return new " << noun << "(0);\n";
    } else if (verb == "load") {
        name = "load" + noun;
        sig = noun + " " + name + "(String path)";
        b << noise(rng, counter);
        b << "  try {\n    Reader reader = new Reader(path);\n    " << noun << " " << n << " = reader.read" << noun
          << "();\n    reader.close();\n    return " << n << ";\n  } catch (IOException e) {\n    trace(path);\n  }\n"
          << "  return new " << noun << "(0);\n";
    } else if (verb == "count") {
        name = "count" + noun + "s";
        sig = "int " + name + "(List items)";
        b << noise(rng, counter);
        b << "  int total = 0;\n  for (int i = 0; i < items.size(); i = i + 1) {\n    " << noun << " " << n
          << " = items.get(i);\n    total = total + " << n << ".getCount();\n  }\n  return total;\n";
    } else if (verb == "update") {
        name = "update" + noun + attr;
        sig = "void " + name + "(" + noun + " " + n + ", " + at + " delta)";
        b << noise(rng, counter);
        b << "  " << at << " current = " << n << ".get" << attr << "();\n  current = current + delta;\n  " << n
          << ".set" << attr << "(current);\n";
    } else if (verb == "check") {
        name = "check" + noun + attr;
        sig = "void " + name + "(" + noun + " " + n + ")";
        b << noise(rng, counter);
        b << "  if (" << n << ".get" << attr << "() == " << (at == "int" ? "0" : "\"\"") << ") {\n"
          << "    throw new IllegalStateException(\"" << lower_first(attr) << "\");\n  }\n";
    } else if (verb == "save") {
        name = "save" + noun;
        sig = "void " + name + "(" + noun + " " + n + ", Writer writer)";
        b << noise(rng, counter);
        b << "  try {\n    writer.write(" << n << ");\n  } catch (IOException e) {\n    trace(\"save\");\n  }"
          << " finally {\n    writer.close();\n  }\n";
    } else {
        name = "print" + noun;
        sig = "void " + name + "(" + noun + " " + n + ")";
        b << noise(rng, counter);
        b << "  Printer printer = new Printer();\n  String text = \"" << lower_first(noun) << ": \" + " << n
          << ".getName();\n  printer.print(text);\n";
    }
    m.name = name;
    m.source = sig + " {\n" + b.str() + "}\n";
    return m;
}

}  // namespace

std::string random_method(Rng& rng, const RandomMethodOptions& options) {
    MethodGen gen(rng, options);
    return gen.run();
}

std::vector<FixtureMethod> fixture_corpus(std::size_t num_methods, std::size_t num_packages, std::uint64_t seed) {
    if (num_packages == 0) throw ConfigError("fixture corpus needs at least one package");
    Rng rng(seed);
    std::vector<FixtureMethod> out;
    out.reserve(num_methods);
    for (std::size_t i = 0; i < num_methods; ++i) {
        const std::string& verb = pick(rng, kVerbs);
        const std::string& noun = pick(rng, kNouns);
        const std::string& attr = pick(rng, kAttrs);
        out.push_back(templated(rng, verb, noun, attr));
    }
    std::vector<std::size_t> order(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t k = 0; k < order.size(); ++k) {
        out[order[k]].package = "pkg" + std::to_string(k % num_packages);
    }
    return out;
}

void write_source_tree(const std::vector<FixtureMethod>& methods, const std::filesystem::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& m : methods) files[m.package] += m.source + "\n";
    std::filesystem::create_directories(root);
    for (const auto& [pkg, text] : files) {
        std::filesystem::path dir = root;
        std::string part;
        for (char c : pkg) {
            if (c == '.') {
                dir /= part;
                part.clear();
            } else {
                part += c;
            }
        }
        dir /= part;
        std::filesystem::create_directories(dir);
        std::ofstream f(dir / "Methods.mj", std::ios::binary);
        if (!f) throw IoError("cannot write " + (dir / "Methods.mj").string());
        f << text;
    }
}

std::vector<frontend::SourceUnit> as_source_units(const std::vector<FixtureMethod>& methods) {
    std::map<std::string, frontend::SourceUnit> units;
    for (const auto& m : methods) {
        auto& u = units[m.package];
        u.package_name = m.package;
        u.origin = m.package + "/Methods.mj";
        u.methods.push_back(m.source);
    }
    std::vector<frontend::SourceUnit> out;
    for (auto& [pkg, u] : units) out.push_back(std::move(u));
    return out;
}

}  // namespace codegraph::synth
