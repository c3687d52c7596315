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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "codegraph/frontend/ast.hpp"

namespace codegraph::frontend {

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::string expected, std::string found, Span where);

    const std::string& expected() const { return expected_; }
    const std::string& found() const { return found_; }
    const Span& where() const { return where_; }

private:
    std::string expected_;
    std::string found_;
    Span where_;
};

/// A reference to a name with no visible declaration.
class UnresolvedVariable : public Error {
public:
    UnresolvedVariable(const std::string& name, Span where);
    const std::string& name() const { return name_; }
    const Span& where() const { return where_; }

private:
    std::string name_;
    Span where_;
};

/// Parses exactly one method; trailing tokens are an error.
MethodAst parse_method(const TokenSequence& tokens);

/// tokenize + parse_method.
MethodAst parse_method_source(std::string_view source);

/// One source file: a package name and the raw text of each method in it.
struct SourceUnit {
    std::string package_name;
    std::vector<std::string> methods;
    std::string origin;
};

/// Splits a file into per-method texts by matching top-level braces. Lexing
/// errors propagate; unbalanced braces produce a ParseError.
std::vector<std::string> split_methods(std::string_view source);

/// Loads every `.mj` file under `root`. The package of a file is its parent
/// directory relative to `root` with separators replaced by '.', or
/// "default" for files directly under `root`. Files are visited in sorted
/// path order. Per-file lexing failures are reported through `errors`
/// instead of aborting the walk.
struct SourceLoadError {
    std::string origin;
    std::string message;
};
std::vector<SourceUnit> load_source_tree(const std::filesystem::path& root,
                                         std::vector<SourceLoadError>* errors = nullptr);

}  // namespace codegraph::frontend
