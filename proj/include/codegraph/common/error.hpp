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

#include <stdexcept>
#include <string>

namespace codegraph {

/// Root of every exception thrown by the library. Callers that only care
/// about "did it work" catch this; the subclasses carry structured detail.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Broken internal invariant; indicates a bug rather than bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

/// Configuration rejected at load or validation time.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// I/O failure (missing file, unwritable directory).
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace codegraph
