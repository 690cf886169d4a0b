// Copyright 2026 The semoctree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semoctree {

/// Machine-readable failure classes. The CLI maps each to an exit status.
enum class ErrorCategory {
    invalid_argument,
    config,
    out_of_bounds,
    divergence_undefined,
    stale_cache,
    size,
    empty_graph,
    parse,
    io,
    format,
    corruption,
};

inline std::string_view to_string(ErrorCategory c)
{
    switch (c) {
    case ErrorCategory::invalid_argument: return "invalid_argument";
    case ErrorCategory::config: return "config";
    case ErrorCategory::out_of_bounds: return "out_of_bounds";
    case ErrorCategory::divergence_undefined: return "divergence_undefined";
    case ErrorCategory::stale_cache: return "stale_cache";
    case ErrorCategory::size: return "size";
    case ErrorCategory::empty_graph: return "empty_graph";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::io: return "io";
    case ErrorCategory::format: return "format";
    case ErrorCategory::corruption: return "corruption";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category)
    {
    }

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorCategory c, const std::string& what)
{
    throw Error(c, what);
}

inline void require(bool ok, ErrorCategory c, const char* what)
{
    if (!ok)
        throw Error(c, what);
}

} // namespace detail
} // namespace semoctree
