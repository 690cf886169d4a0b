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

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semoctree/error.hpp"
#include "semoctree/semantics.hpp"

namespace semoctree {

inline constexpr std::string_view kCloudHeader = "x,y,z,class_id,confidence";

struct CloudRecord {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    ClassId class_id = 0;
    double confidence = 1.0;

    friend bool operator==(const CloudRecord&, const CloudRecord&) = default;
};

struct LineError {
    std::size_t line = 0;
    std::string message;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <class T>
std::optional<T> parse_number(std::string_view s)
{
    s = trim(s);
    T v{};
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty())
        return std::nullopt;
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

} // namespace detail

/**
 * Streaming reader for semantic point clouds in comma-separated text. Bad
 * lines are skipped and recorded; once more than `error_budget` lines have
 * failed the whole file is rejected with a parse error.
 */
class CloudReader {
public:
    CloudReader(std::istream& in, int num_classes, std::size_t error_budget = 0)
        : in_(in), num_classes_(num_classes), budget_(error_budget)
    {
        std::string header;
        if (!std::getline(in_, header) || detail::trim(header) != kCloudHeader)
            detail::fail(ErrorCategory::parse, "line 1: expected header '" + std::string(kCloudHeader) + "'");
        line_ = 1;
    }

    std::optional<CloudRecord> next()
    {
        std::string text;
        while (std::getline(in_, text)) {
            ++line_;
            if (detail::trim(text).empty())
                continue;
            std::string why;
            if (auto rec = parse(text, why))
                return rec;
            errors_.push_back({line_, why});
            if (errors_.size() > budget_)
                detail::fail(ErrorCategory::parse, "line " + std::to_string(line_) + ": " + why +
                                                       " (error budget of " + std::to_string(budget_) +
                                                       " exhausted)");
        }
        return std::nullopt;
    }

    const std::vector<LineError>& errors() const { return errors_; }

private:
    std::optional<CloudRecord> parse(std::string_view text, std::string& why) const
    {
        const auto fields = detail::split(detail::trim(text), ',');
        if (fields.size() != 5) {
            why = fields.size() < 5 ? "missing columns" : "too many columns";
            return std::nullopt;
        }
        CloudRecord r;
        const auto x = detail::parse_number<double>(fields[0]);
        const auto y = detail::parse_number<double>(fields[1]);
        const auto z = detail::parse_number<double>(fields[2]);
        const auto c = detail::parse_number<ClassId>(fields[3]);
        const auto conf = detail::parse_number<double>(fields[4]);
        if (!x || !y || !z || !c || !conf) {
            why = "non-numeric field";
            return std::nullopt;
        }
        if (!std::isfinite(*x) || !std::isfinite(*y) || !std::isfinite(*z)) {
            why = "non-finite coordinate";
            return std::nullopt;
        }
        if (*c < 0 || *c > num_classes_) {
            why = "class_id " + std::to_string(*c) + " out of range";
            return std::nullopt;
        }
        if (!(*conf > 0.0 && *conf <= 1.0)) {
            why = "confidence outside (0, 1]";
            return std::nullopt;
        }
        r.x = *x;
        r.y = *y;
        r.z = *z;
        r.class_id = *c;
        r.confidence = *conf;
        return r;
    }

    std::istream& in_;
    int num_classes_;
    std::size_t budget_;
    std::size_t line_ = 0;
    std::vector<LineError> errors_;
};

struct CloudContents {
    std::vector<CloudRecord> records;
    std::vector<LineError> errors;
};

inline CloudContents read_cloud(std::istream& in, int num_classes, std::size_t error_budget = 0)
{
    CloudReader reader(in, num_classes, error_budget);
    CloudContents out;
    while (auto r = reader.next())
        out.records.push_back(*r);
    out.errors = reader.errors();
    return out;
}

inline CloudContents read_cloud(const std::filesystem::path& path, int num_classes, std::size_t error_budget = 0)
{
    std::ifstream in(path);
    if (!in)
        detail::fail(ErrorCategory::io, "cannot open " + path.string());
    return read_cloud(in, num_classes, error_budget);
}

} // namespace semoctree
