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

// Flat "key = value" text files. '#' starts a comment line; blank lines are
// ignored; every key may appear once.
//
// World file:
//   origin = 0,0,0
//   edge_length = 64
//   max_depth = 6
//   branching = 8
//   num_classes = 8
//   class.3.name = grass
//
// Weights file:
//   num_classes = 8
//   alpha = 0.01
//   class.1 = relevant 1
//   class.3 = irrelevant 10
//   class.4 = neutral

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "semoctree/io/cloud.hpp"
#include "semoctree/octree_key.hpp"
#include "semoctree/semantics.hpp"
#include "semoctree/weights.hpp"

namespace semoctree {

/// Shortest text that parses back to exactly `v`.
inline std::string format_exact(double v)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{})
        detail::fail(ErrorCategory::format, "cannot format number");
    return std::string(buf.data(), ptr);
}

class KeyValueFile {
public:
    static KeyValueFile parse(std::istream& in)
    {
        KeyValueFile f;
        std::string raw;
        std::size_t line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const std::string_view text = detail::trim(raw);
            if (text.empty() || text.front() == '#')
                continue;
            const auto eq = text.find('=');
            if (eq == std::string_view::npos)
                detail::fail(ErrorCategory::config, "line " + std::to_string(line) + ": expected key = value");
            const std::string key(detail::trim(text.substr(0, eq)));
            if (key.empty())
                detail::fail(ErrorCategory::config, "line " + std::to_string(line) + ": empty key");
            if (!f.values_.emplace(key, std::string(detail::trim(text.substr(eq + 1)))).second)
                detail::fail(ErrorCategory::config, "line " + std::to_string(line) + ": duplicate key '" + key + "'");
        }
        return f;
    }

    static KeyValueFile load(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in)
            detail::fail(ErrorCategory::io, "cannot open " + path.string());
        return parse(in);
    }

    const std::map<std::string, std::string>& values() const { return values_; }
    bool has(const std::string& key) const { return values_.contains(key); }

    const std::string& get(const std::string& key) const
    {
        auto it = values_.find(key);
        if (it == values_.end())
            detail::fail(ErrorCategory::config, "missing key '" + key + "'");
        return it->second;
    }

    template <class T>
    T number(const std::string& key) const
    {
        const auto v = detail::parse_number<T>(get(key));
        if (!v)
            detail::fail(ErrorCategory::config, "key '" + key + "': not a number");
        return *v;
    }

private:
    std::map<std::string, std::string> values_;
};

namespace detail {

/// Class id of a "class.<id>" or "class.<id>.<field>" key, or -1.
inline ClassId class_key_id(const std::string& key, std::string_view field)
{
    if (!key.starts_with("class."))
        return -1;
    std::string_view rest = std::string_view(key).substr(6);
    std::string_view id_text = rest;
    if (!field.empty()) {
        const auto dot = rest.find('.');
        if (dot == std::string_view::npos || rest.substr(dot + 1) != field)
            return -1;
        id_text = rest.substr(0, dot);
    } else if (rest.find('.') != std::string_view::npos) {
        return -1;
    }
    const auto id = parse_number<ClassId>(id_text);
    if (!id)
        fail(ErrorCategory::config, "key '" + key + "': bad class id");
    return *id;
}

} // namespace detail

struct WorldFile {
    WorldConfig world;
    ClassRegistry classes{4};
};

inline WorldFile parse_world(const KeyValueFile& f)
{
    WorldFile out;
    const auto origin = detail::split(f.get("origin"), ',');
    if (origin.size() != 3)
        detail::fail(ErrorCategory::config, "origin must have 3 components");
    for (int a = 0; a < 3; ++a) {
        const auto v = detail::parse_number<double>(origin[static_cast<std::size_t>(a)]);
        if (!v)
            detail::fail(ErrorCategory::config, "origin: not a number");
        out.world.origin[static_cast<std::size_t>(a)] = *v;
    }
    out.world.edge_length = f.number<double>("edge_length");
    out.world.max_depth = f.number<int>("max_depth");
    out.world.branching = f.has("branching") ? f.number<int>("branching") : 8;
    out.world.validate();
    const int k = f.number<int>("num_classes");
    detail::require(k >= 4, ErrorCategory::config, "num_classes must be at least 4");
    out.classes = ClassRegistry(k);
    for (const auto& [key, value] : f.values()) {
        static const std::set<std::string> known{"origin", "edge_length", "max_depth", "branching", "num_classes"};
        if (known.contains(key))
            continue;
        const ClassId id = detail::class_key_id(key, "name");
        if (id < 0)
            detail::fail(ErrorCategory::config, "unknown key '" + key + "'");
        if (!out.classes.contains(id))
            detail::fail(ErrorCategory::config, "key '" + key + "': class id out of range");
        out.classes.set_name(id, value);
    }
    return out;
}

inline std::string emit_world(const WorldFile& w)
{
    std::ostringstream out;
    out << "origin = " << format_exact(w.world.origin[0]) << ',' << format_exact(w.world.origin[1]) << ','
        << format_exact(w.world.origin[2]) << '\n'
        << "edge_length = " << format_exact(w.world.edge_length) << '\n'
        << "max_depth = " << w.world.max_depth << '\n'
        << "branching = " << w.world.branching << '\n'
        << "num_classes = " << w.classes.num_classes() << '\n';
    for (ClassId id = 1; id <= w.classes.num_classes(); ++id)
        if (!w.classes.name(id).empty())
            out << "class." << id << ".name = " << w.classes.name(id) << '\n';
    return out.str();
}

/// Compression weights as stored on disk, with explicitly neutral classes remembered.
struct WeightsConfig {
    int num_classes = 0;
    CompressionWeights weights;
    std::set<ClassId> neutral;

    friend bool operator==(const WeightsConfig&, const WeightsConfig&) = default;

    ClassRole role(ClassId id) const
    {
        if (weights.beta.contains(id))
            return ClassRole::relevant;
        if (weights.gamma.contains(id))
            return ClassRole::irrelevant;
        return ClassRole::neutral;
    }
};

inline WeightsConfig parse_weights(const KeyValueFile& f)
{
    WeightsConfig out;
    out.num_classes = f.number<int>("num_classes");
    detail::require(out.num_classes >= 4, ErrorCategory::config, "num_classes must be at least 4");
    out.weights.alpha = f.has("alpha") ? f.number<double>("alpha") : 0.0;
    std::set<ClassId> seen;
    for (const auto& [key, value] : f.values()) {
        if (key == "num_classes" || key == "alpha")
            continue;
        const ClassId id = detail::class_key_id(key, "");
        if (id < 0)
            detail::fail(ErrorCategory::config, "unknown key '" + key + "'");
        if (id > out.num_classes)
            detail::fail(ErrorCategory::config, "key '" + key + "': class id out of range");
        if (!seen.insert(id).second)
            detail::fail(ErrorCategory::config, "class " + std::to_string(id) + " listed twice");
        std::istringstream words(value);
        std::string role;
        std::string weight_text;
        std::string extra;
        words >> role >> weight_text >> extra;
        if (!extra.empty())
            detail::fail(ErrorCategory::config, "key '" + key + "': trailing text");
        if (role == "neutral") {
            if (!weight_text.empty())
                detail::fail(ErrorCategory::config, "key '" + key + "': neutral classes carry no weight");
            out.neutral.insert(id);
            continue;
        }
        if (role != "relevant" && role != "irrelevant")
            detail::fail(ErrorCategory::config, "key '" + key + "': role must be relevant, irrelevant or neutral");
        const auto w = detail::parse_number<double>(weight_text);
        if (!w)
            detail::fail(ErrorCategory::config, "key '" + key + "': missing or invalid weight");
        (role == "relevant" ? out.weights.beta : out.weights.gamma)[id] = *w;
    }
    out.weights.validate(out.num_classes);
    return out;
}

inline WeightsConfig load_weights(const std::filesystem::path& path) { return parse_weights(KeyValueFile::load(path)); }

inline WeightsConfig parse_weights_text(const std::string& text)
{
    std::istringstream in(text);
    return parse_weights(KeyValueFile::parse(in));
}

inline std::string emit_weights(const WeightsConfig& c)
{
    std::ostringstream out;
    out << "num_classes = " << c.num_classes << '\n' << "alpha = " << format_exact(c.weights.alpha) << '\n';
    for (ClassId id = 0; id <= c.num_classes; ++id) {
        if (auto it = c.weights.beta.find(id); it != c.weights.beta.end())
            out << "class." << id << " = relevant " << format_exact(it->second) << '\n';
        else if (auto jt = c.weights.gamma.find(id); jt != c.weights.gamma.end())
            out << "class." << id << " = irrelevant " << format_exact(jt->second) << '\n';
        else if (c.neutral.contains(id))
            out << "class." << id << " = neutral\n";
    }
    return out.str();
}

inline WorldFile load_world(const std::filesystem::path& path) { return parse_world(KeyValueFile::load(path)); }

} // namespace semoctree
