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

#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "semoctree/colored_graph.hpp"
#include "semoctree/compression.hpp"
#include "semoctree/io/config.hpp"

namespace semoctree {

/// Numbers in reports and exports: 9 significant digits.
inline std::string num(double v) { return fmt::format("{:.9g}", v); }

/// Fraction of the full tree's information about `id` kept by the compressed tree; empty when the full tree has none.
inline std::optional<double> retention(const InfoReport& compressed, const InfoReport& full, ClassId id)
{
    const auto i = static_cast<std::size_t>(id);
    if (!(full.class_info.at(i) > 0.0))
        return std::nullopt;
    return compressed.class_info.at(i) / full.class_info.at(i);
}

inline double leaf_ratio(const InfoReport& compressed, const InfoReport& full)
{
    return static_cast<double>(compressed.leaf_count) / static_cast<double>(full.leaf_count);
}

inline std::string_view role_name(ClassRole r)
{
    switch (r) {
    case ClassRole::relevant: return "relevant";
    case ClassRole::irrelevant: return "irrelevant";
    case ClassRole::neutral: return "neutral";
    }
    return "neutral";
}

/// "key: value" report of a compressed tree against the full tree.
inline std::string format_report(const InfoReport& compressed, const InfoReport& full, const WeightsConfig& weights,
                                 const ClassRegistry& classes)
{
    std::string out;
    auto line = [&](const std::string& key, const std::string& value) { out += key + ": " + value + "\n"; };
    line("num_classes", std::to_string(classes.num_classes()));
    line("alpha", num(weights.weights.alpha));
    line("leaf_count", std::to_string(compressed.leaf_count));
    line("stored_leaf_count", std::to_string(compressed.stored_leaf_count));
    line("full_leaf_count", std::to_string(full.leaf_count));
    line("leaf_ratio", num(leaf_ratio(compressed, full)));
    line("i_x", num(compressed.i_x));
    line("full_i_x", num(full.i_x));
    line("objective", num(compressed.objective));
    for (ClassId id = 0; id <= classes.num_classes(); ++id) {
        const std::string prefix = "class." + std::to_string(id);
        const auto i = static_cast<std::size_t>(id);
        line(prefix + ".name", classes.name(id).empty() ? "-" : classes.name(id));
        line(prefix + ".role", std::string(role_name(weights.role(id))));
        line(prefix + ".info", num(compressed.class_info.at(i)));
        line(prefix + ".full_info", num(full.class_info.at(i)));
        const auto r = retention(compressed, full, id);
        line(prefix + ".retention", r ? num(*r) : "n/a");
    }
    return out;
}

/// One row per leaf of `t`, stored leaves first, in key order.
inline std::string export_leaves_csv(const CompressedTree& t)
{
    std::string out = "depth,code,kind,x_lo,y_lo,z_lo,x_hi,y_hi,z_hi,weight,class\n";
    auto row = [&](const NodeKey& k, std::string_view kind, double weight, ClassId c) {
        const Box b = t.world.bounds(k);
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", k.depth, k.code, kind, num(b.lo[0]), num(b.lo[1]),
                           num(b.lo[2]), num(b.hi[0]), num(b.hi[1]), num(b.hi[2]), num(weight), c);
    };
    for (const CompressedLeaf& l : t.leaves)
        row(l.key, "stored", l.weight, dominant_class(l.dist));
    for (const VirtualLeaf& v : t.virtual_leaves)
        row(v.key, "virtual", v.weight, kUnknownClass);
    return out;
}

inline std::string export_graph_csv(const ColoredGraph& g)
{
    std::string out = "u,v,x0,y0,x1,y1,length,color\n";
    for (const GraphEdge& e : g.edges()) {
        const Vec2 a = g.vertices()[e.u].pos;
        const Vec2 b = g.vertices()[e.v].pos;
        out += fmt::format("{},{},{},{},{},{},{},{}\n", e.u, e.v, num(a[0]), num(a[1]), num(b[0]), num(b[1]),
                           num(e.length), e.color);
    }
    return out;
}

inline std::string format_plan(const ColoredGraph& g, const std::optional<PlanResult>& plan)
{
    if (!plan)
        return "status: no_path\n";
    std::string out = "status: ok\n";
    out += fmt::format("undesired_edges: {}\nlength: {}\nvertices: {}\n", plan->cost.undesired_edges,
                       num(plan->cost.length), plan->vertices.size());
    out += "path:\n";
    for (std::size_t v : plan->vertices) {
        const GraphVertex& gv = g.vertices()[v];
        out += fmt::format("  {},{},{},{}\n", v, num(gv.pos[0]), num(gv.pos[1]), gv.color);
    }
    return out;
}

} // namespace semoctree
