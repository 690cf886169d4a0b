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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "semoctree/colored_graph.hpp"
#include "semoctree/compression.hpp"
#include "semoctree/semantic_octree.hpp"

namespace semoctree {

/// Radical inverse of `index` in `base`; index 1 is the first Halton point.
inline double radical_inverse(std::uint64_t index, unsigned base)
{
    detail::require(base >= 2, ErrorCategory::invalid_argument, "radical_inverse: base must be at least 2");
    double f = 1.0;
    double r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

/// First `n` points of the 2-D Halton sequence (bases 2 and 3) in the unit square.
inline std::vector<Vec2> halton_points(std::size_t n)
{
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (std::size_t i = 1; i <= n; ++i)
        pts.push_back({radical_inverse(i, 2), radical_inverse(i, 3)});
    return pts;
}

struct GraphOptions {
    /// Height of the planning slice; defaults to the middle of the lowest finest-level cell layer.
    std::optional<double> slice_z;
};

inline double planning_slice(const WorldConfig& world, const GraphOptions& opts)
{
    return opts.slice_z.value_or(world.origin[2] + world.cell_size(world.max_depth) / 2);
}

/// Ordering used for edge colours: higher is more undesired.
inline int undesirability(ClassId c, const PlanQuery& q)
{
    if (q.undesired.contains(c))
        return 4;
    if (c == kUnknownClass)
        return q.unknown_is_undesired ? 4 : 3;
    if (q.relevant.contains(c))
        return 1;
    if (c == kFreeClass)
        return 0;
    return 2;
}

/// Dominant class of the compressed-tree cell holding `p`; unknown for virtual leaves and outside the world.
inline ClassId classify_point(const CompressedTree& t, const Vec3& p)
{
    if (!t.world.contains(p))
        return kUnknownClass;
    for (int d = 0; d <= t.world.max_depth; ++d) {
        const NodeKey k = t.world.locate(p, d);
        if (const CompressedLeaf* leaf = t.find_leaf(k))
            return dominant_class(leaf->dist);
        if (!t.keeps(k))
            return kUnknownClass;
    }
    return kUnknownClass;
}

/// Dominant class of the finest stored node holding `p`; unknown where nothing was observed.
inline ClassId classify_point(const SemanticOctree& tree, const Vec3& p)
{
    const WorldConfig& world = tree.world();
    if (!world.contains(p))
        return kUnknownClass;
    NodeKey k = SemanticOctree::root();
    for (;;) {
        const OctreeNode& n = tree.at(k);
        if (n.is_leaf_like())
            return dominant_class(tree.leaf_distribution(k).probs);
        const NodeKey child = world.locate(p, k.depth + 1);
        if (!tree.contains(child))
            return kUnknownClass;
        k = child;
    }
}

namespace detail {

template <class Classifier>
ClassId segment_color(const Vec2& a, const Vec2& b, double z, double step, const PlanQuery& q,
                      const Classifier& classify)
{
    const double len = distance(a, b);
    const auto samples = static_cast<std::size_t>(std::ceil(len / step));
    ClassId worst = kFreeClass;
    bool first = true;
    for (std::size_t j = 0; j <= samples; ++j) {
        const double s = samples == 0 ? 0.0 : static_cast<double>(j) / static_cast<double>(samples);
        const ClassId c = classify(Vec3{a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), z});
        if (first || undesirability(c, q) > undesirability(worst, q) ||
            (undesirability(c, q) == undesirability(worst, q) && c < worst)) {
            worst = c;
            first = false;
        }
    }
    return worst;
}

/// Connects every vertex to its k nearest distinct neighbours; each undirected pair is stored once.
template <class Classifier>
void connect_knn(ColoredGraph& g, std::size_t k, const WorldConfig& world, double z, const PlanQuery& q,
                 const Classifier& classify)
{
    require(k >= 1, ErrorCategory::invalid_argument, "k_neighbors must be positive");
    const std::size_t n = g.vertex_count();
    const double step = world.cell_size(world.max_depth + 1);
    std::set<std::pair<std::size_t, std::size_t>> linked;
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < n; ++i) {
        order.clear();
        for (std::size_t j = 0; j < n; ++j) {
            const double d = distance(g.vertices()[i].pos, g.vertices()[j].pos);
            if (j != i && d > 0.0)
                order.emplace_back(d, j);
        }
        const std::size_t take = std::min(k, order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end());
        for (std::size_t m = 0; m < take; ++m) {
            const std::size_t j = order[m].second;
            const auto pair = std::minmax(i, j);
            if (!linked.insert(pair).second)
                continue;
            const ClassId color =
                segment_color(g.vertices()[pair.first].pos, g.vertices()[pair.second].pos, z, step, q, classify);
            g.add_edge(pair.first, pair.second, color);
        }
    }
}

} // namespace detail

/**
 * Roadmap over the compressed leaves cut by the planning slice whose dominant
 * class is free space or relevant, one vertex at each leaf's horizontal centre.
 */
inline ColoredGraph graph_from_tree(const CompressedTree& t, const PlanQuery& query, std::size_t k_neighbors,
                                    const GraphOptions& opts = {})
{
    query.validate();
    detail::require(!t.leaves.empty() || !t.virtual_leaves.empty(), ErrorCategory::invalid_argument,
                    "graph_from_tree: compressed tree is empty");
    const double z = planning_slice(t.world, opts);
    ColoredGraph g;
    for (const CompressedLeaf& leaf : t.leaves) {
        const Box b = t.world.bounds(leaf.key);
        if (!(z >= b.lo[2] && z < b.hi[2]))
            continue;
        const ClassId c = dominant_class(leaf.dist);
        if (c != kFreeClass && !query.relevant.contains(c))
            continue;
        const Vec3 centre = b.center();
        g.add_vertex({centre[0], centre[1]}, c);
    }
    if (g.vertex_count() == 0)
        detail::fail(ErrorCategory::empty_graph, "graph_from_tree: no free or relevant leaves on the planning slice");
    detail::connect_knn(g, k_neighbors, t.world, z, query, [&](const Vec3& p) { return classify_point(t, p); });
    return g;
}

/// Semantics-agnostic baseline roadmap on Halton points over the world footprint.
inline ColoredGraph halton_graph(const WorldConfig& world, const SemanticOctree& tree, std::size_t n_vertices,
                                 std::size_t k_neighbors, const PlanQuery& query = {}, const GraphOptions& opts = {})
{
    world.validate();
    query.validate();
    detail::require(world == tree.world(), ErrorCategory::config, "halton_graph: world does not match the tree");
    detail::require(n_vertices >= 2, ErrorCategory::invalid_argument, "halton_graph: at least 2 vertices required");
    const double z = planning_slice(world, opts);
    ColoredGraph g;
    for (const Vec2& h : halton_points(n_vertices)) {
        const Vec2 p{world.origin[0] + h[0] * world.edge_length, world.origin[1] + h[1] * world.edge_length};
        g.add_vertex(p, classify_point(tree, Vec3{p[0], p[1], z}));
    }
    detail::connect_knn(g, k_neighbors, world, z, query, [&](const Vec3& p) { return classify_point(tree, p); });
    return g;
}

} // namespace semoctree
