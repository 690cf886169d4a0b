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
#include <array>
#include <cmath>
#include <compare>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <vector>

#include "semoctree/error.hpp"
#include "semoctree/semantics.hpp"

namespace semoctree {

using Vec2 = std::array<double, 2>;

inline double distance(const Vec2& a, const Vec2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

struct GraphVertex {
    Vec2 pos{};
    ClassId color = kFreeClass;
};

struct GraphEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    double length = 0.0;
    ClassId color = kFreeClass;
};

/// Undirected graph whose vertices and edges carry a semantic class ("colour").
class ColoredGraph {
public:
    struct Adjacent {
        std::size_t vertex;
        std::size_t edge;
    };

    std::size_t add_vertex(const Vec2& pos, ClassId color)
    {
        vertices_.push_back({pos, color});
        adjacency_.emplace_back();
        return vertices_.size() - 1;
    }

    /// Adds edge {u, v}; the length defaults to the Euclidean distance.
    std::size_t add_edge(std::size_t u, std::size_t v, ClassId color, std::optional<double> length = std::nullopt)
    {
        detail::require(u < vertices_.size() && v < vertices_.size() && u != v, ErrorCategory::invalid_argument,
                        "add_edge: invalid endpoints");
        const double straight = distance(vertices_[u].pos, vertices_[v].pos);
        const double len = length.value_or(straight);
        detail::require(std::isfinite(len) && len > 0.0, ErrorCategory::invalid_argument,
                        "add_edge: length must be positive");
        if (len < straight * (1.0 - 1e-12))
            euclidean_bound_ = false;
        edges_.push_back({u, v, len, color});
        adjacency_[u].push_back({v, edges_.size() - 1});
        adjacency_[v].push_back({u, edges_.size() - 1});
        return edges_.size() - 1;
    }

    std::span<const GraphVertex> vertices() const { return vertices_; }
    std::span<const GraphEdge> edges() const { return edges_; }
    std::span<const Adjacent> neighbors(std::size_t u) const { return adjacency_.at(u); }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    /// True while no edge is shorter than the straight line between its endpoints.
    bool euclidean_bound() const { return euclidean_bound_; }

    /// Index of the vertex closest to `p` (lowest index on ties).
    std::size_t nearest_vertex(const Vec2& p) const
    {
        detail::require(!vertices_.empty(), ErrorCategory::empty_graph, "nearest_vertex: graph is empty");
        std::size_t best = 0;
        for (std::size_t i = 1; i < vertices_.size(); ++i)
            if (distance(vertices_[i].pos, p) < distance(vertices_[best].pos, p))
                best = i;
        return best;
    }

private:
    std::vector<GraphVertex> vertices_;
    std::vector<GraphEdge> edges_;
    std::vector<std::vector<Adjacent>> adjacency_;
    bool euclidean_bound_ = true;
};

struct PlanQuery {
    std::size_t start = 0;
    std::size_t goal = 0;
    std::set<ClassId> undesired;
    /// Preferred classes; used when building graphs.
    std::set<ClassId> relevant;
    /// Unobserved space counts as undesired.
    bool unknown_is_undesired = true;

    void validate() const
    {
        for (ClassId c : undesired)
            detail::require(!relevant.contains(c), ErrorCategory::invalid_argument,
                            "PlanQuery: a class cannot be both relevant and undesired");
    }

    bool is_undesired(ClassId color) const
    {
        return undesired.contains(color) || (unknown_is_undesired && color == kUnknownClass);
    }
};

/// (number of undesired edges, total length), compared lexicographically.
struct LexCost {
    int undesired_edges = 0;
    double length = 0.0;

    friend auto operator<=>(const LexCost&, const LexCost&) = default;
    friend bool operator==(const LexCost&, const LexCost&) = default;

    LexCost operator+(const LexCost& o) const { return {undesired_edges + o.undesired_edges, length + o.length}; }
};

struct PlanResult {
    /// Visited vertices from start to goal; just {start} when start == goal.
    std::vector<std::size_t> vertices;
    std::vector<std::size_t> edges;
    LexCost cost;
};

inline LexCost path_cost(const ColoredGraph& g, std::span<const std::size_t> edges, const PlanQuery& q)
{
    LexCost c;
    for (std::size_t e : edges) {
        const GraphEdge& edge = g.edges()[e];
        c.undesired_edges += q.is_undesired(edge.color) ? 1 : 0;
        c.length += edge.length;
    }
    return c;
}

/**
 * Class-Ordered A*: the path with the fewest undesired-class edges, and the
 * shortest among those. The heuristic (0, straight-line distance to goal)
 * is dropped when some edge is shorter than its straight line.
 */
inline std::optional<PlanResult> class_ordered_astar(const ColoredGraph& g, const PlanQuery& q)
{
    q.validate();
    const std::size_t n = g.vertex_count();
    detail::require(q.start < n && q.goal < n, ErrorCategory::invalid_argument,
                    "class_ordered_astar: start or goal is not a vertex");

    const Vec2 goal_pos = g.vertices()[q.goal].pos;
    const bool informed = g.euclidean_bound();
    auto heuristic = [&](std::size_t v) {
        return LexCost{0, informed ? distance(g.vertices()[v].pos, goal_pos) : 0.0};
    };

    constexpr auto kNone = std::numeric_limits<std::size_t>::max();
    const LexCost kInf{std::numeric_limits<int>::max(), std::numeric_limits<double>::infinity()};
    std::vector<LexCost> best(n, kInf);
    std::vector<std::size_t> via_edge(n, kNone);
    std::vector<bool> closed(n, false);

    struct Entry {
        LexCost f;
        LexCost g;
        std::size_t v;
    };
    auto later = [](const Entry& a, const Entry& b) {
        if (a.f != b.f)
            return a.f > b.f;
        return a.v > b.v;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(later)> open(later);

    best[q.start] = {};
    open.push({heuristic(q.start), {}, q.start});
    while (!open.empty()) {
        const Entry top = open.top();
        open.pop();
        if (closed[top.v] || top.g != best[top.v])
            continue;
        if (top.v == q.goal)
            break;
        closed[top.v] = true;
        for (const auto& adj : g.neighbors(top.v)) {
            if (closed[adj.vertex])
                continue;
            const GraphEdge& e = g.edges()[adj.edge];
            const LexCost next = top.g + LexCost{q.is_undesired(e.color) ? 1 : 0, e.length};
            if (next < best[adj.vertex]) {
                best[adj.vertex] = next;
                via_edge[adj.vertex] = adj.edge;
                open.push({next + heuristic(adj.vertex), next, adj.vertex});
            }
        }
    }
    if (best[q.goal] == kInf)
        return std::nullopt;

    PlanResult r;
    r.cost = best[q.goal];
    std::size_t v = q.goal;
    r.vertices.push_back(v);
    while (v != q.start) {
        const GraphEdge& e = g.edges()[via_edge[v]];
        r.edges.push_back(via_edge[v]);
        v = (e.u == v) ? e.v : e.u;
        r.vertices.push_back(v);
    }
    std::reverse(r.vertices.begin(), r.vertices.end());
    std::reverse(r.edges.begin(), r.edges.end());
    return r;
}

} // namespace semoctree
