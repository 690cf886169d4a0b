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
#include <cstdint>
#include <functional>
#include <string>

#include "semoctree/error.hpp"

namespace semoctree {

using Vec3 = std::array<double, 3>;

/// Axis-aligned box, half-open on every axis.
struct Box {
    Vec3 lo{};
    Vec3 hi{};

    Vec3 center() const { return {(lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2, (lo[2] + hi[2]) / 2}; }
    bool contains(const Vec3& p) const
    {
        for (int a = 0; a < 3; ++a)
            if (!(p[a] >= lo[a] && p[a] < hi[a]))
                return false;
        return true;
    }
};

/**
 * Address of a node: its depth plus the concatenated child indices on the
 * path from the root (one index of log2(branching) bits per level, x in the
 * lowest bit, then y, then z). The root is {0, 0}.
 */
struct NodeKey {
    std::uint8_t depth = 0;
    std::uint64_t code = 0;

    friend auto operator<=>(const NodeKey&, const NodeKey&) = default;
    friend bool operator==(const NodeKey&, const NodeKey&) = default;
};

struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const noexcept
    {
        std::uint64_t h = k.code * 0x9E3779B97F4A7C15ull;
        h ^= static_cast<std::uint64_t>(k.depth) + 0x7F4A7C15ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

inline std::string to_string(const NodeKey& k)
{
    return std::to_string(k.depth) + ":" + std::to_string(k.code);
}

/**
 * Cubic world volume split recursively down to `max_depth`. Branching 8 is
 * the octree; 4 splits only x/y and 2 only x, which keeps exhaustive checks
 * tractable in tests.
 */
struct WorldConfig {
    static constexpr int kMaxDepth = 21;

    Vec3 origin{0.0, 0.0, 0.0};
    double edge_length = 1.0;
    int max_depth = 1;
    int branching = 8;

    void validate() const
    {
        for (double o : origin)
            detail::require(std::isfinite(o), ErrorCategory::config, "world origin must be finite");
        detail::require(std::isfinite(edge_length) && edge_length > 0.0, ErrorCategory::config,
                        "world edge length must be positive");
        detail::require(max_depth >= 1 && max_depth <= kMaxDepth, ErrorCategory::config,
                        "world max depth must lie in [1, 21]");
        detail::require(branching == 2 || branching == 4 || branching == 8, ErrorCategory::config,
                        "branching must be 2, 4 or 8");
    }

    /// Number of split axes (1, 2 or 3).
    int axes() const { return branching == 8 ? 3 : (branching == 4 ? 2 : 1); }

    double cell_size(int depth) const { return std::ldexp(edge_length, -depth); }

    NodeKey parent(const NodeKey& k) const
    {
        detail::require(k.depth > 0, ErrorCategory::invalid_argument, "root has no parent");
        return {static_cast<std::uint8_t>(k.depth - 1), k.code >> axes()};
    }

    NodeKey child(const NodeKey& k, unsigned index) const
    {
        return {static_cast<std::uint8_t>(k.depth + 1), (k.code << axes()) | index};
    }

    /// Position of `k` among its siblings.
    unsigned child_index(const NodeKey& k) const
    {
        return static_cast<unsigned>(k.code & ((1ull << axes()) - 1));
    }

    /// Is `anc` an ancestor of (or equal to) `k`?
    bool is_ancestor_or_self(const NodeKey& anc, const NodeKey& k) const
    {
        if (anc.depth > k.depth)
            return false;
        return (k.code >> ((k.depth - anc.depth) * axes())) == anc.code;
    }

    /// Integer cell coordinates of `k` at its own depth.
    std::array<std::uint64_t, 3> coords(const NodeKey& k) const
    {
        std::array<std::uint64_t, 3> c{0, 0, 0};
        const int n = axes();
        for (int level = 0; level < k.depth; ++level) {
            const std::uint64_t idx = (k.code >> (level * n)) & ((1ull << n) - 1);
            for (int a = 0; a < n; ++a)
                c[a] |= ((idx >> a) & 1ull) << level;
        }
        return c;
    }

    Box bounds(const NodeKey& k) const
    {
        Box b;
        const auto c = coords(k);
        const double size = cell_size(k.depth);
        for (int a = 0; a < 3; ++a) {
            if (a < axes()) {
                b.lo[a] = origin[a] + static_cast<double>(c[a]) * size;
                b.hi[a] = b.lo[a] + size;
            } else {
                b.lo[a] = origin[a];
                b.hi[a] = origin[a] + edge_length;
            }
        }
        return b;
    }

    bool contains(const Vec3& p) const
    {
        for (int a = 0; a < 3; ++a)
            if (!(p[a] >= origin[a] && p[a] < origin[a] + edge_length))
                return false;
        return true;
    }

    /// Key of the depth-`depth` cell containing `p`; cells are [lo, hi) per axis.
    NodeKey locate(const Vec3& p, int depth) const
    {
        if (!contains(p))
            detail::fail(ErrorCategory::out_of_bounds, "point lies outside the world volume");
        const int n = axes();
        const std::uint64_t cells = 1ull << depth;
        std::array<std::uint64_t, 3> c{0, 0, 0};
        for (int a = 0; a < n; ++a) {
            const double f = std::floor((p[a] - origin[a]) / cell_size(depth));
            c[a] = std::min(static_cast<std::uint64_t>(std::max(f, 0.0)), cells - 1);
        }
        NodeKey k{static_cast<std::uint8_t>(depth), 0};
        for (int level = depth - 1; level >= 0; --level) {
            std::uint64_t idx = 0;
            for (int a = 0; a < n; ++a)
                idx |= ((c[a] >> level) & 1ull) << a;
            k.code = (k.code << n) | idx;
        }
        return k;
    }

    friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

} // namespace semoctree
