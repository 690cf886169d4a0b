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
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "semoctree/octree_key.hpp"
#include "semoctree/semantics.hpp"
#include "semoctree/weights.hpp"

namespace semoctree {

enum class NodeKind : std::uint8_t {
    interior,
    /// Finest-resolution cell holding a truncated distribution.
    leaf,
    /// Stand-in for a full set of identical leaves removed by adhoc_prune.
    summary,
};

struct OctreeNode {
    NodeKind kind = NodeKind::interior;
    /// Bit i set when child i is stored.
    std::uint8_t child_mask = 0;
    /// p(n); unnormalised.
    double weight = 0.0;
    /// Leaf and summary records only.
    TruncatedDistribution semantics;
    /// Interior: cached aggregate p(s|n). Empty for leaves and summaries.
    std::vector<double> dist;
    /// Cached G_Pi(n); always 0 for leaves and summaries.
    double g_local = 0.0;

    bool is_leaf_like() const { return kind != NodeKind::interior; }
};

class SemanticOctree;

namespace detail {
struct OctreeAccess;
}

/**
 * Sparse semantic tree over a WorldConfig volume. Only observed cells and
 * their ancestors are stored; missing children are completed on the fly by
 * children_with_virtual().
 *
 * The tree keeps p(n) consistent on every mutation. The aggregated class
 * distributions and G-values are caches owned by the compression routines:
 * each mutation records the touched key as pending until update_pass (or a
 * full recompute_caches) has refreshed its root path.
 */
class SemanticOctree {
public:
    SemanticOctree(WorldConfig world, int num_classes) : world_(world), num_classes_(num_classes)
    {
        world_.validate();
        detail::require(num_classes >= 4, ErrorCategory::config, "SemanticOctree: requires K >= 4 classes");
        OctreeNode root;
        root.dist = uniform_distribution(num_classes).probs;
        nodes_.emplace(NodeKey{}, std::move(root));
    }

    const WorldConfig& world() const { return world_; }
    int num_classes() const { return num_classes_; }
    int branching() const { return world_.branching; }
    static constexpr NodeKey root() { return {}; }

    std::size_t node_count() const { return nodes_.size(); }
    bool contains(const NodeKey& k) const { return nodes_.contains(k); }

    const OctreeNode* find(const NodeKey& k) const
    {
        auto it = nodes_.find(k);
        return it == nodes_.end() ? nullptr : &it->second;
    }

    const OctreeNode& at(const NodeKey& k) const
    {
        const OctreeNode* n = find(k);
        if (!n)
            detail::fail(ErrorCategory::invalid_argument, "unknown node key " + to_string(k));
        return *n;
    }

    /// All stored keys in (depth, code) order.
    std::vector<NodeKey> sorted_keys() const
    {
        std::vector<NodeKey> keys;
        keys.reserve(nodes_.size());
        for (const auto& [k, n] : nodes_)
            keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        return keys;
    }

    std::vector<NodeKey> stored_children(const NodeKey& k) const
    {
        std::vector<NodeKey> out;
        const OctreeNode& n = at(k);
        for (unsigned i = 0; i < static_cast<unsigned>(branching()); ++i)
            if (n.child_mask & (1u << i))
                out.push_back(world_.child(k, i));
        return out;
    }

    bool has_summaries() const
    {
        return std::ranges::any_of(nodes_, [](const auto& kv) { return kv.second.kind == NodeKind::summary; });
    }

    /// Dense distribution of a leaf-like record.
    FullDistribution leaf_distribution(const NodeKey& k) const
    {
        const OctreeNode& n = at(k);
        detail::require(n.is_leaf_like(), ErrorCategory::invalid_argument, "leaf_distribution: node is interior");
        return expand_truncated(n.semantics, num_classes_);
    }

    /**
     * Writes `d` into the depth-D leaf `leaf` (creating it and its ancestors
     * if needed) with weight p(x) = `weight`. Summaries on the way down are
     * re-expanded first.
     */
    void set_leaf(const NodeKey& leaf, const TruncatedDistribution& d, double weight = 1.0)
    {
        detail::require(leaf.depth == world_.max_depth, ErrorCategory::invalid_argument,
                        "set_leaf: key is not at the finest depth");
        detail::require(std::isfinite(weight) && weight >= 0.0, ErrorCategory::invalid_argument,
                        "set_leaf: weight must be non-negative");
        d.validate(num_classes_);
        OctreeNode& n = ensure_leaf(leaf);
        n.semantics = d;
        n.weight = weight;
        n.g_local = 0.0;
        pending_.insert(leaf);
        refresh_weights_above(leaf);
    }

    void set_leaf_weight(const NodeKey& leaf, double weight)
    {
        auto it = nodes_.find(leaf);
        detail::require(it != nodes_.end() && it->second.is_leaf_like(), ErrorCategory::invalid_argument,
                        "set_leaf_weight: not a stored leaf");
        detail::require(std::isfinite(weight) && weight >= 0.0, ErrorCategory::invalid_argument,
                        "set_leaf_weight: weight must be non-negative");
        it->second.weight = weight;
        pending_.insert(leaf);
        refresh_weights_above(leaf);
    }

    /// Replaces every summary record by its identical children.
    void expand_summaries()
    {
        std::vector<NodeKey> summaries;
        for (const auto& [k, n] : nodes_)
            if (n.kind == NodeKind::summary)
                summaries.push_back(k);
        std::sort(summaries.begin(), summaries.end());
        for (const NodeKey& k : summaries)
            expand_summary(k);
    }

    /// Keys whose root paths still need a cache refresh.
    const std::unordered_set<NodeKey, NodeKeyHash>& pending() const { return pending_; }

    /// Weights the cached G-values were computed for, if any.
    const std::optional<CompressionWeights>& cache_weights() const { return cache_weights_; }
    /// False after loading from disk, until recompute_caches runs.
    bool caches_complete() const { return caches_complete_; }

    /// p(n) recomputed from the stored children with virtual completion.
    double completed_weight(const NodeKey& k) const
    {
        const OctreeNode& n = at(k);
        if (n.is_leaf_like())
            return n.weight;
        double stored = 0.0;
        int count = 0;
        for (unsigned i = 0; i < static_cast<unsigned>(branching()); ++i)
            if (n.child_mask & (1u << i)) {
                stored += at(world_.child(k, i)).weight;
                ++count;
            }
        if (count == 0)
            return 0.0;
        const double virtual_weight = stored / count;
        double total = 0.0;
        for (unsigned i = 0; i < static_cast<unsigned>(branching()); ++i)
            total += (n.child_mask & (1u << i)) ? at(world_.child(k, i)).weight : virtual_weight;
        return total;
    }

private:
    friend struct detail::OctreeAccess;

    OctreeNode& ensure_leaf(const NodeKey& leaf)
    {
        NodeKey cur = root();
        for (int depth = 0; depth < leaf.depth; ++depth) {
            OctreeNode& n = nodes_.at(cur);
            if (n.kind == NodeKind::summary)
                expand_summary(cur);
            const NodeKey next = NodeKey{static_cast<std::uint8_t>(depth + 1),
                                         leaf.code >> ((leaf.depth - depth - 1) * world_.axes())};
            OctreeNode& parent = nodes_.at(cur);
            const unsigned idx = world_.child_index(next);
            if (!(parent.child_mask & (1u << idx))) {
                parent.child_mask = static_cast<std::uint8_t>(parent.child_mask | (1u << idx));
                OctreeNode fresh;
                if (next.depth == leaf.depth) {
                    fresh.kind = NodeKind::leaf;
                    fresh.semantics = truncate_full(uniform_distribution(num_classes_));
                } else {
                    fresh.dist = uniform_distribution(num_classes_).probs;
                }
                nodes_.emplace(next, std::move(fresh));
            }
            cur = next;
        }
        return nodes_.at(cur);
    }

    void expand_summary(const NodeKey& k)
    {
        OctreeNode& s = nodes_.at(k);
        const TruncatedDistribution d = s.semantics;
        const double child_weight = s.weight / branching();
        s.kind = NodeKind::interior;
        s.semantics = TruncatedDistribution{};
        s.dist = expand_truncated(d, num_classes_).probs;
        s.g_local = 0.0;
        s.child_mask = static_cast<std::uint8_t>((1u << branching()) - 1);
        pending_.erase(k);
        for (unsigned i = 0; i < static_cast<unsigned>(branching()); ++i) {
            OctreeNode leaf;
            leaf.kind = NodeKind::leaf;
            leaf.semantics = d;
            leaf.weight = child_weight;
            const NodeKey ck = world_.child(k, i);
            nodes_.emplace(ck, std::move(leaf));
            pending_.insert(ck);
        }
    }

    void refresh_weights_above(NodeKey k)
    {
        while (k.depth > 0) {
            k = world_.parent(k);
            nodes_.at(k).weight = completed_weight(k);
        }
    }

    WorldConfig world_;
    int num_classes_;
    std::unordered_map<NodeKey, OctreeNode, NodeKeyHash> nodes_;
    std::unordered_set<NodeKey, NodeKeyHash> pending_;
    std::optional<CompressionWeights> cache_weights_;
    bool caches_complete_ = true;
};

namespace detail {

/// Back door for the cache-maintenance and (de)serialisation routines.
struct OctreeAccess {
    static OctreeNode& node(SemanticOctree& t, const NodeKey& k) { return t.nodes_.at(k); }
    static auto& nodes(SemanticOctree& t) { return t.nodes_; }
    static auto& pending(SemanticOctree& t) { return t.pending_; }
    static auto& cache_weights(SemanticOctree& t) { return t.cache_weights_; }
    static bool& caches_complete(SemanticOctree& t) { return t.caches_complete_; }
    static void refresh_weights_above(SemanticOctree& t, const NodeKey& k) { t.refresh_weights_above(k); }
};

} // namespace detail

namespace detail {

/// Distribution the cell `leaf` currently implies: its own record, the record
/// of a summary that absorbed it, or the maximum-entropy prior.
inline FullDistribution current_cell_distribution(const SemanticOctree& tree, const NodeKey& leaf)
{
    if (const OctreeNode* n = tree.find(leaf); n && n->kind == NodeKind::leaf)
        return expand_truncated(n->semantics, tree.num_classes());
    NodeKey anc = leaf;
    while (anc.depth > 0) {
        anc = tree.world().parent(anc);
        if (const OctreeNode* a = tree.find(anc)) {
            if (a->kind == NodeKind::summary)
                return expand_truncated(a->semantics, tree.num_classes());
            break;
        }
    }
    return uniform_distribution(tree.num_classes());
}

} // namespace detail

/**
 * Inserts one labelled point: locates the finest cell containing `point`,
 * fuses the observation into its distribution (maximum-entropy prior for a
 * new cell) and gives it weight 1. Returns the leaf key.
 */
inline NodeKey create_or_update_node(SemanticOctree& tree, const Vec3& point, ClassId obs_class, double confidence)
{
    const NodeKey key = tree.world().locate(point, tree.world().max_depth);
    const FullDistribution post =
        fuse_observation(detail::current_cell_distribution(tree, key), obs_class, confidence);
    tree.set_leaf(key, truncate_full(post), 1.0);
    return key;
}

/// A child slot of an interior node: a stored child, or a virtual one filling a gap.
struct ChildView {
    NodeKey key;
    bool is_virtual = false;
    double weight = 0.0;
    /// p(s|child) over class ids 0..K.
    std::vector<double> dist;
    double g_local = 0.0;
};

/**
 * All `branching` child slots of interior node `n`. Stored children are
 * reported as stored (interior children with their cached aggregate);
 * missing ones are completed with the uniform distribution over 0..K and the
 * mean weight of the stored siblings. Nothing is written to the tree.
 */
inline std::vector<ChildView> children_with_virtual(const SemanticOctree& tree, const NodeKey& n)
{
    const OctreeNode& node = tree.at(n);
    detail::require(!node.is_leaf_like(), ErrorCategory::invalid_argument,
                    "children_with_virtual: node is a leaf");
    const WorldConfig& world = tree.world();
    const unsigned b = static_cast<unsigned>(tree.branching());

    std::vector<ChildView> out(b);
    double stored = 0.0;
    int count = 0;
    for (unsigned i = 0; i < b; ++i) {
        ChildView& c = out[i];
        c.key = world.child(n, i);
        if (!(node.child_mask & (1u << i))) {
            c.is_virtual = true;
            continue;
        }
        const OctreeNode& child = tree.at(c.key);
        c.weight = child.weight;
        c.g_local = child.g_local;
        c.dist = child.is_leaf_like() ? expand_truncated(child.semantics, tree.num_classes()).probs : child.dist;
        stored += child.weight;
        ++count;
    }
    const double virtual_weight = count > 0 ? stored / count : 0.0;
    for (ChildView& c : out)
        if (c.is_virtual) {
            c.weight = virtual_weight;
            c.dist = uniform_distribution(tree.num_classes()).probs;
        }
    return out;
}

/**
 * Collapses `n` into a summary record when all of its children are stored
 * finest-level leaves with identical distributions and weights (1e-12).
 * Returns false, leaving the tree untouched, otherwise.
 */
inline bool adhoc_prune(SemanticOctree& tree, const NodeKey& n)
{
    const OctreeNode& node = tree.at(n);
    const unsigned b = static_cast<unsigned>(tree.branching());
    if (node.kind != NodeKind::interior || node.child_mask != (1u << b) - 1)
        return false;

    const WorldConfig& world = tree.world();
    const OctreeNode& first = tree.at(world.child(n, 0));
    double total = 0.0;
    for (unsigned i = 0; i < b; ++i) {
        const OctreeNode& c = tree.at(world.child(n, i));
        if (c.kind != NodeKind::leaf || !c.semantics.nearly_equal(first.semantics, 1e-12) ||
            std::abs(c.weight - first.weight) > 1e-12)
            return false;
        total += c.weight;
    }

    const TruncatedDistribution d = first.semantics;
    auto& nodes = detail::OctreeAccess::nodes(tree);
    auto& pending = detail::OctreeAccess::pending(tree);
    for (unsigned i = 0; i < b; ++i) {
        nodes.erase(world.child(n, i));
        pending.erase(world.child(n, i));
    }
    OctreeNode& s = nodes.at(n);
    s.kind = NodeKind::summary;
    s.child_mask = 0;
    s.semantics = d;
    s.weight = total;
    s.dist.clear();
    s.g_local = 0.0;
    pending.insert(n);
    detail::OctreeAccess::refresh_weights_above(tree, n);
    return true;
}

} // namespace semoctree
