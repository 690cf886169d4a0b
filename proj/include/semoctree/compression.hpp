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

// Information-theoretic pruning of semantic trees.
//
// A node n with children C(n) and relative child weights Pi is scored by
//
//   G_Pi(n) = max{ sum_i beta_i JS_Pi(p(y_i|C(n))) - sum_j gamma_j JS_Pi(p(z_j|C(n)))
//                  - alpha H(Pi) + sum_c Pi_c G_Pi(c), 0 }
//
// where y_i / z_j are the binary indicators of relevant / irrelevant classes.
// Leaves, summaries, virtual children and zero-weight nodes score 0. The
// compressed tree expands exactly the nodes with G_Pi > kExpandThreshold.
// With absolute weights the same recursion gives G(n) = p(n) G_Pi(n).

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <vector>

#include "semoctree/info_theory.hpp"
#include "semoctree/semantic_octree.hpp"
#include "semoctree/weights.hpp"

namespace semoctree {

/// G-values at or below this are treated as zero: the node is not expanded.
inline constexpr double kExpandThreshold = 1e-12;

namespace detail {

struct NodeAggregate {
    double weight = 0.0;
    std::vector<double> dist;
    double g_local = 0.0;
};

inline std::vector<double> child_fractions(std::span<const ChildView> children, double total)
{
    std::vector<double> pi(children.size(), 0.0);
    if (total > 0.0)
        for (std::size_t i = 0; i < children.size(); ++i)
            pi[i] = children[i].weight / total;
    return pi;
}

/// Weight, aggregate distribution and G_Pi of a node from its child slots.
inline NodeAggregate aggregate_children(std::span<const ChildView> children, const CompressionWeights& w)
{
    NodeAggregate out;
    for (const ChildView& c : children)
        out.weight += c.weight;
    const std::size_t len = children.front().dist.size();
    out.dist.assign(len, 0.0);

    if (!(out.weight > 0.0)) {
        // Zero-weight subtree: keep a valid distribution, score nothing.
        for (const ChildView& c : children)
            for (std::size_t k = 0; k < len; ++k)
                out.dist[k] += c.dist[k] / static_cast<double>(children.size());
        return out;
    }

    const std::vector<double> pi = child_fractions(children, out.weight);
    for (std::size_t i = 0; i < children.size(); ++i)
        for (std::size_t k = 0; k < len; ++k)
            out.dist[k] += pi[i] * children[i].dist[k];

    std::vector<double> q(children.size());
    auto class_js = [&](ClassId id) {
        for (std::size_t i = 0; i < children.size(); ++i)
            q[i] = children[i].dist[static_cast<std::size_t>(id)];
        return binary_js(q, pi);
    };

    double score = -w.alpha * entropy(pi);
    for (const auto& [id, beta] : w.beta)
        if (beta != 0.0)
            score += beta * class_js(id);
    for (const auto& [id, gamma] : w.gamma)
        if (gamma != 0.0)
            score -= gamma * class_js(id);
    for (std::size_t i = 0; i < children.size(); ++i)
        score += pi[i] * children[i].g_local;
    out.g_local = std::max(score, 0.0);
    return out;
}

/// Refreshes p(n), p(s|n) and G_Pi(n) of interior node `k` from its children.
inline void refresh_node(SemanticOctree& tree, const NodeKey& k, const CompressionWeights& w)
{
    // Children that are leaves contribute their expanded truncated records,
    // interior children their cached aggregates; children_with_virtual
    // distinguishes the two.
    const std::vector<ChildView> children = children_with_virtual(tree, k);
    NodeAggregate agg = aggregate_children(children, w);
    OctreeNode& node = OctreeAccess::node(tree, k);
    node.weight = agg.weight;
    node.dist = std::move(agg.dist);
    node.g_local = agg.g_local;
}

inline void bind_cache_weights(SemanticOctree& tree, const CompressionWeights& w)
{
    w.validate(tree.num_classes());
    auto& bound = OctreeAccess::cache_weights(tree);
    if (!OctreeAccess::caches_complete(tree))
        fail(ErrorCategory::stale_cache, "tree caches are incomplete; run recompute_caches first");
    if (bound && *bound != w)
        fail(ErrorCategory::stale_cache, "tree caches were computed for different weights; run recompute_caches");
    bound = w;
}

inline void require_fresh_caches(const SemanticOctree& tree, const CompressionWeights& w)
{
    if (!tree.caches_complete())
        fail(ErrorCategory::stale_cache, "tree caches are incomplete; run recompute_caches first");
    if (!tree.pending().empty())
        fail(ErrorCategory::stale_cache, "tree has updates that were not followed by update_pass");
    if (tree.node_count() > 1 && tree.cache_weights() != w)
        fail(ErrorCategory::stale_cache, "tree caches were computed for different weights");
}

} // namespace detail

/**
 * Refreshes the caches on the path from `key` (exclusive) to the root. Used
 * after any single-record mutation, e.g. an insertion or an adhoc_prune.
 */
inline void refresh_ancestors(SemanticOctree& tree, const NodeKey& key, const CompressionWeights& w)
{
    tree.at(key);
    detail::bind_cache_weights(tree, w);
    auto& pending = detail::OctreeAccess::pending(tree);
    NodeKey n = key;
    pending.erase(n);
    while (n.depth > 0) {
        n = tree.world().parent(n);
        detail::refresh_node(tree, n, w);
        pending.erase(n);
    }
}

/**
 * The bottom-up half of the joint build-and-compress loop: after leaf `leaf`
 * was inserted or updated, sets its G_Pi to 0 and refreshes weight,
 * aggregated distribution and G_Pi of every ancestor. Nothing off the
 * leaf-to-root path is touched.
 */
inline void update_pass(SemanticOctree& tree, const NodeKey& leaf, const CompressionWeights& w)
{
    const OctreeNode& node = tree.at(leaf);
    detail::require(node.kind == NodeKind::leaf && leaf.depth == tree.world().max_depth,
                    ErrorCategory::invalid_argument, "update_pass: key is not a finest-depth leaf");
    detail::OctreeAccess::node(tree, leaf).g_local = 0.0;
    refresh_ancestors(tree, leaf, w);
}

/// Recomputes every cache bottom-up (inverse breadth-first) for weights `w`.
inline void recompute_caches(SemanticOctree& tree, const CompressionWeights& w)
{
    w.validate(tree.num_classes());
    std::vector<NodeKey> keys = tree.sorted_keys();
    std::stable_sort(keys.begin(), keys.end(),
                     [](const NodeKey& a, const NodeKey& b) { return a.depth > b.depth; });
    for (const NodeKey& k : keys) {
        OctreeNode& n = detail::OctreeAccess::node(tree, k);
        if (n.is_leaf_like())
            n.g_local = 0.0;
        else if (n.child_mask != 0)
            detail::refresh_node(tree, k, w);
        else {
            n.weight = 0.0;
            n.dist = uniform_distribution(tree.num_classes()).probs;
            n.g_local = 0.0;
        }
    }
    detail::OctreeAccess::pending(tree).clear();
    detail::OctreeAccess::cache_weights(tree) = w;
    detail::OctreeAccess::caches_complete(tree) = true;
}

namespace detail {

/// Bottom-up evaluation of G_Pi straight from the leaf records, ignoring caches.
inline NodeAggregate evaluate_local(const SemanticOctree& tree, const NodeKey& k, const CompressionWeights& w)
{
    const OctreeNode& node = tree.at(k);
    if (node.is_leaf_like())
        return {node.weight, expand_truncated(node.semantics, tree.num_classes()).probs, 0.0};
    if (node.child_mask == 0)
        return {0.0, uniform_distribution(tree.num_classes()).probs, 0.0};

    const unsigned b = static_cast<unsigned>(tree.branching());
    std::vector<ChildView> children(b);
    double stored = 0.0;
    int count = 0;
    for (unsigned i = 0; i < b; ++i) {
        children[i].key = tree.world().child(k, i);
        if (node.child_mask & (1u << i)) {
            NodeAggregate sub = evaluate_local(tree, children[i].key, w);
            children[i].weight = sub.weight;
            children[i].dist = std::move(sub.dist);
            children[i].g_local = sub.g_local;
            stored += sub.weight;
            ++count;
        } else {
            children[i].is_virtual = true;
        }
    }
    for (ChildView& c : children)
        if (c.is_virtual) {
            c.weight = stored / count;
            c.dist = uniform_distribution(tree.num_classes()).probs;
        }
    return aggregate_children(children, w);
}

struct GlobalAggregate {
    double weight = 0.0;
    std::vector<double> dist;
    double g = 0.0;
};

/// The same recursion on absolute weights, built from generic KL-form JS increments.
inline GlobalAggregate evaluate_global(const SemanticOctree& tree, const NodeKey& k, const CompressionWeights& w)
{
    const OctreeNode& node = tree.at(k);
    if (node.is_leaf_like())
        return {node.weight, expand_truncated(node.semantics, tree.num_classes()).probs, 0.0};
    if (node.child_mask == 0)
        return {0.0, uniform_distribution(tree.num_classes()).probs, 0.0};

    const unsigned b = static_cast<unsigned>(tree.branching());
    std::vector<GlobalAggregate> children(b);
    std::vector<bool> present(b, false);
    double stored = 0.0;
    int count = 0;
    for (unsigned i = 0; i < b; ++i)
        if (node.child_mask & (1u << i)) {
            children[i] = evaluate_global(tree, tree.world().child(k, i), w);
            present[i] = true;
            stored += children[i].weight;
            ++count;
        }
    for (unsigned i = 0; i < b; ++i)
        if (!present[i])
            children[i] = {stored / count, uniform_distribution(tree.num_classes()).probs, 0.0};

    GlobalAggregate out;
    std::vector<double> weights(b);
    for (unsigned i = 0; i < b; ++i) {
        weights[i] = children[i].weight;
        out.weight += weights[i];
    }
    const std::size_t len = children.front().dist.size();
    out.dist.assign(len, 0.0);
    if (!(out.weight > 0.0)) {
        for (const auto& c : children)
            for (std::size_t s = 0; s < len; ++s)
                out.dist[s] += c.dist[s] / static_cast<double>(b);
        return out;
    }
    for (const auto& c : children)
        for (std::size_t s = 0; s < len; ++s)
            out.dist[s] += (c.weight / out.weight) * c.dist[s];

    std::vector<ClassConditionals> conds;
    auto add_class = [&](ClassId id) {
        ClassConditionals cc{id, {}};
        for (const auto& c : children) {
            const double q = std::clamp(c.dist[static_cast<std::size_t>(id)], 0.0, 1.0);
            cc.child_marginals.push_back({1.0 - q, q});
        }
        conds.push_back(std::move(cc));
    };
    for (const auto& [id, v] : w.beta)
        add_class(id);
    for (const auto& [id, v] : w.gamma)
        add_class(id);

    const InfoIncrement inc = node_increments(out.weight, weights, conds, w);
    double child_g = 0.0;
    for (const auto& c : children)
        child_g += c.g;
    out.g = std::max(inc.delta_j + child_g, 0.0);
    return out;
}

} // namespace detail

/// G_Pi(n) evaluated from scratch on relative child weights.
inline double local_g_value(const SemanticOctree& tree, const NodeKey& n, const CompressionWeights& w)
{
    tree.at(n);
    w.validate(tree.num_classes());
    return detail::evaluate_local(tree, n, w).g_local;
}

/// G(n) evaluated from scratch on absolute weights p(n).
inline double global_g_value(const SemanticOctree& tree, const NodeKey& n, const CompressionWeights& w)
{
    tree.at(n);
    w.validate(tree.num_classes());
    return detail::evaluate_global(tree, n, w).g;
}

struct CompressedLeaf {
    NodeKey key;
    double weight = 0.0;
    /// p(s|leaf) over class ids 0..K.
    std::vector<double> dist;
};

/// Unobserved child slot of a kept interior node; implicitly an unknown-space leaf.
struct VirtualLeaf {
    NodeKey key;
    double weight = 0.0;
};

/**
 * A pruned version of a semantic tree: the kept nodes form a root-containing
 * subtree in which every expanded node has all of its children (stored ones
 * in `kept`, unobserved ones in `virtual_leaves`).
 */
struct CompressedTree {
    WorldConfig world;
    int num_classes = 0;
    /// Sorted; includes the root and every stored leaf of the result.
    std::vector<NodeKey> kept;
    /// Stored leaves of the result, sorted by key.
    std::vector<CompressedLeaf> leaves;
    /// Sorted by key.
    std::vector<VirtualLeaf> virtual_leaves;

    bool keeps(const NodeKey& k) const { return std::binary_search(kept.begin(), kept.end(), k); }

    const CompressedLeaf* find_leaf(const NodeKey& k) const
    {
        auto it = std::lower_bound(leaves.begin(), leaves.end(), k,
                                   [](const CompressedLeaf& l, const NodeKey& key) { return l.key < key; });
        return (it != leaves.end() && it->key == k) ? &*it : nullptr;
    }

    /// Leaves of the result, virtual ones included.
    std::size_t leaf_count() const { return leaves.size() + virtual_leaves.size(); }

    double total_weight() const
    {
        double s = 0.0;
        for (const auto& l : leaves)
            s += l.weight;
        for (const auto& v : virtual_leaves)
            s += v.weight;
        return s;
    }
};

namespace detail {

inline void add_virtual_slots(const SemanticOctree& tree, const NodeKey& k, CompressedTree& out)
{
    const OctreeNode& node = tree.at(k);
    const unsigned b = static_cast<unsigned>(tree.branching());
    double stored = 0.0;
    int count = 0;
    for (unsigned i = 0; i < b; ++i)
        if (node.child_mask & (1u << i)) {
            stored += tree.at(tree.world().child(k, i)).weight;
            ++count;
        }
    for (unsigned i = 0; i < b; ++i)
        if (!(node.child_mask & (1u << i)))
            out.virtual_leaves.push_back({tree.world().child(k, i), count > 0 ? stored / count : 0.0});
}

inline void finish(CompressedTree& t)
{
    std::sort(t.kept.begin(), t.kept.end());
    std::sort(t.leaves.begin(), t.leaves.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
    std::sort(t.virtual_leaves.begin(), t.virtual_leaves.end(),
              [](const auto& a, const auto& b) { return a.key < b.key; });
}

} // namespace detail

/**
 * Top-down extraction of the optimal compressed tree from cached G-values:
 * starting at the root, a node's children are included iff G_Pi > 0 (at
 * kExpandThreshold). Requires caches refreshed for `w`.
 */
inline CompressedTree g_tree_search(const SemanticOctree& tree, const CompressionWeights& w)
{
    detail::require_fresh_caches(tree, w);
    CompressedTree out{tree.world(), tree.num_classes(), {}, {}, {}};

    std::vector<NodeKey> queue{SemanticOctree::root()};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeKey k = queue[head];
        const OctreeNode& node = tree.at(k);
        out.kept.push_back(k);
        if (!node.is_leaf_like() && node.child_mask != 0 && node.g_local > kExpandThreshold) {
            for (const NodeKey& c : tree.stored_children(k))
                queue.push_back(c);
            detail::add_virtual_slots(tree, k, out);
        } else {
            out.leaves.push_back({k, node.weight,
                                  node.is_leaf_like() ? tree.leaf_distribution(k).probs : node.dist});
        }
    }
    detail::finish(out);
    return out;
}

/// The uncompressed tree: every stored node kept. Uses no G caches.
inline CompressedTree full_tree(const SemanticOctree& tree)
{
    CompressedTree out{tree.world(), tree.num_classes(), tree.sorted_keys(), {}, {}};
    for (const NodeKey& k : out.kept) {
        const OctreeNode& node = tree.at(k);
        if (node.is_leaf_like())
            out.leaves.push_back({k, node.weight, tree.leaf_distribution(k).probs});
        else if (node.child_mask == 0)
            out.leaves.push_back({k, 0.0, uniform_distribution(tree.num_classes()).probs});
        else
            detail::add_virtual_slots(tree, k, out);
    }
    detail::finish(out);
    return out;
}

/// Information content of a compressed tree, in bits, on weights normalised by p(root).
struct InfoReport {
    std::map<ClassId, double> i_y;
    std::map<ClassId, double> i_z;
    double i_x = 0.0;
    double objective = 0.0;
    /// I(class indicator; leaf) for every class id 0..K.
    std::vector<double> class_info;
    std::size_t leaf_count = 0;
    std::size_t stored_leaf_count = 0;
};

namespace detail {

/// Per-interior-node information increments on normalised weights.
struct NodeIncrement {
    double delta_x = 0.0;
    std::vector<double> delta_class;
    /// Contribution to the weighted objective.
    double delta_j = 0.0;
};

struct IncrementTable {
    std::unordered_map<NodeKey, NodeIncrement, NodeKeyHash> interior;
    int num_classes = 0;
    double root_weight = 0.0;
};

inline IncrementTable build_increment_table(const SemanticOctree& tree, const CompressionWeights& w)
{
    w.validate(tree.num_classes());
    const std::size_t len = static_cast<std::size_t>(tree.num_classes()) + 1;

    // Fresh weights and aggregates, bottom-up from the leaf records.
    struct Stats {
        double weight;
        std::vector<double> dist;
    };
    std::unordered_map<NodeKey, Stats, NodeKeyHash> stats;
    std::vector<NodeKey> keys = tree.sorted_keys();
    std::stable_sort(keys.begin(), keys.end(), [](const NodeKey& a, const NodeKey& b) { return a.depth > b.depth; });

    IncrementTable table;
    table.num_classes = tree.num_classes();
    for (const NodeKey& k : keys) {
        const OctreeNode& node = tree.at(k);
        if (node.is_leaf_like()) {
            stats[k] = {node.weight, tree.leaf_distribution(k).probs};
            continue;
        }
        if (node.child_mask == 0) {
            stats[k] = {0.0, uniform_distribution(tree.num_classes()).probs};
            continue;
        }
        const unsigned b = static_cast<unsigned>(tree.branching());
        std::vector<double> weights(b, 0.0);
        std::vector<std::vector<double>> dists(b);
        double stored = 0.0;
        int count = 0;
        for (unsigned i = 0; i < b; ++i)
            if (node.child_mask & (1u << i)) {
                const Stats& s = stats.at(tree.world().child(k, i));
                weights[i] = s.weight;
                dists[i] = s.dist;
                stored += s.weight;
                ++count;
            }
        for (unsigned i = 0; i < b; ++i)
            if (!(node.child_mask & (1u << i))) {
                weights[i] = stored / count;
                dists[i] = uniform_distribution(tree.num_classes()).probs;
            }
        double total = 0.0;
        for (double v : weights)
            total += v;
        Stats s{total, std::vector<double>(len, 0.0)};
        if (total > 0.0)
            s.dist = aggregate_conditional(dists, weights);
        else
            s.dist = uniform_distribution(tree.num_classes()).probs;
        stats[k] = std::move(s);

        NodeIncrement inc;
        inc.delta_class.assign(len, 0.0);
        if (total > 0.0) {
            std::vector<std::vector<double>> marginals(b);
            for (std::size_t c = 0; c < len; ++c) {
                for (unsigned i = 0; i < b; ++i) {
                    const double q = std::clamp(dists[i][c], 0.0, 1.0);
                    marginals[i] = {1.0 - q, q};
                }
                inc.delta_class[c] = total * js_divergence(marginals, weights);
            }
            inc.delta_x = total * entropy(normalized(weights));
        }
        table.interior.emplace(k, std::move(inc));
    }

    table.root_weight = stats.at(SemanticOctree::root()).weight;
    const double scale = table.root_weight > 0.0 ? 1.0 / table.root_weight : 0.0;
    for (auto& [k, inc] : table.interior) {
        inc.delta_x *= scale;
        for (double& d : inc.delta_class)
            d *= scale;
        inc.delta_j = -w.alpha * inc.delta_x;
        for (const auto& [id, beta] : w.beta)
            inc.delta_j += beta * inc.delta_class[static_cast<std::size_t>(id)];
        for (const auto& [id, gamma] : w.gamma)
            inc.delta_j -= gamma * inc.delta_class[static_cast<std::size_t>(id)];
    }
    return table;
}

/// Kept nodes that have kept children; throws if `t` is not a valid pruning of `tree`.
inline std::vector<NodeKey> interior_of(const SemanticOctree& tree, const CompressedTree& t)
{
    auto bad = [](const std::string& why) { fail(ErrorCategory::invalid_argument, "not a subtree: " + why); };
    if (!(t.world == tree.world()) || t.num_classes != tree.num_classes())
        bad("world or class count differs");
    if (!std::is_sorted(t.kept.begin(), t.kept.end()) ||
        std::adjacent_find(t.kept.begin(), t.kept.end()) != t.kept.end())
        bad("kept set is not sorted and unique");
    if (!t.keeps(SemanticOctree::root()))
        bad("root missing");

    std::vector<NodeKey> interior;
    for (const NodeKey& k : t.kept) {
        const OctreeNode* node = tree.find(k);
        if (!node)
            bad("unknown key " + to_string(k));
        if (k.depth > 0 && !t.keeps(tree.world().parent(k)))
            bad("parent of " + to_string(k) + " not kept");
        if (node->is_leaf_like() || node->child_mask == 0)
            continue;
        const std::vector<NodeKey> children = tree.stored_children(k);
        const auto kept_children = std::ranges::count_if(children, [&](const NodeKey& c) { return t.keeps(c); });
        if (kept_children == 0)
            continue;
        if (static_cast<std::size_t>(kept_children) != children.size())
            bad("partially expanded node " + to_string(k));
        interior.push_back(k);
    }
    return interior;
}

inline InfoReport report_from_table(const IncrementTable& table, std::span<const NodeKey> interior,
                                    const CompressionWeights& w)
{
    InfoReport r;
    r.class_info.assign(static_cast<std::size_t>(table.num_classes) + 1, 0.0);
    for (const NodeKey& k : interior) {
        const NodeIncrement& inc = table.interior.at(k);
        r.i_x += inc.delta_x;
        for (std::size_t c = 0; c < r.class_info.size(); ++c)
            r.class_info[c] += inc.delta_class[c];
    }
    r.objective = -w.alpha * r.i_x;
    for (const auto& [id, beta] : w.beta) {
        r.i_y[id] = r.class_info[static_cast<std::size_t>(id)];
        r.objective += beta * r.i_y[id];
    }
    for (const auto& [id, gamma] : w.gamma) {
        r.i_z[id] = r.class_info[static_cast<std::size_t>(id)];
        r.objective -= gamma * r.i_z[id];
    }
    return r;
}

} // namespace detail

/**
 * Relevant, irrelevant and compression information held by `t`, as sums of
 * per-node increments over its expanded nodes. These telescope to
 * I(Y_i; leaf) and H(leaf) of the normalised leaf partition.
 */
inline InfoReport info_report(const SemanticOctree& tree, const CompressedTree& t, const CompressionWeights& w)
{
    const std::vector<NodeKey> interior = detail::interior_of(tree, t);
    const detail::IncrementTable table = detail::build_increment_table(tree, w);
    InfoReport r = detail::report_from_table(table, interior, w);

    const unsigned b = static_cast<unsigned>(tree.branching());
    for (const NodeKey& k : t.kept) {
        const OctreeNode& node = tree.at(k);
        const bool expanded = std::binary_search(interior.begin(), interior.end(), k);
        if (expanded) {
            r.leaf_count += b - static_cast<unsigned>(std::popcount(node.child_mask));
        } else {
            ++r.leaf_count;
            if (node.is_leaf_like())
                ++r.stored_leaf_count;
        }
    }
    return r;
}

struct OracleResult {
    double best_objective = 0.0;
    /// Trees within 1e-9 of the best objective.
    std::size_t optimal_count = 0;
    std::size_t candidates = 0;
    /// Expanded nodes of one optimal tree.
    std::vector<NodeKey> best_interior;
};

/// Upper bound on the number of prunings exhaustive_oracle will enumerate.
inline constexpr std::size_t kOracleLimit = 1'000'000;

/// Number of distinct prunings of `tree`, saturating just above kOracleLimit.
inline std::size_t count_prunings(const SemanticOctree& tree, const NodeKey& k = SemanticOctree::root())
{
    const OctreeNode& node = tree.at(k);
    if (node.is_leaf_like() || node.child_mask == 0)
        return 1;
    std::size_t product = 1;
    for (const NodeKey& c : tree.stored_children(k)) {
        product *= count_prunings(tree, c);
        if (product > kOracleLimit)
            return kOracleLimit + 1;
    }
    return std::min(product + 1, kOracleLimit + 1);
}

/**
 * Brute force over every pruning of `tree`: evaluates the weighted objective
 * of each and returns the best value together with the number of maximisers.
 * Refuses instances with more than kOracleLimit prunings.
 */
inline OracleResult exhaustive_oracle(const SemanticOctree& tree, const CompressionWeights& w)
{
    const std::size_t total = count_prunings(tree);
    if (total > kOracleLimit)
        detail::fail(ErrorCategory::size, "exhaustive_oracle: more than 1e6 prunings");

    const detail::IncrementTable table = detail::build_increment_table(tree, w);
    std::vector<double> values;
    values.reserve(total);
    std::vector<NodeKey> frontier{SemanticOctree::root()};
    std::vector<NodeKey> chosen;
    OracleResult result;
    result.best_objective = -std::numeric_limits<double>::infinity();

    auto record = [&](double value) {
        values.push_back(value);
        if (value > result.best_objective) {
            result.best_objective = value;
            result.best_interior = chosen;
        }
    };

    auto recurse = [&](auto&& self, std::size_t pos, double acc) -> void {
        if (pos == frontier.size()) {
            record(acc);
            return;
        }
        const NodeKey k = frontier[pos];
        self(self, pos + 1, acc);
        const OctreeNode& node = tree.at(k);
        if (node.is_leaf_like() || node.child_mask == 0)
            return;
        const std::vector<NodeKey> children = tree.stored_children(k);
        frontier.insert(frontier.end(), children.begin(), children.end());
        chosen.push_back(k);
        self(self, pos + 1, acc + table.interior.at(k).delta_j);
        chosen.pop_back();
        frontier.resize(frontier.size() - children.size());
    };
    recurse(recurse, 0, 0.0);

    result.candidates = values.size();
    result.optimal_count = static_cast<std::size_t>(
        std::ranges::count_if(values, [&](double v) { return v >= result.best_objective - 1e-9; }));
    std::sort(result.best_interior.begin(), result.best_interior.end());
    return result;
}

} // namespace semoctree
