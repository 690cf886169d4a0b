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

#include <span>

#include "semoctree/compression.hpp"
#include "semoctree/io/cloud.hpp"
#include "semoctree/semantic_octree.hpp"

namespace semoctree {

struct BuildStats {
    std::size_t inserted = 0;
    /// Records whose confidence is too low to carry information (at or below 1/(K+1)).
    std::size_t skipped_low_confidence = 0;
    std::size_t pruned_nodes = 0;
};

/// Fuses `records` into `tree` in order.
inline BuildStats insert_records(SemanticOctree& tree, std::span<const CloudRecord> records)
{
    BuildStats stats;
    const double floor = 1.0 / (tree.num_classes() + 1);
    for (const CloudRecord& r : records) {
        if (r.confidence <= floor) {
            ++stats.skipped_low_confidence;
            continue;
        }
        create_or_update_node(tree, Vec3{r.x, r.y, r.z}, r.class_id, r.confidence);
        ++stats.inserted;
    }
    return stats;
}

/// Collapses every full set of identical finest-level siblings into a summary record.
inline std::size_t prune_identical(SemanticOctree& tree)
{
    std::vector<NodeKey> parents;
    for (const NodeKey& k : tree.sorted_keys())
        if (k.depth + 1 == tree.world().max_depth)
            parents.push_back(k);
    std::size_t pruned = 0;
    for (const NodeKey& k : parents)
        pruned += adhoc_prune(tree, k) ? 1 : 0;
    return pruned;
}

/// Re-expands summaries and refreshes every cache for `w`.
inline void prepare_for_compression(SemanticOctree& tree, const CompressionWeights& w)
{
    tree.expand_summaries();
    recompute_caches(tree, w);
}

} // namespace semoctree
