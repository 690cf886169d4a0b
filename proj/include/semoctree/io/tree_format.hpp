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

// SOCT binary tree format, version 1. All integers and doubles little-endian.
//
//   "SOCT" u8:version f64[3]:origin f64:edge_length u8:max_depth u8:branching u16:K
//   node*  (pre-order from the root, children in index order)
//
//   node := u8:kind (0 interior, 1 leaf, 2 summary)
//           interior:      u8:child_mask, then the present children
//           leaf, summary: f64:weight f64:p_free f64:p_residual u8:n_top (u16:class f64:p)*n_top

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "semoctree/semantic_octree.hpp"

namespace semoctree {

inline constexpr std::uint8_t kTreeFormatVersion = 1;
inline constexpr char kTreeMagic[4] = {'S', 'O', 'C', 'T'};

namespace detail {

class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { le(v, 2); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
    void raw(std::span<const char> s)
    {
        for (char c : s)
            out_.push_back(static_cast<std::uint8_t>(c));
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    void le(std::uint64_t v, int n)
    {
        for (int i = 0; i < n; ++i)
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> out_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
    double f64() { return std::bit_cast<double>(le(8)); }
    bool at_end() const { return pos_ == in_.size(); }
    std::size_t remaining() const { return in_.size() - pos_; }

private:
    std::uint64_t le(int n)
    {
        if (remaining() < static_cast<std::size_t>(n))
            fail(ErrorCategory::corruption, "tree file truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i)
            v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

inline void encode_node(const SemanticOctree& tree, const NodeKey& k, ByteWriter& w)
{
    const OctreeNode& n = tree.at(k);
    w.u8(static_cast<std::uint8_t>(n.kind));
    if (n.kind == NodeKind::interior) {
        w.u8(n.child_mask);
        for (const NodeKey& c : tree.stored_children(k))
            encode_node(tree, c, w);
        return;
    }
    w.f64(n.weight);
    w.f64(n.semantics.p_free());
    w.f64(n.semantics.p_residual());
    w.u8(static_cast<std::uint8_t>(n.semantics.top().size()));
    for (const ClassProb& e : n.semantics.top()) {
        w.u16(static_cast<std::uint16_t>(e.id));
        w.f64(e.p);
    }
}

inline void decode_node(SemanticOctree& tree, const NodeKey& k, ByteReader& r)
{
    auto corrupt = [&](const std::string& why) { fail(ErrorCategory::corruption, "tree file: " + why + " at " + to_string(k)); };
    const WorldConfig& world = tree.world();
    OctreeNode n;
    const std::uint8_t kind = r.u8();
    if (kind > 2)
        corrupt("unknown node kind");
    n.kind = static_cast<NodeKind>(kind);
    if (n.kind == NodeKind::leaf && k.depth != world.max_depth)
        corrupt("leaf above the finest depth");
    if (n.kind != NodeKind::leaf && k.depth == world.max_depth)
        corrupt("non-leaf at the finest depth");

    if (n.kind == NodeKind::interior) {
        n.child_mask = r.u8();
        if (world.branching < 8 && (n.child_mask >> world.branching) != 0)
            corrupt("child mask exceeds branching");
        if (n.child_mask == 0 && k.depth > 0)
            corrupt("empty interior node");
        n.dist = uniform_distribution(tree.num_classes()).probs;
        OctreeAccess::nodes(tree).insert_or_assign(k, std::move(n));
        for (unsigned i = 0; i < static_cast<unsigned>(world.branching); ++i)
            if (OctreeAccess::node(tree, k).child_mask & (1u << i))
                decode_node(tree, world.child(k, i), r);
        OctreeAccess::node(tree, k).weight = tree.completed_weight(k);
        return;
    }

    n.weight = r.f64();
    const double p_free = r.f64();
    const double p_residual = r.f64();
    const std::uint8_t n_top = r.u8();
    if (n_top > TruncatedDistribution::kMaxTop)
        corrupt("more than 3 top classes");
    std::vector<ClassProb> top;
    for (std::uint8_t i = 0; i < n_top; ++i) {
        const std::uint16_t id = r.u16();
        top.push_back({static_cast<ClassId>(id), r.f64()});
    }
    if (!(std::isfinite(n.weight) && n.weight >= 0.0))
        corrupt("invalid weight");
    try {
        n.semantics = TruncatedDistribution(top, p_free, p_residual);
        n.semantics.validate(tree.num_classes());
    } catch (const Error& e) {
        corrupt(e.what());
    }
    OctreeAccess::nodes(tree).insert_or_assign(k, std::move(n));
}

} // namespace detail

inline std::vector<std::uint8_t> encode_tree(const SemanticOctree& tree)
{
    detail::ByteWriter w;
    const WorldConfig& world = tree.world();
    w.raw(kTreeMagic);
    w.u8(kTreeFormatVersion);
    for (double o : world.origin)
        w.f64(o);
    w.f64(world.edge_length);
    w.u8(static_cast<std::uint8_t>(world.max_depth));
    w.u8(static_cast<std::uint8_t>(world.branching));
    w.u16(static_cast<std::uint16_t>(tree.num_classes()));
    detail::encode_node(tree, SemanticOctree::root(), w);
    return w.take();
}

/// Rebuilds a tree from encode_tree output. Interior aggregates must be recomputed before compression.
inline SemanticOctree decode_tree(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kTreeMagic, 4) != 0)
        detail::fail(ErrorCategory::format, "tree file: bad magic");
    detail::ByteReader r(bytes.subspan(4));
    const std::uint8_t version = r.u8();
    if (version != kTreeFormatVersion)
        detail::fail(ErrorCategory::format, "tree file: unsupported version " + std::to_string(version));
    WorldConfig world;
    for (double& o : world.origin)
        o = r.f64();
    world.edge_length = r.f64();
    world.max_depth = r.u8();
    world.branching = r.u8();
    const int num_classes = r.u16();
    try {
        world.validate();
        detail::require(num_classes >= 4, ErrorCategory::config, "K must be at least 4");
    } catch (const Error& e) {
        detail::fail(ErrorCategory::corruption, std::string("tree file header: ") + e.what());
    }

    SemanticOctree tree(world, num_classes);
    detail::decode_node(tree, SemanticOctree::root(), r);
    if (!r.at_end())
        detail::fail(ErrorCategory::corruption, "tree file: trailing bytes");
    detail::OctreeAccess::caches_complete(tree) =
        tree.node_count() == 1 && !tree.at(SemanticOctree::root()).is_leaf_like();
    return tree;
}

inline void serialize_tree(const SemanticOctree& tree, const std::filesystem::path& path)
{
    const std::vector<std::uint8_t> bytes = encode_tree(tree);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        detail::fail(ErrorCategory::io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        detail::fail(ErrorCategory::io, "write failed: " + path.string());
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        detail::fail(ErrorCategory::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline SemanticOctree deserialize_tree(const std::filesystem::path& path)
{
    return decode_tree(read_file_bytes(path));
}

} // namespace semoctree
