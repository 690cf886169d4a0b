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

// A small outdoor scene for demos and end-to-end tests: a 64 x 64 m ground
// plane at 1 m resolution with roads, grass, a dirt path, trees and
// buildings, observed by a noisy classifier.

#include <array>
#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include "semoctree/io/cloud.hpp"
#include "semoctree/io/config.hpp"

namespace semoctree::synthetic {

inline constexpr ClassId kRoad = 1;
inline constexpr ClassId kGrass = 2;
inline constexpr ClassId kTree = 3;
inline constexpr ClassId kBuilding = 4;
inline constexpr ClassId kDirt = 5;
inline constexpr ClassId kCar = 6;
inline constexpr ClassId kSidewalk = 7;
inline constexpr ClassId kWater = 8;
inline constexpr int kNumClasses = 8;
inline constexpr int kCells = 64;
inline constexpr int kLayers = 8;

inline WorldFile world_file()
{
    WorldFile f;
    f.world.origin = {0.0, 0.0, 0.0};
    f.world.edge_length = kCells;
    f.world.max_depth = 6;
    f.world.branching = 8;
    f.classes = ClassRegistry(kNumClasses);
    const std::array<const char*, 8> names{"road", "grass", "tree", "building", "dirt", "car", "sidewalk", "water"};
    for (ClassId id = 1; id <= kNumClasses; ++id)
        f.classes.set_name(id, names[static_cast<std::size_t>(id - 1)]);
    return f;
}

inline bool is_road(int x, int y) { return (y >= 30 && y < 34) || (x >= 30 && x < 34) || (y >= 8 && y < 12); }

inline bool is_building(int x, int y)
{
    return (x >= 4 && x < 14 && y >= 40 && y < 54) || (x >= 44 && x < 58 && y >= 40 && y < 56) ||
           (x >= 40 && x < 56 && y >= 16 && y < 26);
}

inline bool is_tree(int x, int y) { return x % 9 == 4 && y % 7 == 3; }

inline bool is_dirt(int x, int y) { return x >= 12 && x < 30 && (y == 20 + (x - 12) / 3 || y == 21 + (x - 12) / 3); }

/// Ground truth of cell (x, y, z); kUnknownClass where the scene is never observed.
inline ClassId truth(int x, int y, int z)
{
    if (is_building(x, y))
        return z < 6 ? kBuilding : kFreeClass;
    if (is_road(x, y))
        return z == 0 ? kRoad : (z < 3 ? kFreeClass : kUnknownClass);
    if (is_tree(x, y))
        return z < 3 ? kTree : kUnknownClass;
    if (z == 0)
        return is_dirt(x, y) ? kDirt : kGrass;
    return z < 3 ? kFreeClass : kUnknownClass;
}

struct Options {
    std::size_t records = 50'000;
    /// Probability that a record reports the true class.
    double accuracy = 0.8;
    double min_confidence = 0.55;
    double max_confidence = 0.95;
    std::uint64_t seed = 7;
};

inline std::vector<CloudRecord> generate_cloud(const Options& opts = {})
{
    std::vector<std::array<int, 3>> observed;
    for (int z = 0; z < kLayers; ++z)
        for (int y = 0; y < kCells; ++y)
            for (int x = 0; x < kCells; ++x)
                if (truth(x, y, z) != kUnknownClass)
                    observed.push_back({x, y, z});

    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::size_t> pick(0, observed.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<ClassId> any_class(0, kNumClasses);

    std::vector<CloudRecord> out;
    out.reserve(opts.records);
    for (std::size_t i = 0; i < opts.records; ++i) {
        const auto [x, y, z] = observed[pick(rng)];
        CloudRecord r;
        r.x = x + unit(rng);
        r.y = y + unit(rng);
        r.z = z + unit(rng);
        r.class_id = unit(rng) < opts.accuracy ? truth(x, y, z) : any_class(rng);
        r.confidence = opts.min_confidence + (opts.max_confidence - opts.min_confidence) * unit(rng);
        out.push_back(r);
    }
    return out;
}

inline void write_cloud_csv(std::ostream& out, std::span<const CloudRecord> records)
{
    out << kCloudHeader << '\n';
    for (const CloudRecord& r : records)
        out << format_exact(r.x) << ',' << format_exact(r.y) << ',' << format_exact(r.z) << ',' << r.class_id << ','
            << format_exact(r.confidence) << '\n';
}

} // namespace semoctree::synthetic
