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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include <fmt/format.h>

#include "support/oracles.hpp"
#include "semoctree/synthetic.hpp"

namespace so = semoctree;
using so::NodeKey;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

oracle::RandomTreeOptions shape(std::mt19937_64& rng)
{
    oracle::RandomTreeOptions o;
    const int pick = std::uniform_int_distribution<int>(0, 2)(rng);
    o.branching = std::array{2, 4, 8}[pick];
    const int max_depth = std::array{4, 3, 2}[pick];
    o.depth = std::uniform_int_distribution<int>(1, max_depth)(rng);
    o.num_classes = std::uniform_int_distribution<int>(4, 7)(rng);
    o.fill = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
    return o;
}

Outcome global_local_identity()
{
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    std::size_t nodes = 0;
    const int trees = 1000;
    for (int i = 0; i < trees; ++i) {
        const auto o = shape(rng);
        const auto t = oracle::random_tree(rng, o);
        const auto w = oracle::random_weights(rng, o.num_classes);
        for (const NodeKey& k : t.sorted_keys()) {
            const double err =
                std::abs(so::global_g_value(t, k, w) - t.at(k).weight * so::local_g_value(t, k, w));
            worst = std::max(worst, err);
            ++nodes;
        }
    }
    return {worst <= 1e-9, fmt::format("{} trees, {} nodes, max |G - p*G_Pi| = {:.3g}", trees, nodes, worst)};
}

Outcome oracle_optimality()
{
    std::mt19937_64 rng(2002);
    double worst = 0.0;
    int instances = 0;
    std::size_t candidates = 0;
    while (instances < 250) {
        const auto o = shape(rng);
        auto t = oracle::random_tree(rng, o);
        if (so::count_prunings(t) > so::kOracleLimit)
            continue;
        const auto w = oracle::random_weights(rng, o.num_classes);
        so::recompute_caches(t, w);
        const auto c = so::g_tree_search(t, w);
        const auto best = so::exhaustive_oracle(t, w);
        const auto direct = oracle::information(oracle::partition(t, oracle::expanded_nodes(t, c)), o.num_classes, w);
        worst = std::max({worst, std::abs(direct.objective - best.best_objective),
                          std::abs(so::info_report(t, c, w).objective - best.best_objective)});
        candidates += best.candidates;
        ++instances;
    }
    return {worst <= 1e-9,
            fmt::format("{} instances, {} prunings enumerated, max |J(g-tree) - J*| = {:.3g}", instances, candidates,
                        worst)};
}

Outcome telescoping()
{
    std::mt19937_64 rng(3003);
    double worst_x = 0.0;
    double worst_y = 0.0;
    const int trees = 150;
    for (int i = 0; i < trees; ++i) {
        const auto o = shape(rng);
        auto t = oracle::random_tree(rng, o);
        const auto w = oracle::random_weights(rng, o.num_classes);
        so::recompute_caches(t, w);
        const auto c = so::g_tree_search(t, w);
        const auto r = so::info_report(t, c, w);
        const auto leaves = oracle::partition(t, oracle::expanded_nodes(t, c));
        double total = 0.0;
        for (const auto& l : leaves)
            total += l.weight;
        std::vector<double> px;
        for (const auto& l : leaves)
            px.push_back(total > 0.0 ? l.weight / total : 0.0);
        worst_x = std::max(worst_x, std::abs(r.i_x - (total > 0.0 ? oracle::shannon(px) : 0.0)));
        const auto ref = oracle::information(leaves, o.num_classes, w);
        for (std::size_t k = 0; k < ref.class_info.size(); ++k)
            worst_y = std::max(worst_y, std::abs(r.class_info[k] - ref.class_info[k]));
    }
    return {worst_x <= 1e-9 && worst_y <= 1e-9,
            fmt::format("{} compressed trees, max |I_X - H(leaves)| = {:.3g}, max |I_Y - I(Y;N)| = {:.3g}", trees,
                        worst_x, worst_y)};
}

Outcome incremental_batch()
{
    std::mt19937_64 rng(4004);
    double worst = 0.0;
    int insertions = 0;
    for (int run = 0; run < 3; ++run) {
        so::WorldConfig world;
        world.branching = std::array{2, 4, 8}[run];
        world.max_depth = std::array{6, 4, 3}[run];
        world.edge_length = 16.0;
        so::SemanticOctree t(world, 6);
        const auto w = oracle::random_weights(rng, 6);
        so::recompute_caches(t, w);
        std::uniform_real_distribution<double> u(0.0, 16.0);
        for (int i = 0; i < 60; ++i) {
            const NodeKey leaf = so::create_or_update_node(t, {u(rng), u(rng), u(rng)},
                                                           std::uniform_int_distribution<so::ClassId>(0, 6)(rng),
                                                           std::uniform_real_distribution<double>(0.3, 1.0)(rng));
            so::update_pass(t, leaf, w);
            ++insertions;
            auto batch = t;
            so::recompute_caches(batch, w);
            for (const NodeKey& k : t.sorted_keys())
                worst = std::max(worst, std::abs(t.at(k).g_local - batch.at(k).g_local));
        }
    }
    return {worst <= 1e-9,
            fmt::format("{} insertions, max |G_Pi(incremental) - G_Pi(batch)| = {:.3g}", insertions, worst)};
}

so::SemanticOctree synthetic_tree(std::size_t records)
{
    const so::WorldFile wf = so::synthetic::world_file();
    so::synthetic::Options opts;
    opts.records = records;
    const auto cloud = so::synthetic::generate_cloud(opts);
    so::SemanticOctree t(wf.world, wf.classes.num_classes());
    so::insert_records(t, cloud);
    return t;
}

Outcome limit_behaviours()
{
    std::mt19937_64 rng(5005);
    bool ok = true;
    double min_ratio = 1.0;
    double max_ratio = 1.0;
    std::size_t checked = 0;
    std::vector<so::SemanticOctree> trees;
    for (int i = 0; i < 20; ++i)
        trees.push_back(oracle::random_tree(rng, shape(rng)));
    trees.push_back(synthetic_tree(20'000));

    int root_only = 0;
    for (auto& t : trees) {
        so::CompressionWeights all;
        for (so::ClassId c = 0; c <= t.num_classes(); ++c)
            all.beta[c] = 1.0;
        so::recompute_caches(t, all);
        const auto r = so::info_report(t, so::g_tree_search(t, all), all);
        const auto full = so::info_report(t, so::full_tree(t), all);
        for (std::size_t c = 0; c < r.class_info.size(); ++c) {
            if (!(full.class_info[c] > 0.0))
                continue;
            const double ratio = r.class_info[c] / full.class_info[c];
            min_ratio = std::min(min_ratio, ratio);
            max_ratio = std::max(max_ratio, ratio);
            ok = ok && ratio == 1.0;
            ++checked;
        }

        so::CompressionWeights heavy = oracle::random_weights(rng, t.num_classes());
        heavy.alpha = 1e3 * (heavy.beta_sum() + heavy.gamma_sum());
        so::recompute_caches(t, heavy);
        const auto c = so::g_tree_search(t, heavy);
        const auto rh = so::info_report(t, c, heavy);
        const bool single = c.kept.size() == 1 && rh.leaf_count == 1 &&
                            static_cast<double>(rh.leaf_count) / full.leaf_count == 1.0 / full.leaf_count;
        ok = ok && single;
        root_only += single ? 1 : 0;
    }
    return {ok, fmt::format("(a) {} class ratios in [{:.17g}, {:.17g}]; (b) root-only on {}/{} trees", checked,
                            min_ratio, max_ratio, root_only, trees.size())};
}

Outcome irrelevance_suppression()
{
    auto t = synthetic_tree(50'000);
    auto solve = [&](double gamma) {
        so::CompressionWeights w;
        w.beta[so::synthetic::kRoad] = 1.0;
        w.gamma[so::synthetic::kGrass] = gamma;
        w.alpha = 1e-4;
        so::recompute_caches(t, w);
        const auto r = so::info_report(t, so::g_tree_search(t, w), w);
        const auto full = so::info_report(t, so::full_tree(t), w);
        return std::pair{r.class_info[so::synthetic::kGrass] / full.class_info[so::synthetic::kGrass], r.leaf_count};
    };
    const std::vector<double> gammas{0.1, 0.3, 1.0, 3.0, 10.0};
    std::vector<std::pair<double, std::size_t>> sweep;
    for (double g : gammas)
        sweep.push_back(solve(g));
    bool monotone = true;
    std::string trace;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        if (i > 0)
            monotone = monotone && sweep[i].first <= sweep[i - 1].first && sweep[i].second <= sweep[i - 1].second;
        trace += fmt::format("{}{}: {:.4f}/{}", i ? ", " : "", gammas[i], sweep[i].first, sweep[i].second);
    }
    const bool strict = sweep.back().first < sweep.front().first && sweep.back().second < sweep.front().second;
    return {strict && monotone, fmt::format("gamma_grass -> grass retention/leaves: {}", trace)};
}

Outcome coa_star()
{
    std::mt19937_64 rng(7007);
    int graphs = 0;
    int solvable = 0;
    double worst_plain = 0.0;
    bool ok = true;
    for (; graphs < 400; ++graphs) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
        const auto g = oracle::random_graph(rng, n, std::uniform_real_distribution<double>(0.15, 0.6)(rng), 5,
                                            graphs % 2 == 0);
        so::PlanQuery q;
        q.start = 0;
        q.goal = n - 1;
        for (so::ClassId c = 1; c <= 5; ++c)
            if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.4)
                q.undesired.insert(c);
        const auto r = so::class_ordered_astar(g, q);
        const auto best = oracle::best_simple_path(g, q);
        if (r.has_value() != best.has_value()) {
            ok = false;
            continue;
        }
        if (!r)
            continue;
        ++solvable;
        ok = ok && r->cost.undesired_edges == best->undesired_edges &&
             std::abs(r->cost.length - best->length) <= 1e-9;

        so::PlanQuery open = q;
        open.undesired.clear();
        open.unknown_is_undesired = false;
        const auto plain = oracle::shortest_length(g, q.start, q.goal);
        const auto unrestricted = so::class_ordered_astar(g, open);
        worst_plain = std::max(worst_plain, std::abs(unrestricted->cost.length - *plain));
    }
    return {ok && worst_plain <= 1e-9,
            fmt::format("{} graphs ({} with a path) match exhaustive enumeration; max |COA*(no undesired) - Dijkstra| "
                        "= {:.3g}",
                        graphs, solvable, worst_plain)};
}

Outcome scale_invariance()
{
    std::mt19937_64 rng(8008);
    int same = 0;
    const int instances = 50;
    for (int i = 0; i < instances; ++i) {
        const auto o = shape(rng);
        const auto base = oracle::random_tree(rng, o);
        const auto w = oracle::random_weights(rng, o.num_classes);
        std::vector<std::vector<NodeKey>> kept;
        for (double c : {0.1, 1.0, 7.3}) {
            auto t = base;
            for (const NodeKey& k : base.sorted_keys())
                if (base.at(k).is_leaf_like())
                    t.set_leaf_weight(k, c * base.at(k).weight);
            so::recompute_caches(t, w);
            kept.push_back(so::g_tree_search(t, w).kept);
        }
        same += (kept[0] == kept[1] && kept[1] == kept[2]) ? 1 : 0;
    }
    return {same == instances, fmt::format("{}/{} instances keep identical node sets for c in {{0.1, 1, 7.3}}", same,
                                           instances)};
}

Outcome serialization()
{
    std::mt19937_64 rng(9009);
    int exact = 0;
    const int trees = 50;
    for (int i = 0; i < trees; ++i) {
        auto t = oracle::random_tree(rng, shape(rng));
        if (i % 5 == 0)
            so::prune_identical(t);
        const auto bytes = so::encode_tree(t);
        exact += so::encode_tree(so::decode_tree(bytes)) == bytes ? 1 : 0;
    }

    auto t = oracle::random_tree(rng, shape(rng));
    const auto bytes = so::encode_tree(t);
    auto expect = [&](std::vector<std::uint8_t> b, so::ErrorCategory want) {
        try {
            so::decode_tree(b);
        } catch (const so::Error& e) {
            return e.category() == want;
        }
        return false;
    };
    int rejected = 0;
    auto magic = bytes;
    magic[1] = 'X';
    rejected += expect(magic, so::ErrorCategory::format);
    auto version = bytes;
    version[4] = 255;
    rejected += expect(version, so::ErrorCategory::format);
    int truncations = 0;
    for (std::size_t cut = 5; cut < bytes.size(); cut += std::max<std::size_t>(1, bytes.size() / 40)) {
        ++truncations;
        rejected += expect({bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut)},
                           so::ErrorCategory::corruption);
    }
    auto trailing = bytes;
    trailing.push_back(1);
    rejected += expect(trailing, so::ErrorCategory::corruption);
    const int corrupt_cases = 3 + truncations;

    const auto dir = std::filesystem::temp_directory_path() / "semoctree_acceptance.soct";
    so::serialize_tree(t, dir);
    const bool file_ok = so::encode_tree(so::deserialize_tree(dir)) == bytes;
    std::filesystem::remove(dir);
    return {exact == trees && rejected == corrupt_cases && file_ok,
            fmt::format("{}/{} bit-exact round trips; {}/{} corrupted files rejected with the expected category", exact,
                        trees, rejected, corrupt_cases)};
}

Outcome end_to_end()
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "semoctree_acceptance_e2e";
    fs::create_directories(dir);
    const so::WorldFile wf = so::synthetic::world_file();
    {
        std::ofstream cloud(dir / "cloud.csv");
        so::synthetic::write_cloud_csv(cloud, so::synthetic::generate_cloud({}));
    }

    const auto cloud = so::read_cloud(dir / "cloud.csv", wf.classes.num_classes());
    so::SemanticOctree built(wf.world, wf.classes.num_classes());
    const auto stats = so::insert_records(built, cloud.records);
    so::serialize_tree(built, dir / "tree.soct");
    auto tree = so::deserialize_tree(dir / "tree.soct");

    const so::WeightsConfig weights = so::parse_weights_text(
        "num_classes = 8\nalpha = 0.0001\nclass.1 = relevant 1\nclass.2 = irrelevant 1\nclass.3 = irrelevant 1\n");
    so::prepare_for_compression(tree, weights.weights);
    const auto compressed = so::g_tree_search(tree, weights.weights);
    const auto report = so::info_report(tree, compressed, weights.weights);
    const auto full = so::info_report(tree, so::full_tree(tree), weights.weights);
    const std::string text = so::format_report(report, full, weights, wf.classes);

    so::PlanQuery q;
    q.relevant = {so::synthetic::kRoad};
    q.undesired = {so::synthetic::kGrass, so::synthetic::kTree, so::synthetic::kBuilding};
    const auto g = so::graph_from_tree(compressed, q, 8);

    const std::vector<std::pair<so::Vec2, so::Vec2>> queries{
        {{2, 31}, {62, 9}}, {{31, 2}, {31, 62}}, {{2, 10}, {62, 32}}, {{20, 31}, {32, 50}},
        {{5, 5}, {60, 60}}, {{10, 45}, {50, 20}}, {{0.5, 9}, {63, 33}}, {{31, 31}, {2, 2}}};
    int clean = 0;
    int violations = 0;
    int planned = 0;
    for (const auto& [a, b] : queries) {
        q.start = g.nearest_vertex(a);
        q.goal = g.nearest_vertex(b);
        const auto r = so::class_ordered_astar(g, q);
        const bool exists = oracle::clean_path_exists(g, q);
        clean += exists ? 1 : 0;
        planned += r ? 1 : 0;
        if (exists && (!r || r->cost.undesired_edges != 0))
            ++violations;
    }
    fs::remove_all(dir);
    return {violations == 0 && clean > 0 && g.edge_count() > 0 && !text.empty(),
            fmt::format("{} records ({} fused), {} -> {} leaves, road retention {:.4f}, graph {} vertices / {} edges, "
                        "{}/{} queries planned, {} with a clean route, {} violations",
                        cloud.records.size(), stats.inserted, full.leaf_count, report.leaf_count,
                        report.class_info[1] / full.class_info[1], g.vertex_count(), g.edge_count(), planned,
                        queries.size(), clean, violations)};
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "Global G = p(n) local G", 60, global_local_identity},
        {2, "Oracle optimality", 120, oracle_optimality},
        {3, "Telescoping identities", 0, telescoping},
        {4, "Incremental = batch", 0, incremental_batch},
        {5, "Limit behaviours", 0, limit_behaviours},
        {6, "Irrelevance suppression", 0, irrelevance_suppression},
        {7, "COA* correctness", 0, coa_star},
        {8, "Scale invariance", 0, scale_invariance},
        {9, "Serialization", 0, serialization},
        {10, "End-to-end pipeline", 120, end_to_end},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0 && secs > c.budget_seconds) {
            out.pass = false;
            out.detail += fmt::format("; over the {:.0f} s budget", c.budget_seconds);
        }
        failures += out.pass ? 0 : 1;
        std::printf("[%s] %2d %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
