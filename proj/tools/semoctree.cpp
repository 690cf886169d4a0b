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

// semoctree: build, compress, inspect and plan on semantic octrees.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "semoctree/semoctree.hpp"

namespace so = semoctree;

namespace {

constexpr int kUsageExit = 2;

int exit_code(so::ErrorCategory c) { return 10 + static_cast<int>(c); }

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        so::detail::fail(so::ErrorCategory::io, "cannot open " + path + " for writing");
    out << text;
    if (!out)
        so::detail::fail(so::ErrorCategory::io, "write failed: " + path);
}

so::Vec2 parse_xy(const std::string& text)
{
    const auto parts = so::detail::split(text, ',');
    std::optional<double> x;
    std::optional<double> y;
    if (parts.size() == 2) {
        x = so::detail::parse_number<double>(parts[0]);
        y = so::detail::parse_number<double>(parts[1]);
    }
    if (!x || !y)
        so::detail::fail(so::ErrorCategory::invalid_argument, "expected x,y but got '" + text + "'");
    return {*x, *y};
}

std::set<so::ClassId> parse_ids(const std::string& text)
{
    std::set<so::ClassId> ids;
    if (text.empty())
        return ids;
    for (std::string_view part : so::detail::split(text, ',')) {
        const auto id = so::detail::parse_number<so::ClassId>(part);
        if (!id)
            so::detail::fail(so::ErrorCategory::invalid_argument, "bad class id list '" + text + "'");
        ids.insert(*id);
    }
    return ids;
}

struct TreeInputs {
    std::string tree_path;
    std::string weights_path;
    std::string world_path;
};

struct Loaded {
    so::SemanticOctree tree;
    so::WeightsConfig weights;
    so::ClassRegistry classes;
};

Loaded load_inputs(const TreeInputs& in)
{
    so::SemanticOctree tree = so::deserialize_tree(in.tree_path);
    so::WeightsConfig weights = so::load_weights(in.weights_path);
    if (weights.num_classes != tree.num_classes())
        so::detail::fail(so::ErrorCategory::config,
                         fmt::format("weights file has K = {} but the tree has K = {}", weights.num_classes,
                                     tree.num_classes()));
    so::ClassRegistry classes(tree.num_classes());
    if (!in.world_path.empty()) {
        const so::WorldFile wf = so::load_world(in.world_path);
        if (wf.classes.num_classes() != tree.num_classes())
            so::detail::fail(so::ErrorCategory::config, "world file and tree disagree on K");
        classes = wf.classes;
    }
    so::prepare_for_compression(tree, weights.weights);
    return {std::move(tree), std::move(weights), std::move(classes)};
}

void add_tree_inputs(CLI::App* cmd, TreeInputs& in)
{
    cmd->add_option("--tree", in.tree_path, "SOCT tree file")->required();
    cmd->add_option("--weights", in.weights_path, "Weights file")->required();
    cmd->add_option("--world", in.world_path, "World file (class names)");
}

struct PlanArgs {
    std::string start;
    std::string goal;
    std::string undesired;
    std::string relevant;
    std::string graph = "tree";
    std::size_t k = 8;
    std::size_t halton_n = 1000;
    std::optional<double> z;
    bool unknown_ok = false;
};

void add_graph_options(CLI::App* cmd, PlanArgs& a)
{
    cmd->add_option("--undesired", a.undesired, "Comma-separated undesired class ids");
    cmd->add_option("--relevant", a.relevant, "Comma-separated relevant class ids (default: weights file)");
    cmd->add_option("--graph", a.graph, "Roadmap: tree or halton")->check(CLI::IsMember({"tree", "halton"}));
    cmd->add_option("--k", a.k, "Nearest neighbours per vertex")->check(CLI::PositiveNumber);
    cmd->add_option("--halton-n", a.halton_n, "Halton roadmap size")->check(CLI::Range(2, 1000000));
    cmd->add_option("--z", a.z, "Planning slice height");
    cmd->add_flag("--unknown-ok", a.unknown_ok, "Do not treat unobserved space as undesired");
}

so::PlanQuery make_query(const PlanArgs& a, const so::WeightsConfig& w)
{
    so::PlanQuery q;
    q.undesired = parse_ids(a.undesired);
    if (a.relevant.empty())
        for (const auto& [id, beta] : w.weights.beta)
            q.relevant.insert(id);
    else
        q.relevant = parse_ids(a.relevant);
    for (so::ClassId c : q.undesired)
        q.relevant.erase(c);
    q.unknown_is_undesired = !a.unknown_ok;
    return q;
}

so::ColoredGraph make_graph(const Loaded& in, const PlanArgs& a, const so::PlanQuery& q)
{
    so::GraphOptions opts{a.z};
    if (a.graph == "halton")
        return so::halton_graph(in.tree.world(), in.tree, a.halton_n, a.k, q, opts);
    const so::CompressedTree t = so::g_tree_search(in.tree, in.weights.weights);
    return so::graph_from_tree(t, q, a.k, opts);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Semantic octree compression and planning"};
    app.require_subcommand(1);

    std::string cloud_path;
    std::string world_path;
    std::string out_path;
    std::string report_path;
    bool prune = false;
    std::size_t error_budget = 0;
    auto* build = app.add_subcommand("build", "Fuse a point cloud into a tree");
    build->add_option("--cloud", cloud_path, "Point cloud CSV")->required();
    build->add_option("--world", world_path, "World file")->required();
    build->add_option("--out", out_path, "Output SOCT file")->required();
    build->add_flag("--adhoc-prune", prune, "Collapse identical sibling leaves");
    build->add_option("--error-budget", error_budget, "Malformed lines tolerated before aborting");

    TreeInputs inputs;
    auto* compress = app.add_subcommand("compress", "Compress a tree and report what was retained");
    add_tree_inputs(compress, inputs);
    compress->add_option("--out", out_path, "Compressed leaves CSV (default stdout)");
    compress->add_option("--report", report_path, "Report file (default stdout)");

    auto* report = app.add_subcommand("report", "Retention ratios and leaf counts");
    add_tree_inputs(report, inputs);
    report->add_option("--out", out_path, "Report file (default stdout)");

    PlanArgs plan_args;
    auto* plan = app.add_subcommand("plan", "Class-ordered path search");
    add_tree_inputs(plan, inputs);
    plan->add_option("--start", plan_args.start, "Start x,y")->required();
    plan->add_option("--goal", plan_args.goal, "Goal x,y")->required();
    add_graph_options(plan, plan_args);
    plan->add_option("--out", out_path, "Plan file (default stdout)");

    std::string what = "leaves";
    auto* exp = app.add_subcommand("export", "Compressed leaves or roadmap edges as CSV");
    add_tree_inputs(exp, inputs);
    exp->add_option("--what", what, "leaves or graph")->check(CLI::IsMember({"leaves", "graph"}));
    add_graph_options(exp, plan_args);
    exp->add_option("--out", out_path, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error[usage]: " << e.what() << '\n';
        return kUsageExit;
    }

    try {
        if (*build) {
            const so::WorldFile wf = so::load_world(world_path);
            const so::CloudContents cloud = so::read_cloud(cloud_path, wf.classes.num_classes(), error_budget);
            for (const so::LineError& e : cloud.errors)
                std::cerr << fmt::format("warning[parse]: {}:{}: {}\n", cloud_path, e.line, e.message);
            so::SemanticOctree tree(wf.world, wf.classes.num_classes());
            so::BuildStats stats = so::insert_records(tree, cloud.records);
            if (prune)
                stats.pruned_nodes = so::prune_identical(tree);
            so::serialize_tree(tree, out_path);
            std::cout << fmt::format("records: {}\ninserted: {}\nskipped_low_confidence: {}\nline_errors: {}\n"
                                     "nodes: {}\npruned_nodes: {}\n",
                                     cloud.records.size(), stats.inserted, stats.skipped_low_confidence,
                                     cloud.errors.size(), tree.node_count(), stats.pruned_nodes);
        } else if (*compress || *report) {
            const Loaded in = load_inputs(inputs);
            const so::CompressedTree t = so::g_tree_search(in.tree, in.weights.weights);
            const so::InfoReport r = so::info_report(in.tree, t, in.weights.weights);
            const so::InfoReport full = so::info_report(in.tree, so::full_tree(in.tree), in.weights.weights);
            const std::string text = so::format_report(r, full, in.weights, in.classes);
            if (*compress) {
                write_output(out_path, so::export_leaves_csv(t));
                write_output(report_path, text);
            } else {
                write_output(out_path, text);
            }
        } else if (*plan) {
            const Loaded in = load_inputs(inputs);
            so::PlanQuery q = make_query(plan_args, in.weights);
            const so::ColoredGraph g = make_graph(in, plan_args, q);
            q.start = g.nearest_vertex(parse_xy(plan_args.start));
            q.goal = g.nearest_vertex(parse_xy(plan_args.goal));
            const auto result = so::class_ordered_astar(g, q);
            write_output(out_path, so::format_plan(g, result));
            return result ? 0 : 1;
        } else if (*exp) {
            const Loaded in = load_inputs(inputs);
            if (what == "leaves") {
                write_output(out_path, so::export_leaves_csv(so::g_tree_search(in.tree, in.weights.weights)));
            } else {
                const so::PlanQuery q = make_query(plan_args, in.weights);
                write_output(out_path, so::export_graph_csv(make_graph(in, plan_args, q)));
            }
        }
    } catch (const so::Error& e) {
        std::cerr << "error[" << so::to_string(e.category()) << "]: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
