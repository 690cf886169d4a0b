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

#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace so = semoctree;
using so::ErrorCategory;

namespace {

template <class F>
ErrorCategory category_of(F&& f)
{
    try {
        f();
    } catch (const so::Error& e) {
        return e.category();
    }
    ADD_FAILURE() << "no semoctree::Error thrown";
    return ErrorCategory::invalid_argument;
}

std::vector<double> sequential_bayes(std::vector<double> prior, int obs, double conf, int times)
{
    const double other = (1.0 - conf) / static_cast<double>(prior.size() - 1);
    for (int t = 0; t < times; ++t) {
        double z = 0.0;
        for (std::size_t i = 0; i < prior.size(); ++i) {
            prior[i] *= (static_cast<int>(i) == obs) ? conf : other;
            z += prior[i];
        }
        for (double& v : prior)
            v /= z;
    }
    return prior;
}

} // namespace

TEST(ClassRegistry, IdsAndRoles)
{
    so::ClassRegistry reg(4);
    EXPECT_EQ(reg.size(), 5u);
    EXPECT_EQ(reg.name(0), "free");
    reg.set_role(2, so::ClassRole::relevant);
    reg.set_role(3, so::ClassRole::irrelevant);
    EXPECT_EQ(reg.with_role(so::ClassRole::relevant), std::vector<so::ClassId>{2});
    EXPECT_FALSE(reg.contains(5));
    EXPECT_EQ(category_of([&] { reg.name(5); }), ErrorCategory::invalid_argument);
}

TEST(ExpandTruncated, SpreadsResidualUniformly)
{
    const so::TruncatedDistribution d{{{5, 0.5}, {7, 0.2}, {9, 0.1}}, 0.1, 0.1};
    const auto f = so::expand_truncated(d, 24);
    EXPECT_DOUBLE_EQ(f[5], 0.5);
    EXPECT_DOUBLE_EQ(f[7], 0.2);
    EXPECT_DOUBLE_EQ(f[9], 0.1);
    EXPECT_DOUBLE_EQ(f[0], 0.1);
    for (int i : {1, 2, 3, 4, 6, 8, 10, 24})
        EXPECT_NEAR(f[static_cast<std::size_t>(i)], 0.1 / 21, 1e-15);
}

TEST(ExpandTruncated, PointMassAndSingleOutstandingClass)
{
    const auto point = so::expand_truncated(so::TruncatedDistribution{{{1, 1.0}}, 0.0, 0.0}, 6);
    EXPECT_EQ(point.probs, (std::vector<double>{0, 1, 0, 0, 0, 0, 0}));

    const auto k4 = so::expand_truncated(so::TruncatedDistribution{{{1, 0.25}, {2, 0.25}, {3, 0.25}}, 0.125, 0.125}, 4);
    EXPECT_DOUBLE_EQ(k4[4], 0.125);
}

TEST(ExpandTruncated, RejectsSmallK)
{
    EXPECT_EQ(category_of([] { so::expand_truncated(so::TruncatedDistribution{{{1, 1.0}}, 0.0, 0.0}, 3); }),
              ErrorCategory::config);
}

TEST(TruncateFull, TieBreakAndOmittedZeros)
{
    std::vector<double> p(25, 1.0 / 24);
    p[0] = 0.0;
    const auto d = so::truncate_full(so::FullDistribution(p));
    ASSERT_EQ(d.top().size(), 3u);
    EXPECT_EQ(d.top()[0].id, 1);
    EXPECT_EQ(d.top()[1].id, 2);
    EXPECT_EQ(d.top()[2].id, 3);
    EXPECT_NEAR(d.p_residual(), 21.0 / 24, 1e-12);

    std::vector<double> free_only(25, 0.0);
    free_only[0] = 1.0;
    const auto f = so::truncate_full(so::FullDistribution(free_only));
    EXPECT_TRUE(f.top().empty());
    EXPECT_EQ(f.p_free(), 1.0);
    EXPECT_EQ(f.p_residual(), 0.0);

    std::vector<double> two(25, 0.0);
    two[3] = 0.6;
    two[8] = 0.3;
    two[0] = 0.1;
    const auto t = so::truncate_full(so::FullDistribution(two));
    ASSERT_EQ(t.top().size(), 2u);
    EXPECT_EQ(t.top()[0], (so::ClassProb{3, 0.6}));
    EXPECT_EQ(t.top()[1], (so::ClassProb{8, 0.3}));
    EXPECT_EQ(t.p_residual(), 0.0);
}

TEST(TruncatedDistribution, Validation)
{
    EXPECT_NO_THROW((so::TruncatedDistribution{{{2, 0.5}, {1, 0.3}}, 0.2, 0.0}.validate(5)));
    EXPECT_THROW((so::TruncatedDistribution{{{1, 0.3}, {2, 0.5}}, 0.2, 0.0}.validate(5)), so::Error);
    EXPECT_THROW((so::TruncatedDistribution{{{2, 0.5}, {2, 0.3}}, 0.2, 0.0}.validate(5)), so::Error);
    EXPECT_THROW((so::TruncatedDistribution{{{0, 0.5}}, 0.5, 0.0}.validate(5)), so::Error);
    EXPECT_THROW((so::TruncatedDistribution{{{1, 0.5}}, 0.4, 0.0}.validate(5)), so::Error);
    // top class below its residual share
    EXPECT_THROW((so::TruncatedDistribution{{{1, 0.3}, {2, 0.1}, {3, 0.05}}, 0.0, 0.55}.validate(5)), so::Error);
}

TEST(TruncatedDistribution, RoundTripProperty)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const int k = std::uniform_int_distribution<int>(4, 24)(rng);
        const so::TruncatedDistribution d = oracle::random_record(rng, k);
        ASSERT_NO_THROW(d.validate(k));
        const so::FullDistribution f = so::expand_truncated(d, k);
        double sum = 0.0;
        for (double v : f.probs) {
            ASSERT_GE(v, 0.0);
            sum += v;
        }
        ASSERT_NEAR(sum, 1.0, 1e-9);
        ASSERT_TRUE(so::truncate_full(f).nearly_equal(d, 1e-12)) << "trial " << trial;
    }
}

TEST(FuseObservation, SingleUpdate)
{
    const auto post = so::fuse_observation(so::uniform_distribution(4), 3, 0.9);
    EXPECT_NEAR(post[3], 0.9 / (0.9 + 4 * 0.025), 1e-12);
    EXPECT_NEAR(post[3], 0.9, 1e-12);
}

TEST(FuseObservation, TwoUpdatesMatchSequentialBayes)
{
    auto post = so::fuse_observation(so::uniform_distribution(4), 2, 0.8);
    post = so::fuse_observation(post, 2, 0.8);
    const auto ref = sequential_bayes(std::vector<double>(5, 0.2), 2, 0.8, 2);
    EXPECT_NEAR(post[2], ref[2], 1e-12);
    EXPECT_NEAR(post[2], 0.64 / 0.65, 1e-12);
}

TEST(FuseObservation, PointMassIsAbsorbing)
{
    std::vector<double> p(6, 0.0);
    p[3] = 1.0;
    const auto post = so::fuse_observation(so::FullDistribution(p), 1, 0.95);
    EXPECT_EQ(post.probs, p);
}

TEST(FuseObservation, ConfidenceRange)
{
    const auto prior = so::uniform_distribution(4);
    EXPECT_THROW(so::fuse_observation(prior, 1, 0.2), so::Error);
    EXPECT_THROW(so::fuse_observation(prior, 1, 1.01), so::Error);
    EXPECT_THROW(so::fuse_observation(prior, 7, 0.9), so::Error);
    EXPECT_NO_THROW(so::fuse_observation(prior, 1, 1.0));
}

TEST(FuseObservation, NormalizedAndApproachesPriorAtUniformConfidence)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const int k = std::uniform_int_distribution<int>(4, 12)(rng);
        const auto prior = so::expand_truncated(oracle::random_record(rng, k), k);
        const double floor = 1.0 / (k + 1);
        const double conf = floor + (1.0 - floor) * std::uniform_real_distribution<double>(1e-6, 1.0)(rng);
        const auto post = so::fuse_observation(prior, trial % (k + 1), conf);
        double sum = 0.0;
        for (double v : post.probs) {
            ASSERT_GE(v, 0.0);
            sum += v;
        }
        ASSERT_NEAR(sum, 1.0, 1e-9);

        const auto near = so::fuse_observation(prior, trial % (k + 1), floor + 1e-9);
        for (std::size_t i = 0; i < prior.size(); ++i)
            ASSERT_NEAR(near[i], prior[i], 1e-7);
    }
}

TEST(Entropy, Examples)
{
    EXPECT_EQ(so::entropy(std::vector<double>{1, 0}), 0.0);
    EXPECT_DOUBLE_EQ(so::entropy(std::vector<double>{0.5, 0.5}), 1.0);
    EXPECT_DOUBLE_EQ(so::entropy(std::vector<double>(8, 0.125)), 3.0);
    EXPECT_THROW(so::entropy(std::vector<double>{0.5, 0.6}), so::Error);
}

TEST(KlDivergence, Examples)
{
    const std::vector<double> a{0.3, 0.7};
    EXPECT_EQ(so::kl_divergence(a, a), 0.0);
    EXPECT_DOUBLE_EQ(so::kl_divergence(std::vector<double>{1, 0}, std::vector<double>{0.5, 0.5}), 1.0);
    const double ref = 0.75 * std::log2(1.5) + 0.25 * std::log2(0.5);
    EXPECT_NEAR(so::kl_divergence(std::vector<double>{0.75, 0.25}, std::vector<double>{0.5, 0.5}), ref, 1e-15);
    EXPECT_NEAR(ref, 0.188722, 1e-6);
    EXPECT_EQ(category_of([] { so::kl_divergence(std::vector<double>{0.5, 0.5}, std::vector<double>{1, 0}); }),
              ErrorCategory::divergence_undefined);
}

TEST(JsDivergence, Examples)
{
    const std::vector<std::vector<double>> same{{0.2, 0.8}, {0.2, 0.8}};
    EXPECT_EQ(so::js_divergence(same, std::vector<double>{0.3, 0.7}), 0.0);
    const std::vector<std::vector<double>> disjoint{{1, 0}, {0, 1}};
    EXPECT_DOUBLE_EQ(so::js_divergence(disjoint, std::vector<double>{0.5, 0.5}), 1.0);
    const std::vector<std::vector<double>> three{{1, 0}, {0, 1}, {0.5, 0.5}};
    const std::vector<double> pi{0.25, 0.25, 0.5};
    // oracle: mixture [0.5, 0.5]; KL of the point masses is 1 bit each, the third is 0
    EXPECT_NEAR(so::js_divergence(three, pi), 0.5, 1e-15);
    const std::vector<std::vector<double>> ragged{{1, 0}, {1.0}};
    EXPECT_THROW(so::js_divergence(ragged, std::vector<double>{0.5, 0.5}), so::Error);
}

TEST(JsDivergence, BoundedByWeightEntropyAndMatchesMutualInformation)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        const std::size_t len = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
        std::vector<std::vector<double>> dists(n, std::vector<double>(len));
        std::vector<double> pi(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (double& v : dists[i]) {
                v = u(rng) < 0.3 ? 0.0 : u(rng);
                s += v;
            }
            if (s == 0.0) {
                dists[i][0] = 1.0;
                s = 1.0;
            }
            for (double& v : dists[i])
                v /= s;
            pi[i] = u(rng);
            total += pi[i];
        }
        const double js = so::js_divergence(dists, pi);
        std::vector<double> w(pi);
        for (double& v : w)
            v /= total;
        ASSERT_LE(js, oracle::shannon(w) + 1e-12);
        std::vector<std::vector<double>> joint(n, std::vector<double>(len));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < len; ++k)
                joint[i][k] = w[i] * dists[i][k];
        ASSERT_NEAR(js, oracle::mutual_information(joint), 1e-12);

        std::vector<double> scaled(pi);
        for (double& v : scaled)
            v *= 37.5;
        ASSERT_NEAR(so::js_divergence(dists, scaled), js, 1e-12);
        const auto a = so::aggregate_conditional(dists, pi);
        const auto b = so::aggregate_conditional(dists, scaled);
        for (std::size_t k = 0; k < len; ++k)
            ASSERT_NEAR(a[k], b[k], 1e-15);
    }
}

TEST(BinaryJs, AgreesWithGeneralForm)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
        std::vector<double> q(n);
        std::vector<double> pi(n);
        std::vector<std::vector<double>> dists;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = u(rng) < 0.2 ? 0.0 : u(rng);
            pi[i] = u(rng);
            total += pi[i];
            dists.push_back({1.0 - q[i], q[i]});
        }
        for (double& v : pi)
            v /= total;
        ASSERT_NEAR(so::binary_js(q, pi), so::js_divergence(dists, pi), 1e-12);
    }
}

TEST(AggregateConditional, Examples)
{
    const std::vector<std::vector<double>> c1{{1, 0}, {0, 1}};
    EXPECT_EQ(so::aggregate_conditional(c1, std::vector<double>{0.25, 0.75}), (std::vector<double>{0.25, 0.75}));
    const std::vector<std::vector<double>> c2{{0.2, 0.8}, {0.6, 0.4}};
    const auto m = so::aggregate_conditional(c2, std::vector<double>{0.5, 0.5});
    EXPECT_NEAR(m[0], 0.4, 1e-15);
    EXPECT_NEAR(m[1], 0.6, 1e-15);
    const std::vector<std::vector<double>> c3{{0.1, 0.9}, {0.1, 0.9}, {0.1, 0.9}};
    const auto same = so::aggregate_conditional(c3, std::vector<double>{1, 2, 3});
    EXPECT_NEAR(same[0], 0.1, 1e-15);
    EXPECT_NEAR(same[1], 0.9, 1e-15);
}

TEST(NodeIncrements, Examples)
{
    so::CompressionWeights w;
    const std::vector<double> four(4, 1.0);
    EXPECT_DOUBLE_EQ(so::node_increments(0.4, four, {}, w).delta_x, 0.8);

    so::ClassConditionals same{1, {{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}}};
    w.beta[1] = 1.0;
    w.alpha = 0.5;
    const auto flat = so::node_increments(0.4, four, std::vector<so::ClassConditionals>{same}, w);
    EXPECT_EQ(flat.delta_y.at(1), 0.0);
    EXPECT_DOUBLE_EQ(flat.delta_j, -0.5 * 0.8);

    so::CompressionWeights w2;
    w2.beta[1] = 2.0;
    w2.alpha = 1.0;
    so::ClassConditionals split{1, {{1, 0}, {0, 1}}};
    const auto inc = so::node_increments(1.0, std::vector<double>{1, 1}, std::vector<so::ClassConditionals>{split}, w2);
    EXPECT_DOUBLE_EQ(inc.delta_j, 1.0);

    EXPECT_THROW(so::node_increments(-0.1, four, {}, w), so::Error);
}

TEST(NodeIncrements, SingleEffectiveChildLosesNothing)
{
    so::CompressionWeights w;
    w.beta[1] = 1.0;
    w.gamma[2] = 1.0;
    so::ClassConditionals y{1, {{0.9, 0.1}, {0.2, 0.8}, {0.5, 0.5}}};
    so::ClassConditionals z{2, {{0.4, 0.6}, {0.0, 1.0}, {1.0, 0.0}}};
    const auto inc =
        so::node_increments(2.0, std::vector<double>{0, 3, 0}, std::vector<so::ClassConditionals>{y, z}, w);
    EXPECT_EQ(inc.delta_x, 0.0);
    EXPECT_EQ(inc.delta_y.at(1), 0.0);
    EXPECT_EQ(inc.delta_z.at(2), 0.0);
}
