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

// Discrete information measures. Everything is in bits, with the usual
// continuity conventions 0 log 0 = 0 and 0 log(0/0) = 0.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "semoctree/error.hpp"
#include "semoctree/semantics.hpp"
#include "semoctree/weights.hpp"

namespace semoctree {

namespace detail {

inline void check_distribution(std::span<const double> p, const char* who)
{
    if (p.empty())
        fail(ErrorCategory::invalid_argument, std::string(who) + ": empty distribution");
    double sum = 0.0;
    for (double v : p) {
        if (!(std::isfinite(v) && v >= 0.0))
            fail(ErrorCategory::invalid_argument, std::string(who) + ": negative or non-finite entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kProbTolerance)
        fail(ErrorCategory::invalid_argument, std::string(who) + ": distribution does not sum to 1");
}

inline double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

/// Binary entropy in bits.
inline double binary_entropy(double q) { return -(plogp(q) + plogp(1.0 - q)); }

/// Scales non-negative weights to sum to one; all-zero input stays all-zero.
inline std::vector<double> normalized(std::span<const double> w)
{
    double total = 0.0;
    for (double v : w) {
        if (!(std::isfinite(v) && v >= 0.0))
            fail(ErrorCategory::invalid_argument, "weights must be finite and non-negative");
        total += v;
    }
    std::vector<double> out(w.begin(), w.end());
    if (total > 0.0)
        for (double& v : out)
            v /= total;
    return out;
}

} // namespace detail

/// Shannon entropy H(p) = -sum p_i log2 p_i.
inline double entropy(std::span<const double> p)
{
    detail::check_distribution(p, "entropy");
    double h = 0.0;
    for (double v : p)
        h -= detail::plogp(v);
    return std::max(h, 0.0);
}

inline double kl_divergence(std::span<const double> p, std::span<const double> q)
{
    detail::require(p.size() == q.size(), ErrorCategory::invalid_argument, "kl_divergence: length mismatch");
    detail::check_distribution(p, "kl_divergence");
    detail::check_distribution(q, "kl_divergence");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0)
            continue;
        if (q[i] == 0.0)
            detail::fail(ErrorCategory::divergence_undefined, "kl_divergence: p not absolutely continuous w.r.t. q");
        d += p[i] * std::log2(p[i] / q[i]);
    }
    return std::max(d, 0.0);
}

/**
 * Weighted Jensen-Shannon divergence sum_i Pi_i KL(p_i || sum_j Pi_j p_j).
 * `pi` may be unnormalised; only relative weights matter.
 */
inline double js_divergence(std::span<const std::vector<double>> dists, std::span<const double> pi)
{
    detail::require(dists.size() == pi.size(), ErrorCategory::invalid_argument,
                    "js_divergence: one weight per distribution required");
    detail::require(!dists.empty(), ErrorCategory::invalid_argument, "js_divergence: no distributions");
    const std::size_t len = dists.front().size();
    for (const auto& d : dists) {
        detail::require(d.size() == len, ErrorCategory::invalid_argument, "js_divergence: length mismatch");
        detail::check_distribution(d, "js_divergence");
    }
    const std::vector<double> w = detail::normalized(pi);

    // Identical components give exactly zero, not rounding noise.
    const std::vector<double>* first = nullptr;
    bool identical = true;
    for (std::size_t i = 0; i < dists.size() && identical; ++i) {
        if (w[i] <= 0.0)
            continue;
        if (!first)
            first = &dists[i];
        else if (dists[i] != *first)
            identical = false;
    }
    if (identical)
        return 0.0;

    std::vector<double> mix(len, 0.0);
    for (std::size_t i = 0; i < dists.size(); ++i)
        for (std::size_t k = 0; k < len; ++k)
            mix[k] += w[i] * dists[i][k];

    double js = 0.0;
    for (std::size_t i = 0; i < dists.size(); ++i) {
        if (w[i] <= 0.0)
            continue;
        double kl = 0.0;
        for (std::size_t k = 0; k < len; ++k)
            if (dists[i][k] > 0.0)
                kl += dists[i][k] * std::log2(dists[i][k] / mix[k]);
        js += w[i] * kl;
    }
    return std::max(js, 0.0);
}

/// Mixture sum_i Pi_i p_i of child conditionals.
inline std::vector<double> aggregate_conditional(std::span<const std::vector<double>> child_dists,
                                                 std::span<const double> pi)
{
    detail::require(child_dists.size() == pi.size(), ErrorCategory::invalid_argument,
                    "aggregate_conditional: one weight per distribution required");
    detail::require(!child_dists.empty(), ErrorCategory::invalid_argument, "aggregate_conditional: no children");
    const std::size_t len = child_dists.front().size();
    for (const auto& d : child_dists)
        detail::require(d.size() == len, ErrorCategory::invalid_argument, "aggregate_conditional: length mismatch");
    const std::vector<double> w = detail::normalized(pi);

    std::vector<double> out(len, 0.0);
    for (std::size_t i = 0; i < child_dists.size(); ++i)
        for (std::size_t k = 0; k < len; ++k)
            out[k] += w[i] * child_dists[i][k];
    return out;
}

/// Child marginals of one class variable at one node.
struct ClassConditionals {
    ClassId id = 0;
    std::vector<std::vector<double>> child_marginals;
};

struct InfoIncrement {
    std::map<ClassId, double> delta_y;
    std::map<ClassId, double> delta_z;
    double delta_x = 0.0;
    double delta_j = 0.0;
};

/**
 * Information gained by splitting a node of weight `p_n` into its children:
 * delta_x = p_n H(Pi), delta_y/z = p_n JS_Pi over the class marginals, and the
 * weighted one-step reward delta_j. Classes absent from both beta and gamma
 * are ignored.
 */
inline InfoIncrement node_increments(double p_n, std::span<const double> child_weights,
                                     std::span<const ClassConditionals> conditionals,
                                     const CompressionWeights& w)
{
    detail::require(std::isfinite(p_n) && p_n >= 0.0, ErrorCategory::invalid_argument,
                    "node_increments: node weight must be non-negative");
    detail::require(!child_weights.empty(), ErrorCategory::invalid_argument, "node_increments: no children");
    const std::vector<double> pi = detail::normalized(child_weights);

    InfoIncrement inc;
    double total = 0.0;
    for (double v : pi)
        total += v;
    if (total > 0.0)
        inc.delta_x = p_n * entropy(pi);

    for (const ClassConditionals& c : conditionals) {
        detail::require(c.child_marginals.size() == pi.size(), ErrorCategory::invalid_argument,
                        "node_increments: one marginal per child required");
        const double js = total > 0.0 ? js_divergence(c.child_marginals, pi) : 0.0;
        if (auto it = w.beta.find(c.id); it != w.beta.end()) {
            inc.delta_y[c.id] = p_n * js;
            inc.delta_j += it->second * p_n * js;
        } else if (auto jt = w.gamma.find(c.id); jt != w.gamma.end()) {
            inc.delta_z[c.id] = p_n * js;
            inc.delta_j -= jt->second * p_n * js;
        }
    }
    inc.delta_j -= w.alpha * inc.delta_x;
    return inc;
}

/**
 * JS divergence of Bernoulli children given only q_i = P(y = 1 | child_i),
 * evaluated as H(sum Pi q) - sum Pi H(q_i). `pi` must already be normalised.
 */
inline double binary_js(std::span<const double> q, std::span<const double> pi)
{
    double mix = 0.0;
    double cond = 0.0;
    double first = -1.0;
    bool identical = true;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (pi[i] <= 0.0)
            continue;
        if (first < 0.0)
            first = q[i];
        else if (q[i] != first)
            identical = false;
        mix += pi[i] * q[i];
        cond += pi[i] * detail::binary_entropy(q[i]);
    }
    if (identical)
        return 0.0;
    return std::max(detail::binary_entropy(std::clamp(mix, 0.0, 1.0)) - cond, 0.0);
}

} // namespace semoctree
