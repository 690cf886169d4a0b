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
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "semoctree/error.hpp"

namespace semoctree {

using ClassId = std::int32_t;

inline constexpr ClassId kFreeClass = 0;
/// Colour of cells that were never observed.
inline constexpr ClassId kUnknownClass = -1;

/// Tolerance on probability normalisation.
inline constexpr double kProbTolerance = 1e-9;

enum class ClassRole : std::uint8_t { neutral, relevant, irrelevant };

/**
 * Class ids 0..K, where 0 is free space and 1..K are semantic categories.
 * Each id optionally carries a display name and a role that tells the
 * compressor whether its information is to be kept, removed, or ignored.
 */
class ClassRegistry {
public:
    explicit ClassRegistry(int num_classes)
        : names_(static_cast<std::size_t>(std::max(num_classes, 0)) + 1),
          roles_(names_.size(), ClassRole::neutral)
    {
        detail::require(num_classes >= 1, ErrorCategory::config, "ClassRegistry: need at least one semantic class");
        names_[0] = "free";
    }

    /// K, the number of non-free classes.
    int num_classes() const { return static_cast<int>(names_.size()) - 1; }
    /// K + 1, the size of a full distribution.
    std::size_t size() const { return names_.size(); }

    bool contains(ClassId id) const { return id >= 0 && id <= num_classes(); }

    void set_name(ClassId id, std::string name)
    {
        check(id);
        names_[static_cast<std::size_t>(id)] = std::move(name);
    }

    const std::string& name(ClassId id) const
    {
        check(id);
        return names_[static_cast<std::size_t>(id)];
    }

    void set_role(ClassId id, ClassRole role)
    {
        check(id);
        roles_[static_cast<std::size_t>(id)] = role;
    }

    ClassRole role(ClassId id) const
    {
        check(id);
        return roles_[static_cast<std::size_t>(id)];
    }

    std::vector<ClassId> with_role(ClassRole role) const
    {
        std::vector<ClassId> out;
        for (std::size_t i = 0; i < roles_.size(); ++i)
            if (roles_[i] == role)
                out.push_back(static_cast<ClassId>(i));
        return out;
    }

private:
    void check(ClassId id) const
    {
        if (!contains(id))
            detail::fail(ErrorCategory::invalid_argument, "class id " + std::to_string(id) + " out of range");
    }

    std::vector<std::string> names_;
    std::vector<ClassRole> roles_;
};

struct ClassProb {
    ClassId id = 0;
    double p = 0.0;

    friend bool operator==(const ClassProb&, const ClassProb&) = default;
};

/// Dense categorical distribution over class ids 0..K (index 0 is free space).
struct FullDistribution {
    std::vector<double> probs;

    FullDistribution() = default;
    explicit FullDistribution(std::vector<double> p) : probs(std::move(p)) {}

    std::size_t size() const { return probs.size(); }
    int num_classes() const { return static_cast<int>(probs.size()) - 1; }
    double operator[](std::size_t i) const { return probs[i]; }
    double& operator[](std::size_t i) { return probs[i]; }

    void validate() const
    {
        detail::require(probs.size() >= 2, ErrorCategory::invalid_argument, "FullDistribution: needs at least 2 entries");
        double sum = 0.0;
        for (double p : probs) {
            detail::require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorCategory::invalid_argument,
                            "FullDistribution: entry outside [0,1]");
            sum += p;
        }
        detail::require(std::abs(sum - 1.0) <= kProbTolerance, ErrorCategory::invalid_argument,
                        "FullDistribution: entries do not sum to 1");
    }

    friend bool operator==(const FullDistribution&, const FullDistribution&) = default;
};

/**
 * Compact per-leaf record: the three most likely non-free classes, the
 * free-space probability, and the residual mass shared by every other class.
 *
 * Entries with zero probability are not stored, so `top()` may hold fewer
 * than three pairs; the residual is then necessarily zero.
 */
class TruncatedDistribution {
public:
    static constexpr std::size_t kMaxTop = 3;

    TruncatedDistribution() = default;

    TruncatedDistribution(std::span<const ClassProb> top, double p_free, double p_residual)
        : p_free_(p_free), p_residual_(p_residual)
    {
        detail::require(top.size() <= kMaxTop, ErrorCategory::invalid_argument,
                        "TruncatedDistribution: more than 3 top classes");
        std::copy(top.begin(), top.end(), top_.begin());
        count_ = static_cast<std::uint8_t>(top.size());
    }

    TruncatedDistribution(std::initializer_list<ClassProb> top, double p_free, double p_residual)
        : TruncatedDistribution(std::span<const ClassProb>(top.begin(), top.size()), p_free, p_residual)
    {
    }

    std::span<const ClassProb> top() const { return {top_.data(), count_}; }
    double p_free() const { return p_free_; }
    double p_residual() const { return p_residual_; }

    /// Throws invalid_argument when the record is not a valid distribution over 0..num_classes.
    void validate(int num_classes) const
    {
        auto bad = [](const char* what) { detail::fail(ErrorCategory::invalid_argument, what); };
        auto in_unit = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };

        if (!in_unit(p_free_) || !in_unit(p_residual_))
            bad("TruncatedDistribution: probability outside [0,1]");
        double sum = p_free_ + p_residual_;
        for (std::size_t i = 0; i < count_; ++i) {
            const ClassProb& e = top_[i];
            if (e.id <= 0 || e.id > num_classes)
                bad("TruncatedDistribution: top class id out of range");
            if (!in_unit(e.p))
                bad("TruncatedDistribution: probability outside [0,1]");
            for (std::size_t j = 0; j < i; ++j) {
                if (top_[j].id == e.id)
                    bad("TruncatedDistribution: duplicate top class");
                if (top_[j].p < e.p)
                    bad("TruncatedDistribution: top classes not sorted by probability");
            }
            sum += e.p;
        }
        if (std::abs(sum - 1.0) > kProbTolerance)
            bad("TruncatedDistribution: entries do not sum to 1");
        if (count_ < kMaxTop && p_residual_ > 1e-12)
            bad("TruncatedDistribution: residual mass with fewer than 3 top classes");
        if (p_residual_ > 0.0) {
            const int outstanding = num_classes - static_cast<int>(kMaxTop);
            if (outstanding <= 0)
                bad("TruncatedDistribution: residual mass but no outstanding classes");
            const double share = p_residual_ / outstanding;
            for (std::size_t i = 0; i < count_; ++i)
                if (top_[i].p < share - 1e-12)
                    bad("TruncatedDistribution: top class below residual share");
        }
    }

    friend bool operator==(const TruncatedDistribution& a, const TruncatedDistribution& b)
    {
        return a.p_free_ == b.p_free_ && a.p_residual_ == b.p_residual_ &&
               std::ranges::equal(a.top(), b.top());
    }

    /// Field-wise equality with absolute tolerance on every probability.
    bool nearly_equal(const TruncatedDistribution& o, double tol) const
    {
        if (count_ != o.count_ || std::abs(p_free_ - o.p_free_) > tol ||
            std::abs(p_residual_ - o.p_residual_) > tol)
            return false;
        for (std::size_t i = 0; i < count_; ++i)
            if (top_[i].id != o.top_[i].id || std::abs(top_[i].p - o.top_[i].p) > tol)
                return false;
        return true;
    }

private:
    std::array<ClassProb, kMaxTop> top_{};
    std::uint8_t count_ = 0;
    double p_free_ = 1.0;
    double p_residual_ = 0.0;
};

/// Maximum-entropy distribution over 0..num_classes.
inline FullDistribution uniform_distribution(int num_classes)
{
    detail::require(num_classes >= 1, ErrorCategory::config, "uniform_distribution: need K >= 1");
    const auto n = static_cast<std::size_t>(num_classes) + 1;
    return FullDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

/// Argmax over class ids, lower id wins ties.
inline ClassId dominant_class(std::span<const double> probs)
{
    ClassId best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i)
        if (probs[i] > probs[static_cast<std::size_t>(best)])
            best = static_cast<ClassId>(i);
    return best;
}

/**
 * Rebuilds the dense distribution from a truncated record: stored classes
 * keep their value and the residual is spread evenly over the K - 3
 * classes that are neither stored nor free space.
 */
inline FullDistribution expand_truncated(const TruncatedDistribution& d, int num_classes)
{
    detail::require(num_classes >= 4, ErrorCategory::config, "expand_truncated: requires K >= 4");
    const auto n = static_cast<std::size_t>(num_classes) + 1;
    const double share = d.p_residual() / static_cast<double>(num_classes - 3);

    std::vector<double> probs(n, share);
    probs[0] = d.p_free();
    for (const ClassProb& e : d.top())
        probs[static_cast<std::size_t>(e.id)] = e.p;
    return FullDistribution(std::move(probs));
}

inline FullDistribution expand_truncated(const TruncatedDistribution& d, const ClassRegistry& reg)
{
    return expand_truncated(d, reg.num_classes());
}

inline TruncatedDistribution truncate_full(const FullDistribution& f)
{
    const std::size_t n = f.size();
    detail::require(n >= 2, ErrorCategory::invalid_argument, "truncate_full: empty distribution");

    std::vector<ClassId> order(n - 1);
    std::iota(order.begin(), order.end(), ClassId{1});
    const std::size_t k = std::min(TruncatedDistribution::kMaxTop, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](ClassId a, ClassId b) {
                          const double pa = f.probs[static_cast<std::size_t>(a)];
                          const double pb = f.probs[static_cast<std::size_t>(b)];
                          return pa > pb || (pa == pb && a < b);
                      });

    std::array<ClassProb, TruncatedDistribution::kMaxTop> top{};
    std::size_t count = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double p = f.probs[static_cast<std::size_t>(order[i])];
        if (p <= 0.0)
            break;
        top[count++] = {order[i], p};
    }

    // Summed from the tail rather than 1 - free - top so an empty tail stays exactly zero.
    double residual = 0.0;
    if (count == TruncatedDistribution::kMaxTop)
        for (std::size_t i = k; i < order.size(); ++i)
            residual += f.probs[static_cast<std::size_t>(order[i])];
    return TruncatedDistribution(std::span<const ClassProb>(top.data(), count), f.probs[0], residual);
}

/**
 * Bayesian update with a symmetric-confusion likelihood: the observed class
 * has likelihood `confidence`, every other class (1 - confidence) / K.
 *
 * An observation with zero likelihood under the prior (e.g. a point-mass
 * prior contradicted at confidence 1) leaves the prior unchanged.
 */
inline FullDistribution fuse_observation(const FullDistribution& prior, ClassId obs_class, double confidence)
{
    const int num_classes = prior.num_classes();
    detail::require(num_classes >= 1, ErrorCategory::invalid_argument, "fuse_observation: empty prior");
    if (obs_class < 0 || obs_class > num_classes)
        detail::fail(ErrorCategory::invalid_argument, "fuse_observation: class id out of range");
    const double uninformative = 1.0 / static_cast<double>(num_classes + 1);
    if (!(confidence > uninformative && confidence <= 1.0))
        detail::fail(ErrorCategory::invalid_argument, "fuse_observation: confidence must lie in (1/(K+1), 1]");

    const double miss = (1.0 - confidence) / static_cast<double>(num_classes);
    FullDistribution post = prior;
    double total = 0.0;
    for (std::size_t k = 0; k < post.size(); ++k) {
        post.probs[k] *= (static_cast<ClassId>(k) == obs_class) ? confidence : miss;
        total += post.probs[k];
    }
    if (!(total > 0.0))
        return prior;
    for (double& p : post.probs)
        p /= total;
    return post;
}

} // namespace semoctree
