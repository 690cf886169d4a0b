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

#include <cmath>
#include <map>
#include <string>

#include "semoctree/semantics.hpp"

namespace semoctree {

/**
 * Trade-off between keeping relevant class information (beta, per class),
 * discarding irrelevant class information (gamma, per class) and
 * compressing the map (alpha).
 */
struct CompressionWeights {
    std::map<ClassId, double> beta;
    std::map<ClassId, double> gamma;
    double alpha = 0.0;

    void validate(int num_classes) const
    {
        auto check = [&](const std::map<ClassId, double>& m) {
            for (const auto& [id, v] : m) {
                if (id < 0 || id > num_classes)
                    detail::fail(ErrorCategory::config, "weight for class " + std::to_string(id) + " out of range");
                if (!(std::isfinite(v) && v >= 0.0))
                    detail::fail(ErrorCategory::config, "class weights must be finite and non-negative");
            }
        };
        check(beta);
        check(gamma);
        for (const auto& [id, v] : beta)
            if (gamma.contains(id))
                detail::fail(ErrorCategory::config,
                             "class " + std::to_string(id) + " is both relevant and irrelevant");
        detail::require(std::isfinite(alpha) && alpha >= 0.0, ErrorCategory::config,
                        "alpha must be finite and non-negative");
    }

    double beta_sum() const
    {
        double s = 0.0;
        for (const auto& [id, v] : beta)
            s += v;
        return s;
    }

    double gamma_sum() const
    {
        double s = 0.0;
        for (const auto& [id, v] : gamma)
            s += v;
        return s;
    }

    friend bool operator==(const CompressionWeights&, const CompressionWeights&) = default;
};

} // namespace semoctree
