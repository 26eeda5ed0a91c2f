// Copyright 2026 The qiml Authors
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
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace qiml {

/// Adam with bias correction. One moment pair per parameter block.
struct Adam {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step_count = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;

    /// Lazily sizes the moments on first use.
    void step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads,
              double lr) {
        if (params.size() != grads.size()) {
            throw ArgumentError("Adam: parameter and gradient block counts differ");
        }
        if (m.empty()) {
            for (const auto &p : params) {
                m.emplace_back(p.size(), 0.0);
                v.emplace_back(p.size(), 0.0);
            }
        }
        if (m.size() != params.size()) {
            throw ArgumentError("Adam: block count changed between steps");
        }
        ++step_count;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
        for (std::size_t b = 0; b < params.size(); ++b) {
            auto p = params[b];
            auto g = grads[b];
            auto &mb = m[b];
            auto &vb = v[b];
            if (p.size() != mb.size() || g.size() != p.size()) {
                throw ArgumentError("Adam: block size mismatch");
            }
            for (std::size_t i = 0; i < p.size(); ++i) {
                mb[i] = beta1 * mb[i] + (1.0 - beta1) * g[i];
                vb[i] = beta2 * vb[i] + (1.0 - beta2) * g[i] * g[i];
                p[i] -= lr * (mb[i] / c1) / (std::sqrt(vb[i] / c2) + eps);
            }
        }
    }
};

} // namespace qiml
