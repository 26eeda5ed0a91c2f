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

#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qiml {

/// Dense row-major array of doubles.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s, double fill = 0.0)
        : shape(std::move(s)), data(element_count(shape), fill) {}
    Tensor(std::vector<std::size_t> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != element_count(shape)) {
            throw ShapeError("tensor data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_string());
        }
    }

    static std::size_t element_count(const std::vector<std::size_t> &s) {
        return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
    }

    [[nodiscard]] std::size_t rank() const { return shape.size(); }
    [[nodiscard]] std::size_t size() const { return data.size(); }

    [[nodiscard]] std::string shape_string() const {
        std::string out = "[";
        for (std::size_t i = 0; i < shape.size(); ++i) {
            out += (i ? "," : "") + std::to_string(shape[i]);
        }
        return out + "]";
    }
};

/// Images [N, H, W] with pixel values in [0, 1] and integer class labels.
struct ImageSet {
    Tensor images;
    std::vector<int> labels;
    std::string source;               ///< dataset name
    std::vector<std::string> digests; ///< "file sha256" entries of the source files

    [[nodiscard]] std::size_t size() const { return labels.size(); }
    [[nodiscard]] std::size_t height() const { return images.shape.at(1); }
    [[nodiscard]] std::size_t width() const { return images.shape.at(2); }
    [[nodiscard]] const double *image(std::size_t i) const {
        return images.data.data() + i * height() * width();
    }
};

} // namespace qiml
