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
/**
 * @file
 * Local image corpora and seeded train/test splits.
 *
 * Layout under the data directory (override with QIML_DATA_DIR):
 *
 *     mnist/   train-images-idx3-ubyte  train-labels-idx1-ubyte
 *              t10k-images-idx3-ubyte   t10k-labels-idx1-ubyte
 *     fmnist/  same four names
 *     letter/  emnist-letters-train-images-idx3-ubyte  emnist-letters-train-labels-idx1-ubyte
 *              emnist-letters-test-images-idx3-ubyte   emnist-letters-test-labels-idx1-ubyte
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "idx.hpp"
#include "random.hpp"
#include "tensor.hpp"

namespace qiml::datasets {

enum class DatasetId { MNIST, FMNIST, LETTER };

inline constexpr const char *kDataDirEnv = "QIML_DATA_DIR";

inline std::string to_string(DatasetId d) {
    switch (d) {
    case DatasetId::MNIST: return "mnist";
    case DatasetId::FMNIST: return "fmnist";
    case DatasetId::LETTER: return "letter";
    }
    return "?";
}

inline DatasetId parse_dataset(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto d : {DatasetId::MNIST, DatasetId::FMNIST, DatasetId::LETTER}) {
        if (to_string(d) == lower) {
            return d;
        }
    }
    throw ArgumentError("unknown dataset '" + std::string(name) + "' (mnist, fmnist, letter)");
}

/// QIML_DATA_DIR if set and non-empty, else ./data.
inline std::filesystem::path data_dir() {
    const char *env = std::getenv(kDataDirEnv);
    return (env != nullptr && *env != '\0') ? std::filesystem::path(env) : std::filesystem::path("data");
}

struct SplitFiles {
    std::string images;
    std::string labels;
};

/// Training split first, then the test split.
inline std::vector<SplitFiles> corpus_files(DatasetId d, const std::filesystem::path &root) {
    const auto dir = root / to_string(d);
    if (d == DatasetId::LETTER) {
        return {{(dir / "emnist-letters-train-images-idx3-ubyte").string(),
                 (dir / "emnist-letters-train-labels-idx1-ubyte").string()},
                {(dir / "emnist-letters-test-images-idx3-ubyte").string(),
                 (dir / "emnist-letters-test-labels-idx1-ubyte").string()}};
    }
    return {{(dir / "train-images-idx3-ubyte").string(), (dir / "train-labels-idx1-ubyte").string()},
            {(dir / "t10k-images-idx3-ubyte").string(), (dir / "t10k-labels-idx1-ubyte").string()}};
}

/// Letters kept: A..J (EMNIST labels 1..10), remapped to 0..9.
inline constexpr int kLetterClasses = 10;

/// Both splits of a corpus pooled in file order, after filtering, as raw
/// bytes. EMNIST stores glyphs transposed; they are flipped back here.
struct RawCorpus {
    std::string source;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;
    std::vector<int> labels;
    std::vector<std::string> digests;

    [[nodiscard]] std::size_t size() const { return labels.size(); }
};

inline RawCorpus load_raw_corpus(DatasetId d, const std::filesystem::path &root = data_dir()) {
    RawCorpus out;
    out.source = to_string(d);
    for (const auto &split : corpus_files(d, root)) {
        for (const auto *path : {&split.images, &split.labels}) {
            if (!std::filesystem::exists(*path)) {
                throw IoError("missing data file " + *path + " (set " + kDataDirEnv + " to the data directory)");
            }
        }
        const auto images = idx::read_idx(split.images);
        const auto labels = idx::to_labels(idx::read_idx(split.labels));
        if (images.magic != idx::kImageMagic) {
            throw FormatError(split.images + " is not an image file");
        }
        const std::size_t n = images.dims[0];
        if (labels.size() != n) {
            throw LengthError(split.images + " has " + std::to_string(n) + " images but " + split.labels +
                              " has " + std::to_string(labels.size()) + " labels");
        }
        if (out.rows == 0) {
            out.rows = images.dims[1];
            out.cols = images.dims[2];
        } else if (out.rows != images.dims[1] || out.cols != images.dims[2]) {
            throw FormatError(split.images + " image size differs from the other split");
        }
        const std::size_t rows = out.rows;
        const std::size_t cols = out.cols;
        const std::size_t per = rows * cols;
        for (std::size_t i = 0; i < n; ++i) {
            int label = labels[i];
            if (d == DatasetId::LETTER) {
                if (label < 1 || label > kLetterClasses) {
                    continue;
                }
                label -= 1;
            } else if (label < 0 || label > 9) {
                throw FormatError(split.labels + ": label " + std::to_string(label) + " outside 0..9");
            }
            const std::uint8_t *src = images.bytes.data() + i * per;
            if (d == DatasetId::LETTER) {
                for (std::size_t r = 0; r < rows; ++r) {
                    for (std::size_t c = 0; c < cols; ++c) {
                        out.pixels.push_back(src[c * rows + r]);
                    }
                }
            } else {
                out.pixels.insert(out.pixels.end(), src, src + per);
            }
            out.labels.push_back(label);
        }
        out.digests.push_back(std::filesystem::path(split.images).filename().string() + " " +
                              idx::sha256_file(split.images));
        out.digests.push_back(std::filesystem::path(split.labels).filename().string() + " " +
                              idx::sha256_file(split.labels));
    }
    return out;
}

/// Selected samples scaled to [0, 1].
inline ImageSet subset(const RawCorpus &pool, std::span<const std::size_t> idx) {
    ImageSet out;
    out.source = pool.source;
    out.digests = pool.digests;
    const std::size_t per = pool.rows * pool.cols;
    out.images = Tensor({idx.size(), pool.rows, pool.cols});
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= pool.size()) {
            throw IndexError("sample " + std::to_string(idx[k]) + " outside corpus of " +
                             std::to_string(pool.size()));
        }
        const std::uint8_t *src = pool.pixels.data() + idx[k] * per;
        for (std::size_t p = 0; p < per; ++p) {
            out.images.data[k * per + p] = src[p] / 255.0;
        }
        out.labels.push_back(pool.labels[idx[k]]);
    }
    return out;
}

struct Split {
    ImageSet train;
    ImageSet test;
};

/// Seeded shuffle of the pooled corpus; the first n_train shuffled indices
/// train, the next n_test test.
inline Split split_corpus(const RawCorpus &pool, std::size_t n_train, std::size_t n_test, std::uint64_t seed) {
    if (n_train == 0 || n_test == 0) {
        throw ArgumentError("split sizes must be positive");
    }
    if (n_train + n_test > pool.size()) {
        throw SizeError(pool.source + " has " + std::to_string(pool.size()) + " samples, " +
                        std::to_string(n_train + n_test) + " requested");
    }
    Rng rng(seed, 5);
    const auto order = permutation(pool.size(), rng);
    const std::span<const std::size_t> all(order);
    return {subset(pool, all.subspan(0, n_train)), subset(pool, all.subspan(n_train, n_test))};
}

inline Split load_split(DatasetId d, std::size_t n_train, std::size_t n_test, std::uint64_t seed,
                        const std::filesystem::path &root = data_dir()) {
    return split_corpus(load_raw_corpus(d, root), n_train, n_test, seed);
}

} // namespace qiml::datasets
