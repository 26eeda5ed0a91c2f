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
 * IDX containers (big-endian header, uint8 payload) and file digests.
 */
#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "tensor.hpp"

namespace qiml::idx {

inline constexpr std::uint32_t kImageMagic = 0x00000803;
inline constexpr std::uint32_t kLabelMagic = 0x00000801;

/// Raw container: dimension sizes and the uint8 payload.
struct IdxFile {
    std::uint32_t magic = 0;
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> bytes;
};

namespace detail {

inline void put_u32(std::ostream &os, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                       static_cast<char>(v)};
    os.write(b, 4);
}

inline bool get_u32(std::istream &is, std::uint32_t &v) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char *>(b), 4)) {
        return false;
    }
    v = (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
    return true;
}

inline std::ifstream open_in(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open " + path);
    }
    return f;
}

} // namespace detail

/// Parses an image (0x803, three dims) or label (0x801, one dim) container.
inline IdxFile read_idx(std::istream &is, const std::string &name = "stream") {
    IdxFile f;
    if (!detail::get_u32(is, f.magic)) {
        throw LengthError(name + ": truncated header");
    }
    std::size_t rank = 0;
    if (f.magic == kImageMagic) {
        rank = 3;
    } else if (f.magic == kLabelMagic) {
        rank = 1;
    } else {
        std::ostringstream m;
        m << name << ": bad magic 0x" << std::hex << std::setw(8) << std::setfill('0') << f.magic;
        throw FormatError(m.str());
    }
    std::size_t count = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        std::uint32_t d = 0;
        if (!detail::get_u32(is, d)) {
            throw LengthError(name + ": truncated header");
        }
        f.dims.push_back(d);
        count *= d;
    }
    f.bytes.resize(count);
    is.read(reinterpret_cast<char *>(f.bytes.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(is.gcount()) != count) {
        throw LengthError(name + ": payload has " + std::to_string(is.gcount()) + " of " +
                          std::to_string(count) + " bytes");
    }
    return f;
}

inline IdxFile read_idx(const std::string &path) {
    auto in = detail::open_in(path);
    return read_idx(in, path);
}

/// Images scaled to [0, 1] as [N, rows, cols].
inline Tensor to_images(const IdxFile &f) {
    if (f.magic != kImageMagic) {
        throw FormatError("not an image container");
    }
    Tensor t({f.dims[0], f.dims[1], f.dims[2]});
    for (std::size_t i = 0; i < f.bytes.size(); ++i) {
        t.data[i] = f.bytes[i] / 255.0;
    }
    return t;
}

inline std::vector<int> to_labels(const IdxFile &f) {
    if (f.magic != kLabelMagic) {
        throw FormatError("not a label container");
    }
    return {f.bytes.begin(), f.bytes.end()};
}

inline Tensor read_idx_images(const std::string &path) { return to_images(read_idx(path)); }
inline std::vector<int> read_idx_labels(const std::string &path) { return to_labels(read_idx(path)); }

/// Reference writer.
inline void write_idx(std::ostream &os, const IdxFile &f) {
    const std::size_t rank = f.magic == kImageMagic ? 3 : f.magic == kLabelMagic ? 1 : 0;
    if (rank == 0 || f.dims.size() != rank) {
        throw FormatError("unsupported IDX layout");
    }
    std::size_t count = 1;
    detail::put_u32(os, f.magic);
    for (auto d : f.dims) {
        detail::put_u32(os, d);
        count *= d;
    }
    if (count != f.bytes.size()) {
        throw LengthError("payload size does not match dims");
    }
    os.write(reinterpret_cast<const char *>(f.bytes.data()), static_cast<std::streamsize>(f.bytes.size()));
}

inline void write_idx(const std::string &path, const IdxFile &f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    write_idx(out, f);
}

inline IdxFile make_images(std::uint32_t n, std::uint32_t rows, std::uint32_t cols, std::vector<std::uint8_t> px) {
    return {kImageMagic, {n, rows, cols}, std::move(px)};
}

inline IdxFile make_labels(std::vector<std::uint8_t> labels) {
    const auto n = static_cast<std::uint32_t>(labels.size());
    return {kLabelMagic, {n}, std::move(labels)};
}

/// Lower-case hex SHA-256 of a file.
inline std::string sha256_file(const std::string &path) {
    auto in = detail::open_in(path);
    EVP_MD_CTX *ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("sha256 unavailable");
    }
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

} // namespace qiml::idx
