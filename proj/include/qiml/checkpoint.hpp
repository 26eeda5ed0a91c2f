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
 * Line-oriented text checkpoints.
 *
 *     qiml-checkpoint 1
 *     epoch <int>
 *     section config <lines>
 *     <key> <value to end of line>
 *     section metrics <rows>
 *     <epoch> <train_loss> <train_acc> <test_loss> <test_acc>
 *     section array <name> <count>
 *     <values, %.17g, up to 4 per line>
 *     end
 *
 * Sections appear in the order above; arrays keep insertion order.
 */
#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "metrics.hpp"

namespace qiml {

inline constexpr const char *kCheckpointMagic = "qiml-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    int epoch = 0;
    std::map<std::string, std::string> config;
    std::vector<EpochRecord> metrics;
    std::vector<std::pair<std::string, std::vector<double>>> arrays;

    [[nodiscard]] const std::vector<double> &array(const std::string &name) const {
        for (const auto &[n, v] : arrays) {
            if (n == name) {
                return v;
            }
        }
        throw FormatError("checkpoint has no array '" + name + "'");
    }

    [[nodiscard]] bool has_array(const std::string &name) const {
        for (const auto &a : arrays) {
            if (a.first == name) {
                return true;
            }
        }
        return false;
    }

    [[nodiscard]] const std::string &get(const std::string &key) const {
        const auto it = config.find(key);
        if (it == config.end()) {
            throw FormatError("checkpoint config has no key '" + key + "'");
        }
        return it->second;
    }

    friend bool operator==(const Checkpoint &, const Checkpoint &) = default;
};

namespace detail {

inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_real(const std::string &tok, const std::string &section) {
    errno = 0;
    char *end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size()) {
        throw ParseError("section " + section + ": bad number '" + tok + "'");
    }
    return v;
}

inline long parse_int(const std::string &tok, const std::string &section) {
    char *end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (tok.empty() || end != tok.c_str() + tok.size()) {
        throw ParseError("section " + section + ": bad integer '" + tok + "'");
    }
    return v;
}

} // namespace detail

inline void write_checkpoint(std::ostream &os, const Checkpoint &c) {
    os << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
    os << "epoch " << c.epoch << '\n';
    os << "section config " << c.config.size() << '\n';
    for (const auto &[k, v] : c.config) {
        if (k.empty() || k.find_first_of(" \t\n") != std::string::npos || v.find('\n') != std::string::npos) {
            throw ArgumentError("config entry '" + k + "' cannot be stored on one line");
        }
        os << k << ' ' << v << '\n';
    }
    os << "section metrics " << c.metrics.size() << '\n';
    for (const auto &r : c.metrics) {
        os << r.epoch << ' ' << detail::g17(r.train_loss) << ' ' << detail::g17(r.train_acc) << ' '
           << detail::g17(r.test_loss) << ' ' << detail::g17(r.test_acc) << '\n';
    }
    for (const auto &[name, values] : c.arrays) {
        if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) {
            throw ArgumentError("array name '" + name + "' cannot contain whitespace");
        }
        os << "section array " << name << ' ' << values.size() << '\n';
        for (std::size_t i = 0; i < values.size(); ++i) {
            os << detail::g17(values[i]) << ((i % 4 == 3 || i + 1 == values.size()) ? '\n' : ' ');
        }
    }
    os << "end\n";
}

inline Checkpoint read_checkpoint(std::istream &is) {
    Checkpoint c;
    std::string line;
    auto next = [&](const std::string &section) -> std::string {
        if (!std::getline(is, line)) {
            throw ParseError("section " + section + ": unexpected end of file");
        }
        return line;
    };
    auto words = [](const std::string &l) {
        std::istringstream ss(l);
        std::vector<std::string> w;
        for (std::string t; ss >> t;) {
            w.push_back(t);
        }
        return w;
    };

    {
        const auto head = words(next("header"));
        if (head.size() != 2 || head[0] != kCheckpointMagic) {
            throw FormatError("not a checkpoint file");
        }
        if (head[1] != std::to_string(kCheckpointVersion)) {
            throw FormatError("unsupported checkpoint version '" + head[1] + "' (expected " +
                              std::to_string(kCheckpointVersion) + ")");
        }
    }
    {
        const auto w = words(next("epoch"));
        if (w.size() != 2 || w[0] != "epoch") {
            throw ParseError("section epoch: expected 'epoch <int>'");
        }
        c.epoch = static_cast<int>(detail::parse_int(w[1], "epoch"));
    }
    {
        const auto w = words(next("config"));
        if (w.size() != 3 || w[0] != "section" || w[1] != "config") {
            throw ParseError("section config: missing header");
        }
        const long n = detail::parse_int(w[2], "config");
        for (long i = 0; i < n; ++i) {
            const std::string l = next("config");
            const auto sp = l.find(' ');
            if (sp == std::string::npos || sp == 0) {
                throw ParseError("section config: malformed entry '" + l + "'");
            }
            c.config[l.substr(0, sp)] = l.substr(sp + 1);
        }
    }
    {
        const auto w = words(next("metrics"));
        if (w.size() != 3 || w[0] != "section" || w[1] != "metrics") {
            throw ParseError("section metrics: missing header");
        }
        const long n = detail::parse_int(w[2], "metrics");
        for (long i = 0; i < n; ++i) {
            const auto r = words(next("metrics"));
            if (r.size() != 5) {
                throw ParseError("section metrics: expected 5 fields, got " + std::to_string(r.size()));
            }
            c.metrics.push_back({static_cast<int>(detail::parse_int(r[0], "metrics")),
                                 detail::parse_real(r[1], "metrics"), detail::parse_real(r[2], "metrics"),
                                 detail::parse_real(r[3], "metrics"), detail::parse_real(r[4], "metrics")});
        }
    }
    for (;;) {
        const auto w = words(next("array"));
        if (w.size() == 1 && w[0] == "end") {
            break;
        }
        if (w.size() != 4 || w[0] != "section" || w[1] != "array") {
            throw ParseError("section array: expected 'section array <name> <count>' or 'end'");
        }
        const std::string section = "array " + w[2];
        const long n = detail::parse_int(w[3], section);
        if (n < 0) {
            throw ParseError("section " + section + ": negative count");
        }
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(n));
        while (values.size() < static_cast<std::size_t>(n)) {
            const auto vals = words(next(section));
            if (vals.empty() || values.size() + vals.size() > static_cast<std::size_t>(n)) {
                throw ParseError("section " + section + ": value count does not match " + w[3]);
            }
            for (const auto &t : vals) {
                values.push_back(detail::parse_real(t, section));
            }
        }
        c.arrays.emplace_back(w[2], std::move(values));
    }
    return c;
}

/// Writes to a sibling temporary file and renames it over `path`.
inline void save_checkpoint(const std::string &path, const Checkpoint &c) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw IoError("cannot write " + tmp);
        }
        write_checkpoint(f, c);
        f.flush();
        if (!f) {
            throw IoError("write failed for " + tmp);
        }
    }
    std::filesystem::rename(tmp, path);
}

inline Checkpoint load_checkpoint(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open " + path);
    }
    return read_checkpoint(f);
}

} // namespace qiml
