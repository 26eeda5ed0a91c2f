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
 * Model <-> checkpoint conversion, including optimizer moments so a resumed
 * run continues exactly where it stopped.
 */
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "activations.hpp"
#include "checkpoint.hpp"
#include "nngine.hpp"
#include "optim.hpp"
#include "qcpn.hpp"

namespace qiml::persist {

using Config = std::map<std::string, std::string>;

namespace detail {

inline long to_long(const Checkpoint &c, const std::string &key) {
    const auto &v = c.get(key);
    try {
        std::size_t pos = 0;
        const long r = std::stol(v, &pos);
        if (pos == v.size()) {
            return r;
        }
    } catch (const std::exception &) {
    }
    throw FormatError("config '" + key + "' is not an integer: '" + v + "'");
}

inline double to_double(const Checkpoint &c, const std::string &key) {
    return qiml::detail::parse_real(c.get(key), "config");
}

inline void copy_into(std::span<double> dst, const std::vector<double> &src, const std::string &name) {
    if (dst.size() != src.size()) {
        throw FormatError("array '" + name + "' has " + std::to_string(src.size()) + " values, model expects " +
                          std::to_string(dst.size()));
    }
    std::copy(src.begin(), src.end(), dst.begin());
}

inline void save_adam(Checkpoint &c, const Adam &a, const std::vector<std::string> &names) {
    c.config["adam.beta1"] = qiml::detail::g17(a.beta1);
    c.config["adam.beta2"] = qiml::detail::g17(a.beta2);
    c.config["adam.eps"] = qiml::detail::g17(a.eps);
    c.config["adam.step"] = std::to_string(a.step_count);
    for (std::size_t i = 0; i < a.m.size(); ++i) {
        c.arrays.emplace_back("adam.m." + names[i], a.m[i]);
        c.arrays.emplace_back("adam.v." + names[i], a.v[i]);
    }
}

inline Adam load_adam(const Checkpoint &c, const std::vector<std::pair<std::string, std::size_t>> &blocks) {
    Adam a;
    a.beta1 = to_double(c, "adam.beta1");
    a.beta2 = to_double(c, "adam.beta2");
    a.eps = to_double(c, "adam.eps");
    a.step_count = to_long(c, "adam.step");
    if (a.step_count > 0) {
        for (const auto &[name, size] : blocks) {
            a.m.push_back(c.array("adam.m." + name));
            a.v.push_back(c.array("adam.v." + name));
            if (a.m.back().size() != size || a.v.back().size() != size) {
                throw FormatError("optimizer moments for '" + name + "' have the wrong size");
            }
        }
    }
    return a;
}

template <class Blocks>
std::vector<std::string> names_of(const Blocks &blocks) {
    std::vector<std::string> out;
    for (const auto &b : blocks) {
        if constexpr (requires { b.name; }) {
            out.push_back(b.name);
        } else {
            out.push_back(b.first);
        }
    }
    return out;
}

inline std::vector<double> domain_array(const std::vector<qcpn::Interval> &d) {
    std::vector<double> out;
    for (const auto &iv : d) {
        out.push_back(iv.lo);
        out.push_back(iv.hi);
    }
    return out;
}

inline std::vector<qcpn::Interval> domain_from(const Checkpoint &c) {
    const auto &a = c.array("domain");
    if (a.empty() || a.size() % 2 != 0) {
        throw FormatError("domain array must hold lo/hi pairs");
    }
    std::vector<qcpn::Interval> d;
    for (std::size_t i = 0; i < a.size(); i += 2) {
        d.push_back({a[i], a[i + 1]});
    }
    return d;
}

inline void expect_model(const Checkpoint &c, const std::string &kind) {
    if (c.get("model") != kind) {
        throw FormatError("checkpoint holds a '" + c.get("model") + "' model, expected '" + kind + "'");
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// CNN

inline Checkpoint to_checkpoint(const nngine::CnnModel &model, const Config &run, int epoch,
                                const std::vector<EpochRecord> &metrics) {
    auto m = model; // blocks() needs mutable spans
    Checkpoint c;
    c.epoch = epoch;
    c.metrics = metrics;
    c.config = run;
    const auto &cfg = m.config;
    c.config["model"] = "cnn";
    c.config["activation"] = activations::to_string(cfg.kind);
    c.config["height"] = std::to_string(cfg.height);
    c.config["width"] = std::to_string(cfg.width);
    c.config["channels"] = std::to_string(cfg.channels);
    c.config["kernel"] = std::to_string(cfg.kernel);
    c.config["hidden"] = std::to_string(cfg.hidden);
    c.config["classes"] = std::to_string(cfg.classes);
    const auto blocks = m.blocks();
    for (const auto &b : blocks) {
        c.arrays.emplace_back(b.name, std::vector<double>(b.values.begin(), b.values.end()));
    }
    detail::save_adam(c, m.adam, detail::names_of(blocks));
    return c;
}

inline nngine::CnnModel cnn_from_checkpoint(const Checkpoint &c) {
    detail::expect_model(c, "cnn");
    nngine::CnnConfig cfg;
    cfg.kind = activations::parse_kind(c.get("activation"));
    cfg.height = static_cast<std::size_t>(detail::to_long(c, "height"));
    cfg.width = static_cast<std::size_t>(detail::to_long(c, "width"));
    cfg.channels = static_cast<std::size_t>(detail::to_long(c, "channels"));
    cfg.kernel = static_cast<std::size_t>(detail::to_long(c, "kernel"));
    cfg.hidden = static_cast<std::size_t>(detail::to_long(c, "hidden"));
    cfg.classes = static_cast<std::size_t>(detail::to_long(c, "classes"));
    auto m = nngine::CnnModel::zeros(cfg);
    std::vector<std::pair<std::string, std::size_t>> sizes;
    for (auto &b : m.blocks()) {
        detail::copy_into(b.values, c.array(b.name), b.name);
        sizes.emplace_back(b.name, b.values.size());
    }
    m.adam = detail::load_adam(c, sizes);
    return m;
}

// ---------------------------------------------------------------------------
// Regression models

inline Checkpoint to_checkpoint(const qcpn::HybridQcpn &model, const Config &run, int epoch,
                                const std::vector<EpochRecord> &metrics) {
    auto m = model;
    Checkpoint c;
    c.epoch = epoch;
    c.metrics = metrics;
    c.config = run;
    c.config["model"] = "qcpn";
    c.config["terms"] = std::to_string(m.terms);
    c.config["order"] = std::to_string(m.order);
    c.arrays.emplace_back("domain", detail::domain_array(m.domain));
    const auto blocks = m.blocks();
    for (const auto &[name, values] : blocks) {
        c.arrays.emplace_back(name, std::vector<double>(values.begin(), values.end()));
    }
    detail::save_adam(c, m.adam, detail::names_of(blocks));
    return c;
}

inline qcpn::HybridQcpn qcpn_from_checkpoint(const Checkpoint &c) {
    detail::expect_model(c, "qcpn");
    auto m = qcpn::HybridQcpn::zeros(detail::domain_from(c), static_cast<std::size_t>(detail::to_long(c, "terms")),
                                     static_cast<int>(detail::to_long(c, "order")));
    std::vector<std::pair<std::string, std::size_t>> sizes;
    for (auto &[name, values] : m.blocks()) {
        detail::copy_into(values, c.array(name), name);
        sizes.emplace_back(name, values.size());
    }
    m.adam = detail::load_adam(c, sizes);
    return m;
}

inline Checkpoint to_checkpoint(const qcpn::BaselineNn &model, const Config &run, int epoch,
                                const std::vector<EpochRecord> &metrics) {
    auto m = model;
    Checkpoint c;
    c.epoch = epoch;
    c.metrics = metrics;
    c.config = run;
    c.config["model"] = "baseline";
    c.config["hidden"] = std::to_string(m.hidden);
    c.arrays.emplace_back("domain", detail::domain_array(m.domain));
    const auto blocks = m.blocks();
    for (const auto &[name, values] : blocks) {
        c.arrays.emplace_back(name, std::vector<double>(values.begin(), values.end()));
    }
    detail::save_adam(c, m.adam, detail::names_of(blocks));
    return c;
}

inline qcpn::BaselineNn baseline_from_checkpoint(const Checkpoint &c) {
    detail::expect_model(c, "baseline");
    auto m = qcpn::BaselineNn::zeros(detail::domain_from(c), static_cast<std::size_t>(detail::to_long(c, "hidden")));
    std::vector<std::pair<std::string, std::size_t>> sizes;
    for (auto &[name, values] : m.blocks()) {
        detail::copy_into(values, c.array(name), name);
        sizes.emplace_back(name, values.size());
    }
    m.adam = detail::load_adam(c, sizes);
    return m;
}

} // namespace qiml::persist
