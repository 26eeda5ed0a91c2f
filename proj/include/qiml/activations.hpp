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
 * Patch-level activation kernels for the quantum-filter convolution.
 *
 * A kernel maps a flattened 3x3 patch (row-major, pixel values in [0, 1]) to
 * one scalar. With theta_i = pi x_i and 1-based site parity:
 *
 *   AF1 = tanh(sum_i w_i x_i + b)
 *   AF2 = tanh(sum_{i odd} w_i x_i + b)
 *   AF3 = -prod_{i odd} cos(phi_i + theta_i)
 *   AF4 =  prod_{i even} cos(phi_i + theta_i)
 *   AF5 =  prod_{i} cos(phi_i + theta_i)
 *   F1  =  prod_{i even} (cos phi_i + cos theta_i) + prod_{i odd} (sin phi_i + cos theta_i)
 *   F2  =  prod_{i even} (cos phi_i + cos theta_i)
 *   F3  =  prod_{i} cos phi_i cos theta_i
 *
 * Parameter layout: AF1 is (w_1..w_L, b); AF2 is (w for each odd site, b);
 * every other kind stores one angle phi_i per site, unwrapped.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "random.hpp"
#include "trig.hpp"

namespace qiml::activations {

enum class Kind { AF1, AF2, AF3, AF4, AF5, F1, F2, F3 };

inline constexpr std::array<Kind, 8> kAllKinds = {Kind::AF1, Kind::AF2, Kind::AF3, Kind::AF4,
                                                  Kind::AF5, Kind::F1,  Kind::F2,  Kind::F3};

inline std::string to_string(Kind k) {
    switch (k) {
    case Kind::AF1: return "af1";
    case Kind::AF2: return "af2";
    case Kind::AF3: return "af3";
    case Kind::AF4: return "af4";
    case Kind::AF5: return "af5";
    case Kind::F1: return "f1";
    case Kind::F2: return "f2";
    case Kind::F3: return "f3";
    }
    return "?";
}

inline Kind parse_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (Kind k : kAllKinds) {
        if (to_string(k) == lower) {
            return k;
        }
    }
    throw ArgumentError("unknown activation kind '" + std::string(name) + "'");
}

/// True for kinds parameterized by angles rather than weights.
constexpr bool is_angle_kind(Kind k) { return k != Kind::AF1 && k != Kind::AF2; }

inline std::size_t param_count(Kind k, std::size_t patch_len) {
    switch (k) {
    case Kind::AF1: return patch_len + 1;
    case Kind::AF2: return (patch_len + 1) / 2 + 1;
    default: return patch_len;
    }
}

struct ActivationKernel {
    Kind kind = Kind::AF3;
    std::size_t patch_len = 9;
    std::vector<double> params;

    ActivationKernel() : params(param_count(kind, patch_len), 0.0) {}

    ActivationKernel(Kind k, std::size_t len, std::vector<double> p)
        : kind(k), patch_len(len), params(std::move(p)) {
        if (patch_len == 0) {
            throw ArgumentError("patch length must be positive");
        }
        if (params.size() != param_count(kind, patch_len)) {
            throw ArgumentError(to_string(kind) + " on a " + std::to_string(patch_len) +
                                "-site patch takes " +
                                std::to_string(param_count(kind, patch_len)) +
                                " parameters, got " + std::to_string(params.size()));
        }
    }

    /// Angles uniform on [-pi, pi); weights Glorot-uniform over the active
    /// sites with zero bias.
    static ActivationKernel random(Kind k, std::size_t len, Rng &rng) {
        std::vector<double> p(param_count(k, len), 0.0);
        if (is_angle_kind(k)) {
            for (auto &v : p) {
                v = rng.uniform(-std::numbers::pi, std::numbers::pi);
            }
        } else {
            const double fan_in = static_cast<double>(p.size() - 1);
            const double limit = std::sqrt(6.0 / (fan_in + 1.0));
            for (std::size_t i = 0; i + 1 < p.size(); ++i) {
                p[i] = rng.uniform(-limit, limit);
            }
        }
        return {k, len, std::move(p)};
    }
};

/// cos/sin of every angle parameter, computed once per parameter update.
/// Angles at odd multiples of pi/2 give exact zeros (see trig.hpp).
struct KernelTrig {
    std::vector<double> cos_phi;
    std::vector<double> sin_phi;

    KernelTrig() = default;
    explicit KernelTrig(const ActivationKernel &k) { update(k); }

    void update(const ActivationKernel &k) {
        cos_phi.resize(k.params.size());
        sin_phi.resize(k.params.size());
        for (std::size_t i = 0; i < k.params.size(); ++i) {
            cos_phi[i] = cos_rad(k.params[i]);
            sin_phi[i] = sin_rad(k.params[i]);
        }
    }
};

/// One patch with cos/sin of the encoded angles theta_i = pi x_i.
struct PatchView {
    std::span<const double> x;
    std::span<const double> cos_theta;
    std::span<const double> sin_theta;
};

namespace detail {

inline constexpr std::size_t kMaxSites = 64;

// out[j] = prod_{i != j} f[i]
inline void products_except(std::span<const double> f, std::span<double> out) {
    double prefix = 1.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        out[j] = prefix;
        prefix *= f[j];
    }
    double suffix = 1.0;
    for (std::size_t j = f.size(); j-- > 0;) {
        out[j] *= suffix;
        suffix *= f[j];
    }
}

// 0-based offsets of 1-based odd (first = 0) or even (first = 1) sites.
struct Sites {
    std::array<std::size_t, kMaxSites> idx{};
    std::size_t n = 0;
};

inline Sites sites(std::size_t patch_len, std::size_t first, std::size_t step) {
    Sites s;
    for (std::size_t i = first; i < patch_len; i += step) {
        s.idx[s.n++] = i;
    }
    return s;
}

// Value and (optionally) accumulated scale * d/dparams for one patch.
inline double eval_impl(const ActivationKernel &k, const KernelTrig &trig, const PatchView &p,
                        double *grad, double scale) {
    const std::size_t len = k.patch_len;
    const auto &w = k.params;
    std::array<double, kMaxSites> f{};
    std::array<double, kMaxSites> others{};

    // prod over `s` of cos(phi_i + theta_i) with sign; d/dphi_j = -sign sin(..) others_j
    auto cos_sum_product = [&](const Sites &s, double sign) {
        for (std::size_t m = 0; m < s.n; ++m) {
            const std::size_t i = s.idx[m];
            f[m] = trig.cos_phi[i] * p.cos_theta[i] - trig.sin_phi[i] * p.sin_theta[i];
        }
        double prod = sign;
        for (std::size_t m = 0; m < s.n; ++m) {
            prod *= f[m];
        }
        if (grad) {
            products_except(std::span<const double>(f.data(), s.n), std::span<double>(others.data(), s.n));
            for (std::size_t m = 0; m < s.n; ++m) {
                const std::size_t i = s.idx[m];
                const double sin_alpha =
                    trig.sin_phi[i] * p.cos_theta[i] + trig.cos_phi[i] * p.sin_theta[i];
                grad[i] += scale * (-sign) * sin_alpha * others[m];
            }
        }
        return prod;
    };

    // prod over `s` of (g(phi_i) + cos theta_i), g = cos or sin
    auto shifted_product = [&](const Sites &s, bool use_sin) {
        for (std::size_t m = 0; m < s.n; ++m) {
            const std::size_t i = s.idx[m];
            f[m] = (use_sin ? trig.sin_phi[i] : trig.cos_phi[i]) + p.cos_theta[i];
        }
        double prod = 1.0;
        for (std::size_t m = 0; m < s.n; ++m) {
            prod *= f[m];
        }
        if (grad) {
            products_except(std::span<const double>(f.data(), s.n), std::span<double>(others.data(), s.n));
            for (std::size_t m = 0; m < s.n; ++m) {
                const std::size_t i = s.idx[m];
                const double dg = use_sin ? trig.cos_phi[i] : -trig.sin_phi[i];
                grad[i] += scale * dg * others[m];
            }
        }
        return prod;
    };

    auto tanh_unit = [&](const Sites &s) {
        double pre = w.back();
        for (std::size_t m = 0; m < s.n; ++m) {
            pre += w[m] * p.x[s.idx[m]];
        }
        const double y = std::tanh(pre);
        if (grad) {
            const double d = scale * (1.0 - y * y);
            for (std::size_t m = 0; m < s.n; ++m) {
                grad[m] += d * p.x[s.idx[m]];
            }
            grad[w.size() - 1] += d;
        }
        return y;
    };

    switch (k.kind) {
    case Kind::AF1: return tanh_unit(sites(len, 0, 1));
    case Kind::AF2: return tanh_unit(sites(len, 0, 2));
    case Kind::AF3: return cos_sum_product(sites(len, 0, 2), -1.0);
    case Kind::AF4: return cos_sum_product(sites(len, 1, 2), 1.0);
    case Kind::AF5: return cos_sum_product(sites(len, 0, 1), 1.0);
    case Kind::F1:
        return shifted_product(sites(len, 1, 2), false) + shifted_product(sites(len, 0, 2), true);
    case Kind::F2: return shifted_product(sites(len, 1, 2), false);
    case Kind::F3: {
        const Sites s = sites(len, 0, 1);
        for (std::size_t i = 0; i < len; ++i) {
            f[i] = trig.cos_phi[i] * p.cos_theta[i];
        }
        double prod = 1.0;
        for (std::size_t i = 0; i < len; ++i) {
            prod *= f[i];
        }
        if (grad) {
            products_except(std::span<const double>(f.data(), s.n), std::span<double>(others.data(), s.n));
            for (std::size_t i = 0; i < len; ++i) {
                grad[i] += scale * (-trig.sin_phi[i] * p.cos_theta[i]) * others[i];
            }
        }
        return prod;
    }
    }
    return 0.0;
}

inline void check_patch(const ActivationKernel &k, std::size_t n) {
    if (n != k.patch_len) {
        throw ArgumentError("patch has " + std::to_string(n) + " entries, kernel expects " +
                            std::to_string(k.patch_len));
    }
    if (k.patch_len > kMaxSites) {
        throw ArgumentError("patch length exceeds " + std::to_string(kMaxSites));
    }
}

struct EncodedPatch {
    std::vector<double> cos_theta;
    std::vector<double> sin_theta;

    explicit EncodedPatch(std::span<const double> x) : cos_theta(x.size()), sin_theta(x.size()) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            cos_theta[i] = cospi(x[i]);
            sin_theta[i] = sinpi(x[i]);
        }
    }
};

} // namespace detail

/// Hot-path evaluation with precomputed trigonometry.
inline double eval(const ActivationKernel &k, const KernelTrig &trig, const PatchView &p) {
    return detail::eval_impl(k, trig, p, nullptr, 0.0);
}

/// Hot-path evaluation that also adds scale * d(out)/d(params) into `grad`.
inline double eval_accumulate_grad(const ActivationKernel &k, const KernelTrig &trig,
                                   const PatchView &p, std::span<double> grad, double scale) {
    return detail::eval_impl(k, trig, p, grad.data(), scale);
}

inline double eval(const ActivationKernel &k, std::span<const double> patch) {
    detail::check_patch(k, patch.size());
    const detail::EncodedPatch enc(patch);
    const KernelTrig trig(k);
    return eval(k, trig, {patch, enc.cos_theta, enc.sin_theta});
}

inline std::vector<double> grad_params(const ActivationKernel &k, std::span<const double> patch) {
    detail::check_patch(k, patch.size());
    const detail::EncodedPatch enc(patch);
    const KernelTrig trig(k);
    std::vector<double> g(k.params.size(), 0.0);
    eval_accumulate_grad(k, trig, {patch, enc.cos_theta, enc.sin_theta}, g, 1.0);
    return g;
}

/// Kernel response along a list of patches, e.g. a background-to-interior ramp.
inline std::vector<double> edge_response_profile(const ActivationKernel &k,
                                                 const std::vector<std::vector<double>> &ramp) {
    std::vector<double> out;
    out.reserve(ramp.size());
    for (const auto &patch : ramp) {
        out.push_back(eval(k, patch));
    }
    return out;
}

/// `steps` uniform patches rising from 0 (background) to 1 (interior).
inline std::vector<std::vector<double>> make_edge_ramp(std::size_t patch_len, std::size_t steps) {
    std::vector<std::vector<double>> ramp;
    for (std::size_t s = 0; s < steps; ++s) {
        const double level = steps > 1 ? static_cast<double>(s) / static_cast<double>(steps - 1) : 0.0;
        ramp.emplace_back(patch_len, level);
    }
    return ramp;
}

} // namespace qiml::activations
