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
 * Oracle suites: closed forms and recursions checked against the
 * statevector simulator on random draws.
 */
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "activations.hpp"
#include "closedform.hpp"
#include "qsim.hpp"
#include "metrics.hpp"
#include "random.hpp"

namespace qiml::verify {

struct SuiteResult {
    std::string suite;
    int n_lo = 0;
    int n_hi = 0;
    int draws = 0;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct Options {
    int max_n = 12;
    int draws = 100;
    double tolerance = 1e-10;
    std::uint64_t seed = 1;
};

inline constexpr std::array<const char *, 7> kSuites = {"qc1", "qc2", "prop1", "xconj", "prop2", "edge", "degree"};

namespace detail {

using std::numbers::pi;

inline std::vector<double> alphas(std::span<const double> x, std::span<const double> t) {
    std::vector<double> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        a[i] = t[i] + pi * x[i];
    }
    return a;
}

inline SuiteResult finish(SuiteResult r) {
    r.pass = r.max_deviation <= r.tolerance;
    return r;
}

} // namespace detail

/// Closed-form QC1 output vs the simulator, n = 1..max_n.
inline SuiteResult qc1_equivalence(const Options &o) {
    Rng rng(o.seed, 11);
    SuiteResult r{"qc1", 1, o.max_n, o.draws, 0.0, o.tolerance};
    for (int n = 1; n <= o.max_n; ++n) {
        for (int d = 0; d < o.draws; ++d) {
            const auto x = rng.uniform_vector(static_cast<std::size_t>(n), 0, 1);
            const auto t = rng.uniform_vector(static_cast<std::size_t>(n), -detail::pi, detail::pi);
            const double dev = std::abs(closedform::o_qc1_closed(detail::alphas(x, t)) - qsim::run_qc1(x, t));
            r.max_deviation = std::max(r.max_deviation, dev);
        }
    }
    return detail::finish(r);
}

/// Closed-form QC2 output vs the simulator, n = 3..max_n.
inline SuiteResult qc2_equivalence(const Options &o) {
    Rng rng(o.seed, 12);
    SuiteResult r{"qc2", 3, o.max_n, o.draws, 0.0, o.tolerance};
    for (int n = 3; n <= o.max_n; ++n) {
        for (int d = 0; d < o.draws; ++d) {
            const auto x = rng.uniform_vector(static_cast<std::size_t>(n), 0, 1);
            const auto t = rng.uniform_vector(static_cast<std::size_t>(n), -detail::pi, detail::pi);
            const double dev = std::abs(closedform::o_qc2_closed(detail::alphas(x, t)) - qsim::run_qc2(x, t));
            r.max_deviation = std::max(r.max_deviation, dev);
        }
    }
    return detail::finish(r);
}

/// <Z...Z> of the n-qubit QC1 state = (q1^2 - p1^2) <Z...Z> of the state
/// rebuilt on qubits 3..n, with (q1, p1) the pre-entanglement amplitudes of
/// qubit 1. n = 3..min(10, max_n), 50 draws each.
inline SuiteResult prop1_recursion(const Options &o) {
    Rng rng(o.seed, 13);
    const int hi = std::min(10, o.max_n);
    SuiteResult r{"prop1", 3, hi, 50, 0.0, o.tolerance};
    for (int n = 3; n <= hi; ++n) {
        for (int d = 0; d < 50; ++d) {
            const auto x = rng.uniform_vector(static_cast<std::size_t>(n), 0, 1);
            const auto t = rng.uniform_vector(static_cast<std::size_t>(n), -detail::pi, detail::pi);
            const auto one = qsim::encode_and_rotate(std::span(x).first(1), std::span(t).first(1));
            const double q1 = one.amps()[0];
            const double p1 = one.amps()[1];
            const std::vector<double> xs(x.begin() + 2, x.end());
            const std::vector<double> ts(t.begin() + 2, t.end());
            const double rest = xs.empty() ? 1.0 : qsim::run_qc1(xs, ts);
            const double dev = std::abs(qsim::run_qc1(x, t) - (q1 * q1 - p1 * p1) * rest);
            r.max_deviation = std::max(r.max_deviation, dev);
        }
    }
    return detail::finish(r);
}

/// X on the leading qubit of a QC1 state negates <Z...Z>; 50 states of
/// 1..min(10, max_n) qubits.
inline SuiteResult x_conjugation(const Options &o) {
    Rng rng(o.seed, 14);
    const int hi = std::min(10, o.max_n);
    SuiteResult r{"xconj", 1, hi, 50, 0.0, o.tolerance};
    for (int d = 0; d < 50; ++d) {
        const int m = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(hi)));
        const auto x = rng.uniform_vector(static_cast<std::size_t>(m), 0, 1);
        const auto t = rng.uniform_vector(static_cast<std::size_t>(m), -detail::pi, detail::pi);
        const auto psi = qsim::qc1_state(x, t);
        const auto mask = qsim::QubitMask::all(m);
        const double dev = std::abs(qsim::apply_x(psi, 1).expect_z(mask) + psi.expect_z(mask));
        r.max_deviation = std::max(r.max_deviation, dev);
    }
    return detail::finish(r);
}

/// Splitting the (n-1)-qubit chain state on its last qubit into
/// |g>|0> + |t>|1>: QC2(n) = cos(alpha_n) (<g|Z|g> + <t|Z|t>) and the bracket
/// equals QC2 on the first n-2 qubits. n = 5..min(10, max_n), 50 draws.
inline SuiteResult prop2_recursion(const Options &o) {
    Rng rng(o.seed, 15);
    const int hi = std::min(10, o.max_n);
    SuiteResult r{"prop2", 5, hi, 50, 0.0, o.tolerance};
    for (int n = 5; n <= hi; ++n) {
        for (int d = 0; d < 50; ++d) {
            const auto x = rng.uniform_vector(static_cast<std::size_t>(n), 0, 1);
            const auto t = rng.uniform_vector(static_cast<std::size_t>(n), -detail::pi, detail::pi);
            auto chain = qsim::encode_and_rotate(std::span(x).first(static_cast<std::size_t>(n - 1)),
                                                 std::span(t).first(static_cast<std::size_t>(n - 1)));
            qsim::qc2_entangle(chain);
            const std::size_t bit = std::size_t{1} << (n - 2);
            double zg = 0.0;
            double zt = 0.0;
            for (std::size_t i = 0; i < chain.dim(); ++i) {
                const double p = chain.amps()[i] * chain.amps()[i];
                const double sign = (std::popcount(i & (bit - 1)) & 1) ? -1.0 : 1.0;
                ((i & bit) ? zt : zg) += sign * p;
            }
            const double alpha_n = t[static_cast<std::size_t>(n - 1)] + detail::pi * x[static_cast<std::size_t>(n - 1)];
            const std::vector<double> x2(x.begin(), x.begin() + n - 2);
            const std::vector<double> t2(t.begin(), t.begin() + n - 2);
            r.max_deviation = std::max({r.max_deviation, std::abs(qsim::run_qc2(x, t) - std::cos(alpha_n) * (zg + zt)),
                                        std::abs(zg + zt - qsim::run_qc2(x2, t2))});
        }
    }
    return detail::finish(r);
}

/// AF3 with an odd-site angle at +-pi/2 is exactly 0 on flat background
/// (x = 0) and flat interior (x = 1) patches, and clearly nonzero on
/// mid-ramp patches when every odd-site angle sits at +-pi/2.
/// max_deviation is the largest flat-patch magnitude; the ramp minimum is in
/// the note.
inline SuiteResult edge_property(const Options &o) {
    Rng rng(o.seed, 16);
    SuiteResult r{"edge", 9, 9, o.draws, 0.0, 0.0};
    double ramp_min = 1.0;
    for (int d = 0; d < o.draws; ++d) {
        auto k = activations::ActivationKernel::random(activations::Kind::AF3, 9, rng);
        const std::size_t site = 2 * rng.index(5);
        k.params[site] = rng.index(2) ? detail::pi / 2 : -detail::pi / 2;
        for (double level : {0.0, 1.0}) {
            r.max_deviation = std::max(r.max_deviation, std::abs(activations::eval(k, std::vector<double>(9, level))));
        }
        for (std::size_t i = 0; i < 9; i += 2) {
            k.params[i] = rng.index(2) ? detail::pi / 2 : -detail::pi / 2;
        }
        for (double level : {0.25, 0.5, 0.75}) {
            ramp_min = std::min(ramp_min, std::abs(activations::eval(k, std::vector<double>(9, level))));
        }
    }
    r.pass = r.max_deviation == 0.0 && ramp_min > 1e-3;
    r.note = "min |mid-ramp| " + format_double(ramp_min);
    return r;
}

/// Chebyshev projection of random QCPN circuits on n = 3..5 qubits: residual
/// at K = (n-1)(n-2) below 1e-8, and at least one draw per n whose residual at
/// K-1 is 10x larger.
inline SuiteResult degree_bound(const Options &o, int draws = 5) {
    Rng rng(o.seed, 17);
    SuiteResult r{"degree", 3, 5, draws, 0.0, 1e-8};
    bool tight = true;
    double min_ratio = 0.0;
    for (int n = 3; n <= 5; ++n) {
        const int k = qsim::qcpn_max_order(n);
        const auto nodes = closedform::chebyshev_nodes(2 * k + 8);
        double best_ratio = 0.0;
        for (int d = 0; d < draws; ++d) {
            const auto theta = rng.uniform_vector(static_cast<std::size_t>(qsim::qcpn_param_count(n)), -detail::pi,
                                                  detail::pi);
            std::vector<double> ys;
            for (double x : nodes) {
                ys.push_back(qsim::run_qcpn_circuit(x, theta, n));
            }
            const double at_k = closedform::chebyshev_project(nodes, ys, k).residual;
            const double below = closedform::chebyshev_project(nodes, ys, k - 1).residual;
            r.max_deviation = std::max(r.max_deviation, at_k);
            best_ratio = std::max(best_ratio, below / std::max(at_k, 1e-300));
        }
        tight = tight && best_ratio >= 10.0;
        min_ratio = n == 3 ? best_ratio : std::min(min_ratio, best_ratio);
    }
    r.pass = r.max_deviation < r.tolerance && tight;
    r.note = "min over n of best K-1/K residual ratio " + format_double(min_ratio);
    return r;
}

inline SuiteResult run_suite(const std::string &name, const Options &o) {
    if (name == "qc1") return qc1_equivalence(o);
    if (name == "qc2") return qc2_equivalence(o);
    if (name == "prop1") return prop1_recursion(o);
    if (name == "xconj") return x_conjugation(o);
    if (name == "prop2") return prop2_recursion(o);
    if (name == "edge") return edge_property(o);
    if (name == "degree") return degree_bound(o);
    throw ArgumentError("unknown suite '" + name + "'");
}

} // namespace qiml::verify
