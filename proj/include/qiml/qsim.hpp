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
 * Brute-force real statevector simulator for the shallow circuits studied in
 * this library (QC1, QC2, the Chebyshev circuit and single-qubit data
 * re-uploading). It is the ground truth every closed form is checked against.
 *
 * Conventions:
 *   - qubits are numbered from 1; qubit i lives in bit (i - 1) of the basis
 *     index, so qubit 1 is the least significant bit;
 *   - Ry(t) maps (a, b) -> (a cos(t/2) - b sin(t/2), a sin(t/2) + b cos(t/2));
 *   - all gates are real, so amplitudes are stored as doubles.
 */
#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qiml::qsim {

inline constexpr int kMaxQubits = 14;

enum class CircuitKind { QC1, QC2, QCPN, REUPLOAD };

/// Set of 1-based qubit indices, stored as a bit mask.
class QubitMask {
  public:
    QubitMask() = default;
    QubitMask(std::initializer_list<int> qubits) {
        for (int q : qubits) {
            add(q);
        }
    }

    /// Mask {1, ..., n}.
    static QubitMask all(int n) {
        QubitMask m;
        for (int q = 1; q <= n; ++q) {
            m.add(q);
        }
        return m;
    }

    void add(int qubit) {
        if (qubit < 1 || qubit > kMaxQubits) {
            throw IndexError("qubit index " + std::to_string(qubit) + " out of range");
        }
        bits_ |= std::uint32_t{1} << (qubit - 1);
    }

    [[nodiscard]] bool empty() const { return bits_ == 0; }
    [[nodiscard]] std::uint32_t bits() const { return bits_; }
    [[nodiscard]] int highest() const { return 32 - std::countl_zero(bits_); }

  private:
    std::uint32_t bits_ = 0;
};

class Statevector {
  public:
    /// |0...0> on `n_qubits` qubits.
    explicit Statevector(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxQubits) {
            throw SizeError("n_qubits must be in [1, " + std::to_string(kMaxQubits) +
                            "], got " + std::to_string(n_qubits));
        }
        amps_.assign(std::size_t{1} << n_qubits, 0.0);
        amps_[0] = 1.0;
    }

    [[nodiscard]] int n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::span<const double> amps() const { return amps_; }
    [[nodiscard]] std::size_t dim() const { return amps_.size(); }

    [[nodiscard]] double norm_squared() const {
        double s = 0.0;
        for (double a : amps_) {
            s += a * a;
        }
        return s;
    }

    Statevector &ry(int qubit, double angle) {
        const std::size_t bit = bit_of(qubit);
        const double c = std::cos(0.5 * angle);
        const double s = std::sin(0.5 * angle);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & bit) == 0) {
                rotate_pair(i, i | bit, c, s);
            }
        }
        return *this;
    }

    Statevector &x(int qubit) {
        const std::size_t bit = bit_of(qubit);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & bit) == 0) {
                std::swap(amps_[i], amps_[i | bit]);
            }
        }
        return *this;
    }

    Statevector &cnot(int control, int target) {
        const auto [cb, tb] = control_target_bits(control, target);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cb) != 0 && (i & tb) == 0) {
                std::swap(amps_[i], amps_[i | tb]);
            }
        }
        return *this;
    }

    Statevector &cry(int control, int target, double angle) {
        const auto [cb, tb] = control_target_bits(control, target);
        const double c = std::cos(0.5 * angle);
        const double s = std::sin(0.5 * angle);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cb) != 0 && (i & tb) == 0) {
                rotate_pair(i, i | tb, c, s);
            }
        }
        return *this;
    }

    /// <Z_{q1} Z_{q2} ...> over the qubits in `mask`.
    [[nodiscard]] double expect_z(const QubitMask &mask) const {
        if (mask.empty()) {
            throw ArgumentError("expect_z needs a non-empty qubit mask");
        }
        if (mask.highest() > n_qubits_) {
            throw IndexError("mask references qubit " + std::to_string(mask.highest()) +
                             " on a " + std::to_string(n_qubits_) + "-qubit register");
        }
        double e = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            const double p = amps_[i] * amps_[i];
            e += (std::popcount(static_cast<std::uint32_t>(i) & mask.bits()) & 1) ? -p : p;
        }
        return e;
    }

  private:
    [[nodiscard]] std::size_t bit_of(int qubit) const {
        if (qubit < 1 || qubit > n_qubits_) {
            throw IndexError("qubit " + std::to_string(qubit) + " not in [1, " +
                             std::to_string(n_qubits_) + "]");
        }
        return std::size_t{1} << (qubit - 1);
    }

    [[nodiscard]] std::pair<std::size_t, std::size_t> control_target_bits(int control,
                                                                          int target) const {
        if (control == target) {
            throw ArgumentError("control and target must differ (both " +
                                std::to_string(control) + ")");
        }
        return {bit_of(control), bit_of(target)};
    }

    void rotate_pair(std::size_t i0, std::size_t i1, double c, double s) {
        const double a = amps_[i0];
        const double b = amps_[i1];
        amps_[i0] = c * a - s * b;
        amps_[i1] = s * a + c * b;
    }

    int n_qubits_;
    std::vector<double> amps_;
};

// Value-semantics wrappers.

inline Statevector zero_state(int n_qubits) { return Statevector(n_qubits); }

inline Statevector apply_ry(Statevector state, int qubit, double angle) {
    state.ry(qubit, angle);
    return state;
}

inline Statevector apply_x(Statevector state, int qubit) {
    state.x(qubit);
    return state;
}

inline Statevector apply_cnot(Statevector state, int control, int target) {
    state.cnot(control, target);
    return state;
}

inline Statevector apply_cry(Statevector state, int control, int target, double angle) {
    state.cry(control, target, angle);
    return state;
}

inline double expect_z(const Statevector &state, const QubitMask &mask) {
    return state.expect_z(mask);
}

namespace detail {

inline void check_lengths(std::span<const double> x, std::span<const double> theta,
                          int min_qubits, const char *what) {
    if (x.size() != theta.size()) {
        throw ArgumentError(std::string(what) + ": x has " + std::to_string(x.size()) +
                            " entries but theta has " + std::to_string(theta.size()));
    }
    if (x.size() < static_cast<std::size_t>(min_qubits)) {
        throw ArgumentError(std::string(what) + " needs at least " +
                            std::to_string(min_qubits) + " qubits");
    }
    if (x.size() > static_cast<std::size_t>(kMaxQubits)) {
        throw SizeError(std::string(what) + ": too many qubits");
    }
}

} // namespace detail

/// Ry(pi x_i) encoding followed by the Ry(theta_i) variational layer.
inline Statevector encode_and_rotate(std::span<const double> x, std::span<const double> theta) {
    Statevector s(static_cast<int>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int q = static_cast<int>(i) + 1;
        s.ry(q, std::numbers::pi * x[i]);
        s.ry(q, theta[i]);
    }
    return s;
}

/**
 * QC1 entangling layer on qubits first..last: CX(first, first+1),
 * CX(first+2, first+3), ... and then CX(first+1, first+2), .... Odd-control
 * pairs (relative to `first`) go first; this is the order under which the
 * register splits recursively into qubits {first, first+1} and the rest.
 */
inline void qc1_entangle(Statevector &s, int first, int last) {
    for (int c = first; c < last; c += 2) {
        s.cnot(c, c + 1);
    }
    for (int c = first + 1; c < last; c += 2) {
        s.cnot(c, c + 1);
    }
}

/// QC2 entangling layer: sequential chain CX(1,2), CX(2,3), ..., CX(n-1,n).
inline void qc2_entangle(Statevector &s) {
    for (int c = 1; c < s.n_qubits(); ++c) {
        s.cnot(c, c + 1);
    }
}

inline Statevector qc1_state(std::span<const double> x, std::span<const double> theta) {
    detail::check_lengths(x, theta, 1, "run_qc1");
    Statevector s = encode_and_rotate(x, theta);
    qc1_entangle(s, 1, s.n_qubits());
    return s;
}

inline Statevector qc2_state(std::span<const double> x, std::span<const double> theta) {
    detail::check_lengths(x, theta, 3, "run_qc2");
    Statevector s = encode_and_rotate(x, theta);
    qc2_entangle(s);
    return s;
}

/// <Z^{(x)n}> of QC1.
inline double run_qc1(std::span<const double> x, std::span<const double> theta) {
    const Statevector s = qc1_state(x, theta);
    return s.expect_z(QubitMask::all(s.n_qubits()));
}

/// <Z^{(x)n}> of QC2 (n >= 3).
inline double run_qc2(std::span<const double> x, std::span<const double> theta) {
    const Statevector s = qc2_state(x, theta);
    return s.expect_z(QubitMask::all(s.n_qubits()));
}

/*
 * Chebyshev circuit.
 *
 * Qubits 1 and 2 are data targets and are measured with Z1 Z2. Qubits 3..n
 * form a parametric control register. The circuit runs in two stages:
 *
 *   1. preparation: (n-1) blocks, each an Ry layer on qubits 3..n followed by
 *      a CNOT chain CX(3,4), ..., CX(n-1,n);
 *   2. data loading: (n-1) rounds; in round j every register qubit k applies
 *      CRy(xi) with xi = arccos(x) to target 1 when j <= k-2 and to target 2
 *      otherwise.
 *
 * That is (n-1)(n-2) parametric angles and (n-1)(n-2) CRy gates. Targets
 * start in |0>, carry no parametric rotation, and the register is never
 * rotated after the data stage begins. Conjugation by Z1 Z2 therefore maps
 * xi -> -xi without changing the output, and no amplitude mixes branches with
 * different numbers of active CRy gates, so the output is a polynomial in x of
 * degree at most (n-1)(n-2).
 */

inline int qcpn_param_count(int n_qubits) { return (n_qubits - 1) * (n_qubits - 2); }
inline int qcpn_max_order(int n_qubits) { return (n_qubits - 1) * (n_qubits - 2); }

inline Statevector qcpn_state(double x, std::span<const double> theta, int n_qubits) {
    if (n_qubits < 3 || n_qubits > kMaxQubits) {
        throw SizeError("Chebyshev circuit needs 3.." + std::to_string(kMaxQubits) + " qubits");
    }
    if (!(std::abs(x) <= 1.0)) {
        throw DomainError("Chebyshev circuit input must lie in [-1, 1]");
    }
    if (theta.size() != static_cast<std::size_t>(qcpn_param_count(n_qubits))) {
        throw ArgumentError("Chebyshev circuit on " + std::to_string(n_qubits) + " qubits takes " +
                            std::to_string(qcpn_param_count(n_qubits)) + " angles, got " +
                            std::to_string(theta.size()));
    }
    const double xi = std::acos(x);
    Statevector s(n_qubits);
    std::size_t t = 0;
    for (int block = 0; block < n_qubits - 1; ++block) {
        for (int q = 3; q <= n_qubits; ++q) {
            s.ry(q, theta[t++]);
        }
        for (int q = 3; q < n_qubits; ++q) {
            s.cnot(q, q + 1);
        }
    }
    for (int round = 1; round <= n_qubits - 1; ++round) {
        for (int k = 3; k <= n_qubits; ++k) {
            s.cry(k, round <= k - 2 ? 1 : 2, xi);
        }
    }
    return s;
}

inline double run_qcpn_circuit(double x, std::span<const double> theta, int n_qubits) {
    return qcpn_state(x, theta, n_qubits).expect_z(QubitMask{1, 2});
}

/// Single-qubit re-uploading: Ry(theta_l) then Ry(pi x), repeated per layer.
inline double run_reuploading(double x, std::span<const double> theta, int layers) {
    if (layers <= 0) {
        throw ArgumentError("re-uploading needs at least one layer");
    }
    if (theta.size() != static_cast<std::size_t>(layers)) {
        throw ArgumentError("re-uploading expects one angle per layer");
    }
    Statevector s(1);
    for (int l = 0; l < layers; ++l) {
        s.ry(1, theta[static_cast<std::size_t>(l)]);
        s.ry(1, std::numbers::pi * x);
    }
    return s.expect_z(QubitMask{1});
}

} // namespace qiml::qsim
