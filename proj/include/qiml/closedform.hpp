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
 * Analytic outputs of the shallow circuits and the Chebyshev tools built on
 * them. Each evaluator here has a brute-force counterpart in qsim.hpp.
 *
 * Index parity is 1-based: "odd" sites are 1, 3, 5, ....
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "qsim.hpp"
#include "random.hpp"

namespace qiml::closedform {

/// Qubits whose angle enters the QC1 output: odd sites for odd n; odd sites
/// up to n-3 plus site n for even n.
inline std::vector<int> qc1_support(int n) {
    std::vector<int> s;
    if (n % 2 == 1) {
        for (int i = 1; i <= n; i += 2) {
            s.push_back(i);
        }
    } else {
        for (int i = 1; i <= n - 3; i += 2) {
            s.push_back(i);
        }
        s.push_back(n);
    }
    return s;
}

/// Qubits whose angle enters the QC2 output: sites of the same parity as n.
inline std::vector<int> qc2_support(int n) {
    std::vector<int> s;
    for (int i = 2 - n % 2; i <= n; i += 2) {
        s.push_back(i);
    }
    return s;
}

inline double cos_product(std::span<const double> alphas, const std::vector<int> &sites) {
    double p = 1.0;
    for (int i : sites) {
        p *= std::cos(alphas[static_cast<std::size_t>(i - 1)]);
    }
    return p;
}

/**
 * QC1 output as a function of alpha_i = theta_i + pi x_i.
 *
 * The product runs over qc1_support(n) with a positive sign. The negative
 * leading sign sometimes quoted for this circuit corresponds to measuring
 * -Z; the simulator's <Z> convention gives +.
 */
inline double o_qc1_closed(std::span<const double> alphas) {
    if (alphas.empty()) {
        throw ArgumentError("o_qc1_closed needs at least one angle");
    }
    return cos_product(alphas, qc1_support(static_cast<int>(alphas.size())));
}

/// QC2 output: product of cos(alpha_i) over sites with the parity of n.
inline double o_qc2_closed(std::span<const double> alphas) {
    if (alphas.size() < 3) {
        throw ArgumentError("o_qc2_closed needs at least 3 angles");
    }
    return cos_product(alphas, qc2_support(static_cast<int>(alphas.size())));
}

/// Branch label and site list of the widely quoted four-branch QC2 formula.
/// The site list is empty when the branch references a site beyond n.
struct PrintedQc2Branch {
    std::string id;
    std::optional<std::vector<int>> sites;
};

inline PrintedQc2Branch printed_qc2_branch(int n) {
    // (descending product start, lower bound, trailing pair)
    struct Row {
        const char *id;
        int bound;
        int a;
        int b;
    };
    static constexpr Row rows[4] = {
        {"4+4m", 4, 3, 1}, {"5+4m", 5, 3, 1}, {"6+4m", 6, 4, 2}, {"3+4m", 5, 5, 2}};
    const Row &r = rows[n % 4];
    PrintedQc2Branch out{r.id, std::nullopt};
    std::vector<int> sites;
    for (int i = n - 2; i > r.bound; i -= 4) {
        sites.push_back(i);
    }
    sites.push_back(r.a);
    sites.push_back(r.b);
    if (std::all_of(sites.begin(), sites.end(), [n](int i) { return i >= 1 && i <= n; })) {
        std::sort(sites.begin(), sites.end());
        out.sites = std::move(sites);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Chebyshev polynomials

/// T_k(x) by the three-term recurrence. Valid for any x; outside [-1, 1] the
/// result is an extrapolation (see chebyshev_t_checked).
inline double chebyshev_t(int k, double x) {
    if (k < 0) {
        throw ArgumentError("Chebyshev order must be non-negative");
    }
    if (k == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double cur = x;
    for (int i = 1; i < k; ++i) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

struct CheckedValue {
    double value;
    bool extrapolated;
};

inline CheckedValue chebyshev_t_checked(int k, double x) {
    return {chebyshev_t(k, x), !(std::abs(x) <= 1.0)};
}

/// T_0(x), ..., T_K(x) into `out` (size K + 1).
inline void chebyshev_basis(double x, std::span<double> out) {
    if (out.empty()) {
        return;
    }
    out[0] = 1.0;
    if (out.size() > 1) {
        out[1] = x;
    }
    for (std::size_t i = 2; i < out.size(); ++i) {
        out[i] = 2.0 * x * out[i - 1] - out[i - 2];
    }
}

inline std::vector<double> chebyshev_basis(double x, int max_order) {
    std::vector<double> t(static_cast<std::size_t>(max_order) + 1);
    chebyshev_basis(x, t);
    return t;
}

/// Chebyshev-Gauss abscissae cos(pi (j + 1/2) / m), j = 0..m-1.
inline std::vector<double> chebyshev_nodes(int m) {
    std::vector<double> x(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        x[static_cast<std::size_t>(j)] = std::cos(std::numbers::pi * (j + 0.5) / m);
    }
    return x;
}

struct ChebyshevCoeffs {
    std::vector<double> coeffs; ///< c_0..c_K

    [[nodiscard]] int max_order() const { return static_cast<int>(coeffs.size()) - 1; }

    [[nodiscard]] double operator()(double x) const {
        // Clenshaw
        double b1 = 0.0;
        double b2 = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 1;) {
            const double b0 = 2.0 * x * b1 - b2 + coeffs[k];
            b2 = b1;
            b1 = b0;
        }
        return x * b1 - b2 + (coeffs.empty() ? 0.0 : coeffs[0]);
    }
};

struct Projection {
    ChebyshevCoeffs fit;
    double residual; ///< root-mean-square misfit over the samples
};

/// Least-squares fit of samples onto T_0..T_K.
inline Projection chebyshev_project(std::span<const double> xs, std::span<const double> ys,
                                    int max_order) {
    if (max_order < 0) {
        throw ArgumentError("max order must be non-negative");
    }
    if (xs.size() != ys.size()) {
        throw ArgumentError("chebyshev_project: x and y lengths differ");
    }
    const auto cols = static_cast<Eigen::Index>(max_order) + 1;
    std::vector<double> distinct(xs.begin(), xs.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (static_cast<Eigen::Index>(distinct.size()) < cols) {
        throw NumericalError("chebyshev_project: " + std::to_string(distinct.size()) +
                             " distinct abscissae cannot determine " + std::to_string(cols) +
                             " coefficients");
    }
    const auto rows = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd rhs(rows);
    std::vector<double> t(static_cast<std::size_t>(cols));
    for (Eigen::Index r = 0; r < rows; ++r) {
        chebyshev_basis(xs[static_cast<std::size_t>(r)], t);
        for (Eigen::Index c = 0; c < cols; ++c) {
            design(r, c) = t[static_cast<std::size_t>(c)];
        }
        rhs(r) = ys[static_cast<std::size_t>(r)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < cols) {
        throw NumericalError("chebyshev_project: rank-deficient design matrix");
    }
    const Eigen::VectorXd c = qr.solve(rhs);
    const Eigen::VectorXd misfit = design * c - rhs;
    Projection out;
    out.fit.coeffs.assign(c.data(), c.data() + c.size());
    out.residual = std::sqrt(misfit.squaredNorm() / static_cast<double>(rows));
    return out;
}

inline Projection chebyshev_project(std::span<const std::pair<double, double>> samples,
                                    int max_order) {
    std::vector<double> xs;
    std::vector<double> ys;
    xs.reserve(samples.size());
    ys.reserve(samples.size());
    for (const auto &[x, y] : samples) {
        xs.push_back(x);
        ys.push_back(y);
    }
    return chebyshev_project(xs, ys, max_order);
}

// ---------------------------------------------------------------------------
// Chebyshev unit: O(x) = sum_i (-1)^i a_i^2 T_i(x)

/// Output from precomputed T_i(x).
inline double qcpn_unit_eval_basis(std::span<const double> a, std::span<const double> t) {
    double o = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double term = a[i] * a[i] * t[i];
        o += (i % 2 == 0) ? term : -term;
    }
    return o;
}

inline double qcpn_unit_eval(std::span<const double> a, double x) {
    if (!(std::abs(x) <= 1.0)) {
        throw DomainError("Chebyshev unit input must lie in [-1, 1]");
    }
    if (a.empty()) {
        return 0.0;
    }
    const auto t = chebyshev_basis(x, static_cast<int>(a.size()) - 1);
    return qcpn_unit_eval_basis(a, t);
}

/// dO/da_i = 2 (-1)^i a_i T_i(x), from precomputed T_i(x).
inline void qcpn_unit_grad_basis(std::span<const double> a, std::span<const double> t,
                                 std::span<double> grad) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double g = 2.0 * a[i] * t[i];
        grad[i] = (i % 2 == 0) ? g : -g;
    }
}

inline std::vector<double> qcpn_unit_grad(std::span<const double> a, double x) {
    if (!(std::abs(x) <= 1.0)) {
        throw DomainError("Chebyshev unit input must lie in [-1, 1]");
    }
    std::vector<double> g(a.size());
    if (a.empty()) {
        return g;
    }
    const auto t = chebyshev_basis(x, static_cast<int>(a.size()) - 1);
    qcpn_unit_grad_basis(a, t, g);
    return g;
}

// ---------------------------------------------------------------------------
// Printed-formula discrepancy report

struct DiscrepancyRow {
    std::string circuit; ///< "QC1" or "QC2"
    int n = 0;
    std::string expression_id;      ///< printed branch label
    std::vector<int> printed_sites; ///< empty when the branch is invalid at n
    double printed_sign = 1.0;
    bool printed_valid = true;
    std::vector<int> shipped_sites;
    double max_deviation = 0.0; ///< printed vs statevector (NaN if invalid)
    double shipped_max_deviation = 0.0;
};

/**
 * Compares the printed QC1/QC2 formulas and the shipped closed forms against
 * the statevector over `draws` random angle vectors per size.
 */
inline std::vector<DiscrepancyRow> discrepancy_report(int n_max, int draws, std::uint64_t seed) {
    std::vector<DiscrepancyRow> rows;
    Rng rng(seed, 0xD15C);
    auto measure = [&](DiscrepancyRow &row, auto &&oracle, auto &&shipped) {
        double dev = 0.0;
        double shipped_dev = 0.0;
        for (int d = 0; d < draws; ++d) {
            const auto x = rng.uniform_vector(static_cast<std::size_t>(row.n), 0.0, 1.0);
            const auto theta =
                rng.uniform_vector(static_cast<std::size_t>(row.n), -std::numbers::pi,
                                   std::numbers::pi);
            std::vector<double> alpha(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                alpha[i] = theta[i] + std::numbers::pi * x[i];
            }
            const double truth = oracle(x, theta);
            if (row.printed_valid) {
                dev = std::max(dev, std::abs(row.printed_sign * cos_product(alpha, row.printed_sites) -
                                             truth));
            }
            shipped_dev = std::max(shipped_dev, std::abs(shipped(alpha) - truth));
        }
        row.max_deviation = row.printed_valid ? dev : std::nan("");
        row.shipped_max_deviation = shipped_dev;
    };
    for (int n = 1; n <= n_max; ++n) {
        DiscrepancyRow row;
        row.circuit = "QC1";
        row.n = n;
        row.expression_id = n % 2 ? "odd-n" : "even-n";
        row.printed_sites = qc1_support(n);
        row.printed_sign = -1.0;
        row.shipped_sites = qc1_support(n);
        measure(
            row, [](auto &x, auto &t) { return qsim::run_qc1(x, t); },
            [](auto &a) { return o_qc1_closed(a); });
        rows.push_back(std::move(row));
    }
    for (int n = 3; n <= n_max; ++n) {
        const auto printed = printed_qc2_branch(n);
        DiscrepancyRow row;
        row.circuit = "QC2";
        row.n = n;
        row.expression_id = printed.id;
        row.printed_valid = printed.sites.has_value();
        if (printed.sites) {
            row.printed_sites = *printed.sites;
        }
        row.shipped_sites = qc2_support(n);
        measure(
            row, [](auto &x, auto &t) { return qsim::run_qc2(x, t); },
            [](auto &a) { return o_qc2_closed(a); });
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace detail {
inline std::string site_list(const std::vector<int> &s, bool valid = true) {
    if (!valid) {
        return "invalid";
    }
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += (i ? "," : "") + std::to_string(s[i]);
    }
    return out + "]";
}
} // namespace detail

/// One whitespace-separated line per (circuit, n); '#' starts the header.
inline void write_discrepancy_report(std::ostream &os, const std::vector<DiscrepancyRow> &rows) {
    os << "# circuit n expression_id printed_sign printed_sites max_deviation shipped_sites "
          "shipped_max_deviation\n";
    char buf[64];
    for (const auto &r : rows) {
        os << r.circuit << ' ' << r.n << ' ' << r.expression_id << ' '
           << (r.printed_sign < 0 ? '-' : '+') << ' '
           << detail::site_list(r.printed_sites, r.printed_valid) << ' ';
        if (r.printed_valid) {
            std::snprintf(buf, sizeof buf, "%.3e", r.max_deviation);
            os << buf;
        } else {
            os << "nan";
        }
        std::snprintf(buf, sizeof buf, "%.3e", r.shipped_max_deviation);
        os << ' ' << detail::site_list(r.shipped_sites) << ' ' << buf << '\n';
    }
}

} // namespace qiml::closedform
