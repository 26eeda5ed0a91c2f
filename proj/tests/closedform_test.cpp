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
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "qiml/closedform.hpp"
#include "qiml/qsim.hpp"
#include "qiml/random.hpp"

using namespace qiml;
using namespace qiml::closedform;
using std::numbers::pi;

namespace {

std::vector<double> alphas_of(const std::vector<double> &x, const std::vector<double> &t) {
    std::vector<double> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = t[i] + pi * x[i];
    return a;
}

} // namespace

TEST(OQc1, Examples) {
    EXPECT_EQ(o_qc1_closed(std::vector<double>{0, 0, 0}), 1.0);
    std::vector<double> a(9, 0.0);
    a[0] = pi / 2;
    EXPECT_NEAR(o_qc1_closed(a), 0.0, 1e-15);
    EXPECT_THROW(o_qc1_closed(std::vector<double>{}), ArgumentError);
}

TEST(OQc1, OracleEquivalence) {
    Rng rng(1234);
    for (int n = 1; n <= 12; ++n) {
        double worst = 0.0;
        for (int d = 0; d < 100; ++d) {
            const auto x = rng.uniform_vector(n, 0, 1);
            const auto t = rng.uniform_vector(n, -pi, pi);
            worst = std::max(worst, std::abs(o_qc1_closed(alphas_of(x, t)) - qsim::run_qc1(x, t)));
        }
        EXPECT_LT(worst, 1e-10) << "n=" << n;
    }
}

TEST(OQc1, FourQubitsWithThetaOnly) {
    Rng rng(77);
    const auto t = rng.uniform_vector(4, -pi, pi);
    const std::vector<double> x(4, 0.0);
    EXPECT_NEAR(o_qc1_closed(t), qsim::run_qc1(x, t), 1e-10);
}

TEST(OQc1, NineSiteDependence) {
    Rng rng(2);
    const auto base = rng.uniform_vector(9, -pi, pi);
    const double ref = o_qc1_closed(base);
    for (int i = 1; i <= 9; ++i) {
        auto a = base;
        a[i - 1] += 0.9;
        if (i % 2 == 0) {
            EXPECT_EQ(o_qc1_closed(a), ref) << "even site " << i;
        } else {
            EXPECT_GT(std::abs(o_qc1_closed(a) - ref), 1e-6) << "odd site " << i;
        }
    }
}

TEST(OQc2, Examples) {
    EXPECT_EQ(o_qc2_closed(std::vector<double>{0, 0, 0, 0}), 1.0);
    EXPECT_NEAR(o_qc2_closed(std::vector<double>{0, pi, 0, 0, 0, 0}), -1.0, 1e-15);
    EXPECT_THROW(o_qc2_closed(std::vector<double>{0, 0}), ArgumentError);
    Rng rng(10);
    const auto x = rng.uniform_vector(10, 0, 1);
    const auto t = rng.uniform_vector(10, -pi, pi);
    EXPECT_NEAR(o_qc2_closed(alphas_of(x, t)), qsim::run_qc2(x, t), 1e-10);
}

TEST(OQc2, OracleEquivalence) {
    Rng rng(4321);
    for (int n = 3; n <= 12; ++n) {
        double worst = 0.0;
        for (int d = 0; d < 100; ++d) {
            const auto x = rng.uniform_vector(n, 0, 1);
            const auto t = rng.uniform_vector(n, -pi, pi);
            worst = std::max(worst, std::abs(o_qc2_closed(alphas_of(x, t)) - qsim::run_qc2(x, t)));
        }
        EXPECT_LT(worst, 1e-10) << "n=" << n;
    }
}

TEST(PrintedQc2, Branches) {
    EXPECT_FALSE(printed_qc2_branch(3).sites.has_value());
    EXPECT_EQ(printed_qc2_branch(3).id, "3+4m");
    EXPECT_EQ(*printed_qc2_branch(9).sites, (std::vector<int>{1, 3, 7}));
    EXPECT_EQ(*printed_qc2_branch(4).sites, (std::vector<int>{1, 3}));
    EXPECT_EQ(*printed_qc2_branch(6).sites, (std::vector<int>{2, 4}));
    EXPECT_EQ(*printed_qc2_branch(11).sites, (std::vector<int>{2, 5, 9}));
}

TEST(DiscrepancyReport, ShippedFormsAgreeWithOracle) {
    const auto rows = discrepancy_report(8, 20, 5);
    ASSERT_EQ(rows.size(), 8u + 6u);
    for (const auto &r : rows) {
        EXPECT_LT(r.shipped_max_deviation, 1e-10) << r.circuit << " n=" << r.n;
    }
    // QC2 at n = 3 references alpha_5.
    const auto it = std::find_if(rows.begin(), rows.end(),
                                 [](const auto &r) { return r.circuit == "QC2" && r.n == 3; });
    ASSERT_NE(it, rows.end());
    EXPECT_FALSE(it->printed_valid);
    std::ostringstream os;
    write_discrepancy_report(os, rows);
    const std::string text = os.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 15);
    EXPECT_NE(text.find("QC2 3 3+4m + invalid nan [1,3]"), std::string::npos);
}

TEST(ChebyshevT, Examples) {
    EXPECT_DOUBLE_EQ(chebyshev_t(2, 0.5), -0.5);
    for (int n = 0; n < 40; ++n) {
        EXPECT_EQ(chebyshev_t(n, 1.0), 1.0);
    }
    EXPECT_NEAR(chebyshev_t(7, std::cos(0.3)), std::cos(2.1), 1e-14);
    EXPECT_TRUE(chebyshev_t_checked(3, 1.5).extrapolated);
    EXPECT_FALSE(chebyshev_t_checked(3, -1.0).extrapolated);
    EXPECT_DOUBLE_EQ(chebyshev_t(3, 2.0), 26.0); // 4*8 - 3*2
}

TEST(ChebyshevT, BoundedOnInterval) {
    Rng rng(6);
    for (int trial = 0; trial < 2000; ++trial) {
        const double x = rng.uniform(-1, 1);
        const int k = static_cast<int>(rng.index(65));
        ASSERT_LE(std::abs(chebyshev_t(k, x)), 1.0 + 1e-12);
    }
}

TEST(ChebyshevProject, Square) {
    const auto xs = chebyshev_nodes(20);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(x * x);
    const auto p = chebyshev_project(xs, ys, 2);
    EXPECT_NEAR(p.fit.coeffs[0], 0.5, 1e-14);
    EXPECT_NEAR(p.fit.coeffs[1], 0.0, 1e-14);
    EXPECT_NEAR(p.fit.coeffs[2], 0.5, 1e-14);
    EXPECT_LT(p.residual, 1e-12);
    EXPECT_NEAR(p.fit(0.3), 0.09, 1e-14);
}

TEST(ChebyshevProject, PairOverloadAndDuplicates) {
    std::vector<std::pair<double, double>> s{{0.1, 1.0}, {0.1, 2.0}, {0.1, 3.0}};
    EXPECT_THROW(chebyshev_project(s, 1), NumericalError);
    s = {{-0.5, 1.0}, {0.5, 2.0}};
    const auto p = chebyshev_project(s, 1);
    EXPECT_NEAR(p.fit.coeffs[0], 1.5, 1e-14);
    EXPECT_NEAR(p.fit.coeffs[1], 1.0, 1e-14);
}

TEST(ChebyshevProject, FourQubitCircuitDegreeSix) {
    Rng rng(44);
    const auto theta = rng.uniform_vector(qsim::qcpn_param_count(4), -pi, pi);
    const auto xs = chebyshev_nodes(30);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(qsim::run_qcpn_circuit(x, theta, 4));
    EXPECT_LT(chebyshev_project(xs, ys, 6).residual, 1e-8);
}

TEST(ChebyshevProject, AbsoluteValueIsNotQuadratic) {
    // Independent route: 3x3 normal equations in the monomial basis solved by
    // Cramer's rule, then the RMS misfit of the best quadratic.
    const auto xs = chebyshev_nodes(50);
    std::vector<double> ys;
    double s[5] = {0, 0, 0, 0, 0};
    double r[3] = {0, 0, 0};
    for (double x : xs) {
        const double y = std::abs(x);
        ys.push_back(y);
        double xp = 1.0;
        for (int k = 0; k < 5; ++k) {
            if (k < 3) r[k] += xp * y;
            s[k] += xp;
            xp *= x;
        }
    }
    auto det3 = [](double a, double b, double c, double d, double e, double f, double g, double h,
                   double i) { return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g); };
    const double D = det3(s[0], s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4]);
    const double c0 = det3(r[0], s[1], s[2], r[1], s[2], s[3], r[2], s[3], s[4]) / D;
    const double c1 = det3(s[0], r[0], s[2], s[1], r[1], s[3], s[2], r[2], s[4]) / D;
    const double c2 = det3(s[0], s[1], r[0], s[1], s[2], r[1], s[2], s[3], r[2]) / D;
    double sq = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double e = c0 + c1 * xs[j] + c2 * xs[j] * xs[j] - ys[j];
        sq += e * e;
    }
    const double oracle = std::sqrt(sq / xs.size());
    const auto p = chebyshev_project(xs, ys, 2);
    EXPECT_NEAR(p.residual, oracle, 1e-10);
    EXPECT_GT(p.residual, 1e-3);
}

TEST(QcpnUnit, Examples) {
    std::vector<double> a(13, 0.0);
    a[0] = 1.0;
    for (double x : {-1.0, -0.2, 0.4, 1.0}) EXPECT_EQ(qcpn_unit_eval(a, x), 1.0);
    a.assign(13, 0.0);
    a[1] = 1.0;
    for (double x : {-1.0, -0.2, 0.4, 1.0}) EXPECT_EQ(qcpn_unit_eval(a, x), -x);
    a.assign(13, 0.0);
    a[0] = a[1] = a[2] = 1.0;
    EXPECT_EQ(qcpn_unit_eval(a, 0.0), 0.0);
    EXPECT_THROW(qcpn_unit_eval(a, 1.01), DomainError);
}

TEST(QcpnUnit, SignStructure) {
    for (int k = 0; k <= 12; ++k) {
        std::vector<double> a(13, 0.0);
        a[k] = 1.0;
        for (double x : chebyshev_nodes(7)) {
            EXPECT_EQ(qcpn_unit_eval(a, x), (k % 2 ? -1.0 : 1.0) * chebyshev_t(k, x));
        }
    }
}

TEST(QcpnUnit, GradientExamples) {
    std::vector<double> a(5, 0.0);
    a[0] = 1.0;
    EXPECT_EQ(qcpn_unit_grad(a, 0.3), (std::vector<double>{2, 0, 0, 0, 0}));
    a.assign(5, 0.0);
    EXPECT_EQ(qcpn_unit_grad(a, -0.7), (std::vector<double>(5, 0.0)));
}

TEST(QcpnUnit, GradientMatchesFiniteDifferences) {
    Rng rng(31);
    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        auto a = rng.uniform_vector(13, -1, 1);
        const double x = rng.uniform(-1, 1);
        const auto g = qcpn_unit_grad(a, x);
        for (std::size_t i = 0; i < a.size(); ++i) {
            auto ap = a, am = a;
            ap[i] += h;
            am[i] -= h;
            const double fd = (qcpn_unit_eval(ap, x) - qcpn_unit_eval(am, x)) / (2 * h);
            ASSERT_LE(std::abs(fd - g[i]), 1e-6 * std::max(1.0, std::abs(g[i])));
        }
    }
}
