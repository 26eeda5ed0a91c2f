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
 * Chebyshev-unit regression networks, a tanh baseline, and the Bessel and
 * Legendre targets they are trained on.
 *
 * Models take inputs in their native domain and map each coordinate onto
 * [-1, 1] with the affine `rescale` before evaluating any unit.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "closedform.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "optim.hpp"
#include "random.hpp"

namespace qiml::qcpn {

// ---------------------------------------------------------------------------
// Special functions

enum class SpecialFn { J0, J1, P5, P6 };

inline constexpr double kBesselMaxArg = 12.0;

/// Ascending series sum_k (-1)^k (x/2)^(2k+nu) / (k! (k+nu)!) in long double.
inline double bessel_j_series(int nu, double x) {
    if (!(std::abs(x) <= kBesselMaxArg)) {
        throw DomainError("Bessel series is validated for |x| <= 12, got " + format_double(x));
    }
    const long double h = static_cast<long double>(x) / 2.0L;
    const long double h2 = h * h;
    long double term = 1.0L;
    for (int i = 1; i <= nu; ++i) {
        term *= h / static_cast<long double>(i);
    }
    long double sum = term;
    for (int k = 1; k < 80; ++k) {
        term *= -h2 / (static_cast<long double>(k) * static_cast<long double>(k + nu));
        sum += term;
        if (k >= 30 && std::abs(term) < 1e-30L) {
            break;
        }
    }
    return static_cast<double>(sum);
}

inline double legendre_p5(double x) {
    const double x2 = x * x;
    return x * (15.0 + x2 * (-70.0 + 63.0 * x2)) / 8.0;
}

inline double legendre_p6(double x) {
    const double x2 = x * x;
    return (-5.0 + x2 * (105.0 + x2 * (-315.0 + 231.0 * x2))) / 16.0;
}

inline double special_fn(SpecialFn f, double x) {
    switch (f) {
    case SpecialFn::J0: return bessel_j_series(0, x);
    case SpecialFn::J1: return bessel_j_series(1, x);
    case SpecialFn::P5: return legendre_p5(x);
    case SpecialFn::P6: return legendre_p6(x);
    }
    throw ArgumentError("unknown special function");
}

// ---------------------------------------------------------------------------
// Domains and rescaling

struct Interval {
    double lo = -1.0;
    double hi = 1.0;

    friend bool operator==(const Interval &, const Interval &) = default;
};

/// Affine map sending lo -> -1 and hi -> +1 exactly.
inline double rescale(double x, const Interval &d) {
    return ((x - d.lo) - (d.hi - x)) / (d.hi - d.lo);
}

/// rescale() with a domain check; values within rounding of +-1 are clamped.
inline double rescale_checked(double x, const Interval &d) {
    const double t = rescale(x, d);
    if (!(std::abs(t) <= 1.0 + 1e-12)) {
        throw DomainError("input " + format_double(x) + " lies outside [" + format_double(d.lo) + ", " +
                          format_double(d.hi) + "]");
    }
    return std::clamp(t, -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Targets and datasets

enum class Target { J0, J1, P5, P6, J0SUM, J1SUM, P5PROD, P6PROD };

inline constexpr std::array<Target, 8> kAllTargets = {Target::J0,    Target::J1,    Target::P5,
                                                      Target::P6,    Target::J0SUM, Target::J1SUM,
                                                      Target::P5PROD, Target::P6PROD};

inline std::string to_string(Target t) {
    switch (t) {
    case Target::J0: return "j0";
    case Target::J1: return "j1";
    case Target::P5: return "p5";
    case Target::P6: return "p6";
    case Target::J0SUM: return "j0sum";
    case Target::J1SUM: return "j1sum";
    case Target::P5PROD: return "p5prod";
    case Target::P6PROD: return "p6prod";
    }
    return "?";
}

inline Target parse_target(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (Target t : kAllTargets) {
        if (to_string(t) == lower) {
            return t;
        }
    }
    throw ArgumentError("unknown target '" + std::string(name) + "'");
}

inline std::size_t input_dim(Target t) {
    return (t == Target::J0 || t == Target::J1 || t == Target::P5 || t == Target::P6) ? 1 : 2;
}

/// J0/J1 on [0,10]; J0SUM/J1SUM on [0,5]^2 so x+y stays in [0,10];
/// Legendre targets on [-1,1] per coordinate.
inline std::vector<Interval> default_domain(Target t) {
    switch (t) {
    case Target::J0:
    case Target::J1: return {{0.0, 10.0}};
    case Target::P5:
    case Target::P6: return {{-1.0, 1.0}};
    case Target::J0SUM:
    case Target::J1SUM: return {{0.0, 5.0}, {0.0, 5.0}};
    case Target::P5PROD:
    case Target::P6PROD: return {{-1.0, 1.0}, {-1.0, 1.0}};
    }
    return {};
}

inline double target_value(Target t, std::span<const double> x) {
    switch (t) {
    case Target::J0: return special_fn(SpecialFn::J0, x[0]);
    case Target::J1: return special_fn(SpecialFn::J1, x[0]);
    case Target::P5: return special_fn(SpecialFn::P5, x[0]);
    case Target::P6: return special_fn(SpecialFn::P6, x[0]);
    case Target::J0SUM: return special_fn(SpecialFn::J0, x[0] + x[1]);
    case Target::J1SUM: return special_fn(SpecialFn::J1, x[0] + x[1]);
    case Target::P5PROD: return special_fn(SpecialFn::P5, x[0] * x[1]);
    case Target::P6PROD: return special_fn(SpecialFn::P6, x[0] * x[1]);
    }
    return 0.0;
}

/// Row-major inputs [n, dim] and targets [n].
struct RegressionSet {
    std::size_t dim = 1;
    std::vector<double> x;
    std::vector<double> y;

    [[nodiscard]] std::size_t size() const { return y.size(); }
    [[nodiscard]] std::span<const double> input(std::size_t i) const {
        return std::span(x).subspan(i * dim, dim);
    }
};

struct RegressionData {
    Target target = Target::P5;
    std::vector<Interval> domain;
    RegressionSet train;
    RegressionSet test;
};

/// Inputs uniform over the domain box; the train draws come first, then test.
inline RegressionData gen_dataset(Target target, std::size_t n_train, std::size_t n_test,
                                  std::uint64_t seed, std::optional<std::vector<Interval>> domain = {}) {
    if (n_train == 0 || n_test == 0) {
        throw ArgumentError("dataset sizes must be positive");
    }
    RegressionData d;
    d.target = target;
    d.domain = domain ? *domain : default_domain(target);
    const std::size_t dim = input_dim(target);
    if (d.domain.size() != dim) {
        throw ArgumentError(to_string(target) + " takes a " + std::to_string(dim) + "-D domain");
    }
    for (const auto &iv : d.domain) {
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
            throw ArgumentError("domain bounds must be finite with lo < hi");
        }
    }
    Rng rng(seed, 2);
    auto fill = [&](RegressionSet &s, std::size_t n) {
        s.dim = dim;
        s.x.resize(n * dim);
        s.y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                s.x[i * dim + j] = rng.uniform(d.domain[j].lo, d.domain[j].hi);
            }
            s.y[i] = target_value(target, s.input(i));
        }
    };
    fill(d.train, n_train);
    fill(d.test, n_test);
    return d;
}

// ---------------------------------------------------------------------------
// Models

/// y(x) = sum_i w_i O_i(L(x)) + b over units sharing one maximum order.
struct ChebyshevBank {
    std::vector<std::vector<double>> units;
    std::vector<double> w;
    double b = 0.0;
    Interval domain;

    [[nodiscard]] int max_order() const {
        return units.empty() ? -1 : static_cast<int>(units.front().size()) - 1;
    }

    void validate() const {
        if (units.size() != w.size()) {
            throw ArgumentError("bank needs one weight per unit");
        }
        for (const auto &u : units) {
            if (u.size() != units.front().size()) {
                throw ArgumentError("all units in a bank share the maximum order");
            }
        }
    }
};

inline double bank_forward(const ChebyshevBank &bank, double x) {
    bank.validate();
    const double t = rescale_checked(x, bank.domain);
    double y = bank.b;
    for (std::size_t i = 0; i < bank.units.size(); ++i) {
        y += bank.w[i] * closedform::qcpn_unit_eval(bank.units[i], t);
    }
    return y;
}

/// y(x) = sum_t w_t prod_j O_{t,j}(L_j(x_j)) + b.
struct HybridQcpn {
    std::size_t input_dim = 1;
    std::size_t terms = 0;
    int order = 12;
    std::vector<double> a; ///< [term][dim][order + 1]
    std::vector<double> w;
    std::vector<double> b{0.0};
    std::vector<Interval> domain;
    Adam adam;

    [[nodiscard]] std::size_t unit_len() const { return static_cast<std::size_t>(order) + 1; }

    [[nodiscard]] std::span<const double> unit(std::size_t t, std::size_t j) const {
        return std::span(a).subspan((t * input_dim + j) * unit_len(), unit_len());
    }
    std::span<double> unit(std::size_t t, std::size_t j) {
        return std::span(a).subspan((t * input_dim + j) * unit_len(), unit_len());
    }

    static HybridQcpn zeros(std::vector<Interval> domain, std::size_t terms, int order) {
        if (domain.empty() || terms == 0 || order < 0) {
            throw ArgumentError("model needs at least one input, one term and order >= 0");
        }
        HybridQcpn m;
        m.input_dim = domain.size();
        m.terms = terms;
        m.order = order;
        m.domain = std::move(domain);
        m.a.assign(terms * m.input_dim * m.unit_len(), 0.0);
        m.w.assign(terms, 0.0);
        return m;
    }

    /// a ~ U(-0.5, 0.5), |w| ~ U(0, 1) with signs alternating +, -, +, ...
    /// by term, b = 0. Each unit only produces coefficients with signs
    /// (-1)^i, so a bank whose weights all share one sign cannot reach the
    /// opposite pattern; mixed signs from the start avoid that trap.
    static HybridQcpn init(std::vector<Interval> domain, std::size_t terms, int order, std::uint64_t seed) {
        auto m = zeros(std::move(domain), terms, order);
        Rng rng(seed, 3);
        for (auto &v : m.a) {
            v = rng.uniform(-0.5, 0.5);
        }
        for (std::size_t t = 0; t < m.w.size(); ++t) {
            const double mag = rng.uniform();
            m.w[t] = t % 2 == 0 ? mag : -mag;
        }
        return m;
    }

    std::vector<std::pair<std::string, std::span<double>>> blocks() {
        return {{"a", a}, {"w", w}, {"b", b}};
    }

    /// Per-sample scratch: basis per dimension and unit outputs.
    struct Scratch {
        std::vector<double> basis; // [dim][order + 1]
        std::vector<double> out;   // [term][dim]
        std::vector<double> grad;  // [order + 1]
    };

    [[nodiscard]] Scratch scratch() const {
        return {std::vector<double>(input_dim * unit_len()), std::vector<double>(terms * input_dim),
                std::vector<double>(unit_len())};
    }

    double forward(std::span<const double> x, Scratch &s) const {
        if (x.size() != input_dim) {
            throw ArgumentError("expected " + std::to_string(input_dim) + " inputs, got " +
                                std::to_string(x.size()));
        }
        for (std::size_t j = 0; j < input_dim; ++j) {
            closedform::chebyshev_basis(rescale_checked(x[j], domain[j]),
                                        std::span(s.basis).subspan(j * unit_len(), unit_len()));
        }
        double y = b[0];
        for (std::size_t t = 0; t < terms; ++t) {
            double prod = 1.0;
            for (std::size_t j = 0; j < input_dim; ++j) {
                const double o = closedform::qcpn_unit_eval_basis(
                    unit(t, j), std::span(s.basis).subspan(j * unit_len(), unit_len()));
                s.out[t * input_dim + j] = o;
                prod *= o;
            }
            y += w[t] * prod;
        }
        return y;
    }

    /// Adds r * dy/dparam, using the state left in `s` by forward().
    void accumulate_grad(double r, Scratch &s, std::span<double> ga, std::span<double> gw,
                         std::span<double> gb) const {
        gb[0] += r;
        for (std::size_t t = 0; t < terms; ++t) {
            const double *o = &s.out[t * input_dim];
            double prod = 1.0;
            for (std::size_t j = 0; j < input_dim; ++j) {
                prod *= o[j];
            }
            gw[t] += r * prod;
            for (std::size_t j = 0; j < input_dim; ++j) {
                double others = 1.0;
                for (std::size_t l = 0; l < input_dim; ++l) {
                    if (l != j) {
                        others *= o[l];
                    }
                }
                const double c = r * w[t] * others;
                if (c == 0.0) {
                    continue;
                }
                closedform::qcpn_unit_grad_basis(unit(t, j),
                                                 std::span(s.basis).subspan(j * unit_len(), unit_len()), s.grad);
                auto g = ga.subspan((t * input_dim + j) * unit_len(), unit_len());
                for (std::size_t k = 0; k < unit_len(); ++k) {
                    g[k] += c * s.grad[k];
                }
            }
        }
    }

    [[nodiscard]] double predict(std::span<const double> x) const {
        auto s = scratch();
        return forward(x, s);
    }
};

/// Each unit becomes a one-dimensional term.
inline HybridQcpn to_hybrid(const ChebyshevBank &bank) {
    bank.validate();
    auto m = HybridQcpn::zeros({bank.domain}, bank.units.size(), bank.max_order());
    for (std::size_t t = 0; t < bank.units.size(); ++t) {
        std::copy(bank.units[t].begin(), bank.units[t].end(), m.unit(t, 0).begin());
    }
    m.w = bank.w;
    m.b[0] = bank.b;
    return m;
}

inline double hybrid_forward(const HybridQcpn &m, std::span<const double> x) { return m.predict(x); }

/// dense(m -> H, tanh) -> dense(H -> 1), inputs rescaled onto [-1, 1].
struct BaselineNn {
    std::size_t input_dim = 1;
    std::size_t hidden = 16;
    std::vector<double> w1; ///< [dim][hidden]
    std::vector<double> b1;
    std::vector<double> w2;
    std::vector<double> b2{0.0};
    std::vector<Interval> domain;
    Adam adam;

    static BaselineNn zeros(std::vector<Interval> domain, std::size_t hidden) {
        if (domain.empty() || hidden == 0) {
            throw ArgumentError("baseline needs at least one input and one hidden unit");
        }
        BaselineNn m;
        m.input_dim = domain.size();
        m.hidden = hidden;
        m.domain = std::move(domain);
        m.w1.assign(m.input_dim * hidden, 0.0);
        m.b1.assign(hidden, 0.0);
        m.w2.assign(hidden, 0.0);
        return m;
    }

    /// Glorot-uniform weights, zero biases.
    static BaselineNn init(std::vector<Interval> domain, std::size_t hidden, std::uint64_t seed) {
        auto m = zeros(std::move(domain), hidden);
        Rng rng(seed, 4);
        const double l1 = std::sqrt(6.0 / static_cast<double>(m.input_dim + hidden));
        for (auto &v : m.w1) {
            v = rng.uniform(-l1, l1);
        }
        const double l2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
        for (auto &v : m.w2) {
            v = rng.uniform(-l2, l2);
        }
        return m;
    }

    std::vector<std::pair<std::string, std::span<double>>> blocks() {
        return {{"dense1.w", w1}, {"dense1.b", b1}, {"dense2.w", w2}, {"dense2.b", b2}};
    }

    struct Scratch {
        std::vector<double> u; // rescaled inputs
        std::vector<double> h; // tanh activations
    };

    [[nodiscard]] Scratch scratch() const { return {std::vector<double>(input_dim), std::vector<double>(hidden)}; }

    double forward(std::span<const double> x, Scratch &s) const {
        if (x.size() != input_dim) {
            throw ArgumentError("expected " + std::to_string(input_dim) + " inputs, got " +
                                std::to_string(x.size()));
        }
        for (std::size_t j = 0; j < input_dim; ++j) {
            s.u[j] = rescale_checked(x[j], domain[j]);
        }
        double y = b2[0];
        for (std::size_t k = 0; k < hidden; ++k) {
            double z = b1[k];
            for (std::size_t j = 0; j < input_dim; ++j) {
                z += s.u[j] * w1[j * hidden + k];
            }
            s.h[k] = std::tanh(z);
            y += w2[k] * s.h[k];
        }
        return y;
    }

    void accumulate_grad(double r, Scratch &s, std::span<double> gw1, std::span<double> gb1,
                         std::span<double> gw2, std::span<double> gb2) const {
        gb2[0] += r;
        for (std::size_t k = 0; k < hidden; ++k) {
            gw2[k] += r * s.h[k];
            const double dz = r * w2[k] * (1.0 - s.h[k] * s.h[k]);
            gb1[k] += dz;
            for (std::size_t j = 0; j < input_dim; ++j) {
                gw1[j * hidden + k] += dz * s.u[j];
            }
        }
    }

    [[nodiscard]] double predict(std::span<const double> x) const {
        auto s = scratch();
        return forward(x, s);
    }
};

// ---------------------------------------------------------------------------
// Training

struct RegressionOptions {
    int epochs = 200;
    std::size_t batch_size = 50;
    double lr = 0.05;
    double lr_decay = 0.97; ///< multiplies lr after every epoch
    std::uint64_t seed = 0;
    int start_epoch = 1;
};

struct RegressionEval {
    double mse = 0.0;
    double r2 = 0.0;
};

template <class Model>
RegressionEval evaluate_regression(const Model &m, const RegressionSet &s) {
    if (s.size() == 0) {
        throw ArgumentError("cannot evaluate an empty set");
    }
    auto scratch = m.scratch();
    double sse = 0.0;
    double mean = 0.0;
    for (double v : s.y) {
        mean += v;
    }
    mean /= static_cast<double>(s.size());
    double sst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double e = m.forward(s.input(i), scratch) - s.y[i];
        sse += e * e;
        sst += (s.y[i] - mean) * (s.y[i] - mean);
    }
    return {sse / static_cast<double>(s.size()), sst > 0.0 ? 1.0 - sse / sst : 0.0};
}

namespace detail {

inline std::vector<std::vector<double>> zero_like(
    const std::vector<std::pair<std::string, std::span<double>>> &blocks) {
    std::vector<std::vector<double>> g;
    for (const auto &b : blocks) {
        g.emplace_back(b.second.size(), 0.0);
    }
    return g;
}

inline void accumulate(const HybridQcpn &m, double r, HybridQcpn::Scratch &s,
                       std::vector<std::vector<double>> &g) {
    m.accumulate_grad(r, s, g[0], g[1], g[2]);
}

inline void accumulate(const BaselineNn &m, double r, BaselineNn::Scratch &s,
                       std::vector<std::vector<double>> &g) {
    m.accumulate_grad(r, s, g[0], g[1], g[2], g[3]);
}

} // namespace detail

/// Mean squared error over `idx` and its gradient, in parameter-block order.
template <class Model>
double mse_and_gradient(const Model &m, const RegressionSet &s, std::span<const std::size_t> idx,
                        std::vector<std::vector<double>> &grad) {
    for (auto &g : grad) {
        std::fill(g.begin(), g.end(), 0.0);
    }
    auto scratch = m.scratch();
    const double inv = 1.0 / static_cast<double>(idx.size());
    double loss = 0.0;
    for (std::size_t i : idx) {
        const double e = m.forward(s.input(i), scratch) - s.y[i];
        loss += e * e;
        detail::accumulate(m, 2.0 * e * inv, scratch, grad);
    }
    return loss * inv;
}

using RegressionCallback = std::function<void(const EpochRecord &)>;

/// Mini-batch Adam on mean squared error. Records hold MSE in the loss
/// columns and R^2 in the accuracy columns.
template <class Model>
TrainReport train_regression(Model &m, const RegressionData &data, const RegressionOptions &opt,
                             const RegressionCallback &on_epoch = {}) {
    if (data.train.size() == 0 || data.test.size() == 0) {
        throw ArgumentError("train and test sets must be non-empty");
    }
    if (opt.batch_size == 0) {
        throw ArgumentError("batch size must be positive");
    }
    auto blocks = m.blocks();
    auto grad = detail::zero_like(blocks);
    std::vector<std::span<double>> params;
    for (auto &b : blocks) {
        params.push_back(b.second);
    }
    std::vector<std::span<const double>> gspans(grad.begin(), grad.end());

    TrainReport report;
    for (int epoch = opt.start_epoch; epoch <= opt.epochs; ++epoch) {
        const double lr = opt.lr * std::pow(opt.lr_decay, epoch - 1);
        Rng rng(opt.seed, 0x20000 + static_cast<std::uint64_t>(epoch));
        const auto order = permutation(data.train.size(), rng);
        for (std::size_t start = 0; start < order.size(); start += opt.batch_size) {
            const std::size_t bs = std::min(opt.batch_size, order.size() - start);
            const double loss = mse_and_gradient(m, data.train, std::span(order).subspan(start, bs), grad);
            if (!std::isfinite(loss)) {
                throw NumericalError("non-finite loss at epoch " + std::to_string(epoch));
            }
            m.adam.step(params, gspans, lr);
        }
        const auto tr = evaluate_regression(m, data.train);
        const auto te = evaluate_regression(m, data.test);
        EpochRecord rec{epoch, tr.mse, tr.r2, te.mse, te.r2};
        report.records.push_back(rec);
        if (on_epoch) {
            on_epoch(rec);
        }
    }
    return report;
}

inline TrainReport train_qcpn(HybridQcpn &m, const RegressionData &data, const RegressionOptions &opt,
                              const RegressionCallback &on_epoch = {}) {
    return train_regression(m, data, opt, on_epoch);
}

inline TrainReport train_baseline(BaselineNn &m, const RegressionData &data, const RegressionOptions &opt,
                                  const RegressionCallback &on_epoch = {}) {
    return train_regression(m, data, opt, on_epoch);
}

/// Predictions on a regular grid over the domain: 501 points in 1-D,
/// 51 x 51 in 2-D. Columns: x[, y], target, prediction.
template <class Model>
void write_predictions(std::ostream &os, const Model &m, Target target, const std::vector<Interval> &domain) {
    const std::size_t dim = domain.size();
    if (dim == 1) {
        os << "x,target,prediction\n";
        const int n = 501;
        for (int i = 0; i < n; ++i) {
            const double x = i == n - 1 ? domain[0].hi
                                        : domain[0].lo + (domain[0].hi - domain[0].lo) * i / (n - 1);
            const std::array<double, 1> in{x};
            os << format_double(x) << ',' << format_double(target_value(target, in)) << ','
               << format_double(m.predict(in)) << '\n';
        }
        return;
    }
    os << "x,y,target,prediction\n";
    const int n = 51;
    auto at = [&](const Interval &d, int i) { return i == n - 1 ? d.hi : d.lo + (d.hi - d.lo) * i / (n - 1); };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::array<double, 2> in{at(domain[0], i), at(domain[1], j)};
            os << format_double(in[0]) << ',' << format_double(in[1]) << ','
               << format_double(target_value(target, in)) << ',' << format_double(m.predict(in)) << '\n';
        }
    }
}

} // namespace qiml::qcpn
