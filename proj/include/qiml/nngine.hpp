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
 * Convolutional classifier whose filters are activation kernels:
 * conv (stride 1, no padding) -> 2x2 average pool -> flatten -> dense+tanh
 * -> dense -> softmax cross-entropy, trained with Adam.
 *
 * Layouts: conv maps are [row][col][channel]; dense1.w is [feature][hidden];
 * dense2.w is [hidden][class].
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "activations.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "optim.hpp"
#include "random.hpp"
#include "tensor.hpp"
#include "trig.hpp"

namespace qiml::nngine {

using activations::ActivationKernel;
using activations::Kind;
using activations::KernelTrig;

struct CnnConfig {
    std::size_t height = 28;
    std::size_t width = 28;
    std::size_t channels = 16;
    std::size_t kernel = 3;
    std::size_t hidden = 64;
    std::size_t classes = 10;
    Kind kind = Kind::AF3;

    [[nodiscard]] std::size_t conv_height() const { return height - kernel + 1; }
    [[nodiscard]] std::size_t conv_width() const { return width - kernel + 1; }
    [[nodiscard]] std::size_t pool_height() const { return conv_height() / 2; }
    [[nodiscard]] std::size_t pool_width() const { return conv_width() / 2; }
    [[nodiscard]] std::size_t patch_len() const { return kernel * kernel; }
    [[nodiscard]] std::size_t features() const { return pool_height() * pool_width() * channels; }

    void validate() const {
        if (kernel == 0 || height < kernel || width < kernel) {
            throw ShapeError("input " + std::to_string(height) + "x" + std::to_string(width) +
                             " is smaller than the " + std::to_string(kernel) + "x" +
                             std::to_string(kernel) + " window");
        }
        if (conv_height() % 2 != 0 || conv_width() % 2 != 0) {
            throw ShapeError("conv output " + std::to_string(conv_height()) + "x" +
                             std::to_string(conv_width()) + " cannot be 2x2 pooled");
        }
        if (channels == 0 || hidden == 0 || classes < 2) {
            throw ArgumentError("channels and hidden must be positive and classes at least 2");
        }
    }

    friend bool operator==(const CnnConfig &, const CnnConfig &) = default;
};

struct NamedBlock {
    std::string name;
    std::span<double> values;
};

struct CnnModel {
    CnnConfig config;
    std::vector<ActivationKernel> conv_kernels;
    std::vector<double> w1, b1, w2, b2;
    Adam adam;

    /// All parameters zero (AF1/AF2 weights, angles for the rest).
    static CnnModel zeros(const CnnConfig &cfg) {
        cfg.validate();
        CnnModel m;
        m.config = cfg;
        const auto plen = cfg.patch_len();
        for (std::size_t c = 0; c < cfg.channels; ++c) {
            m.conv_kernels.emplace_back(cfg.kind, plen,
                                        std::vector<double>(activations::param_count(cfg.kind, plen), 0.0));
        }
        m.w1.assign(cfg.features() * cfg.hidden, 0.0);
        m.b1.assign(cfg.hidden, 0.0);
        m.w2.assign(cfg.hidden * cfg.classes, 0.0);
        m.b2.assign(cfg.classes, 0.0);
        return m;
    }

    /// Conv kernels from the activation policy, dense weights Glorot-uniform, biases zero.
    static CnnModel init(const CnnConfig &cfg, std::uint64_t seed) {
        CnnModel m = zeros(cfg);
        Rng rng(seed, 1);
        for (auto &k : m.conv_kernels) {
            k = ActivationKernel::random(cfg.kind, cfg.patch_len(), rng);
        }
        auto glorot = [&](std::vector<double> &w, std::size_t fan_in, std::size_t fan_out) {
            const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
            for (auto &v : w) {
                v = rng.uniform(-limit, limit);
            }
        };
        glorot(m.w1, cfg.features(), cfg.hidden);
        glorot(m.w2, cfg.hidden, cfg.classes);
        return m;
    }

    /// Parameter blocks in optimizer order: conv.0 .. conv.{C-1}, dense1.w,
    /// dense1.b, dense2.w, dense2.b.
    std::vector<NamedBlock> blocks() {
        std::vector<NamedBlock> out;
        for (std::size_t c = 0; c < conv_kernels.size(); ++c) {
            out.push_back({"conv." + std::to_string(c), conv_kernels[c].params});
        }
        out.push_back({"dense1.w", w1});
        out.push_back({"dense1.b", b1});
        out.push_back({"dense2.w", w2});
        out.push_back({"dense2.b", b2});
        return out;
    }

    [[nodiscard]] std::size_t parameter_count() const {
        std::size_t n = w1.size() + b1.size() + w2.size() + b2.size();
        for (const auto &k : conv_kernels) {
            n += k.params.size();
        }
        return n;
    }
};

/// Gradient buffers shaped like the model's parameter blocks.
struct Gradients {
    std::vector<std::vector<double>> conv;
    std::vector<double> w1, b1, w2, b2;

    explicit Gradients(const CnnModel &m)
        : w1(m.w1.size(), 0.0), b1(m.b1.size(), 0.0), w2(m.w2.size(), 0.0), b2(m.b2.size(), 0.0) {
        for (const auto &k : m.conv_kernels) {
            conv.emplace_back(k.params.size(), 0.0);
        }
    }

    [[nodiscard]] std::vector<std::span<const double>> blocks() const {
        std::vector<std::span<const double>> out(conv.begin(), conv.end());
        out.insert(out.end(), {w1, b1, w2, b2});
        return out;
    }
};

namespace detail {

inline void check_images(const CnnConfig &cfg, const Tensor &images) {
    if (images.rank() != 3 || images.shape[1] != cfg.height || images.shape[2] != cfg.width) {
        throw ShapeError("expected images [B," + std::to_string(cfg.height) + "," +
                         std::to_string(cfg.width) + "], got " + images.shape_string());
    }
}

inline void check_labels(std::span<const int> labels, std::size_t batch, std::size_t classes) {
    if (labels.size() != batch) {
        throw ShapeError("label count " + std::to_string(labels.size()) + " != batch " +
                         std::to_string(batch));
    }
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= classes) {
            throw ArgumentError("label " + std::to_string(y) + " outside 0.." +
                                std::to_string(classes - 1));
        }
    }
}

/// -log softmax(z)[label], max-subtracted.
inline double sample_ce(std::span<const double> z, int label) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) {
        s += std::exp(v - zmax);
    }
    return std::log(s) - (z[static_cast<std::size_t>(label)] - zmax);
}

inline void softmax_into(std::span<const double> z, std::span<double> p) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - zmax);
        s += p[i];
    }
    for (auto &v : p) {
        v /= s;
    }
}

inline std::size_t argmax(std::span<const double> z) {
    return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

/// Scratch for one sample: encoded pixels, activations and backward deltas.
struct Workspace {
    std::vector<KernelTrig> trig;
    std::vector<double> cos_px, sin_px;
    std::vector<double> conv, flat, hidden, logits;
    std::vector<double> prob, d_hidden, d_flat;
    std::vector<double> px, pc, ps; // gathered patch

    explicit Workspace(const CnnModel &m) {
        const auto &c = m.config;
        for (const auto &k : m.conv_kernels) {
            trig.emplace_back(k);
        }
        cos_px.resize(c.height * c.width);
        sin_px.resize(c.height * c.width);
        conv.resize(c.conv_height() * c.conv_width() * c.channels);
        flat.resize(c.features());
        hidden.resize(c.hidden);
        logits.resize(c.classes);
        prob.resize(c.classes);
        d_hidden.resize(c.hidden);
        d_flat.resize(c.features());
        px.resize(c.patch_len());
        pc.resize(c.patch_len());
        ps.resize(c.patch_len());
    }

    void gather(const CnnConfig &c, const double *img, std::size_t i, std::size_t j) {
        std::size_t t = 0;
        for (std::size_t di = 0; di < c.kernel; ++di) {
            const std::size_t base = (i + di) * c.width + j;
            for (std::size_t dj = 0; dj < c.kernel; ++dj, ++t) {
                px[t] = img[base + dj];
                pc[t] = cos_px[base + dj];
                ps[t] = sin_px[base + dj];
            }
        }
    }

    [[nodiscard]] activations::PatchView patch() const { return {px, pc, ps}; }
};

inline void conv_sample(const CnnModel &m, Workspace &ws, const double *img) {
    const auto &c = m.config;
    for (std::size_t p = 0; p < c.height * c.width; ++p) {
        ws.cos_px[p] = cospi(img[p]);
        ws.sin_px[p] = sinpi(img[p]);
    }
    const std::size_t ow = c.conv_width();
    for (std::size_t i = 0; i < c.conv_height(); ++i) {
        for (std::size_t j = 0; j < ow; ++j) {
            ws.gather(c, img, i, j);
            double *out = &ws.conv[(i * ow + j) * c.channels];
            for (std::size_t ch = 0; ch < c.channels; ++ch) {
                out[ch] = activations::eval(m.conv_kernels[ch], ws.trig[ch], ws.patch());
            }
        }
    }
}

inline void pool_sample(const CnnConfig &c, std::span<const double> conv, std::span<double> flat) {
    const std::size_t ow = c.conv_width();
    const std::size_t ph = c.pool_height();
    const std::size_t pw = c.pool_width();
    const std::size_t nc = c.channels;
    for (std::size_t i = 0; i < ph; ++i) {
        for (std::size_t j = 0; j < pw; ++j) {
            const double *a = &conv[((2 * i) * ow + 2 * j) * nc];
            const double *b = a + nc;
            const double *d = &conv[((2 * i + 1) * ow + 2 * j) * nc];
            const double *e = d + nc;
            double *o = &flat[(i * pw + j) * nc];
            for (std::size_t ch = 0; ch < nc; ++ch) {
                o[ch] = 0.25 * (a[ch] + b[ch] + d[ch] + e[ch]);
            }
        }
    }
}

inline void dense_sample(const CnnModel &m, Workspace &ws) {
    const auto &c = m.config;
    const std::size_t nh = c.hidden;
    std::copy(m.b1.begin(), m.b1.end(), ws.hidden.begin());
    for (std::size_t f = 0; f < c.features(); ++f) {
        const double v = ws.flat[f];
        if (v == 0.0) {
            continue;
        }
        const double *row = &m.w1[f * nh];
        for (std::size_t k = 0; k < nh; ++k) {
            ws.hidden[k] += v * row[k];
        }
    }
    for (auto &h : ws.hidden) {
        h = std::tanh(h);
    }
    std::copy(m.b2.begin(), m.b2.end(), ws.logits.begin());
    for (std::size_t k = 0; k < nh; ++k) {
        const double *row = &m.w2[k * c.classes];
        for (std::size_t o = 0; o < c.classes; ++o) {
            ws.logits[o] += ws.hidden[k] * row[o];
        }
    }
}

inline void forward_sample(const CnnModel &m, Workspace &ws, const double *img) {
    conv_sample(m, ws, img);
    pool_sample(m.config, ws.conv, ws.flat);
    dense_sample(m, ws);
}

/// Backward pass for the sample currently held in `ws`; adds scale * grad.
/// Returns the sample loss.
inline double backward_sample(const CnnModel &m, Workspace &ws, const double *img, int label,
                              double scale, Gradients &g) {
    const auto &c = m.config;
    const std::size_t nh = c.hidden;
    const std::size_t nc = c.classes;
    const double loss = sample_ce(ws.logits, label);
    softmax_into(ws.logits, ws.prob);

    // dL/dlogits = p - onehot
    ws.prob[static_cast<std::size_t>(label)] -= 1.0;
    for (std::size_t o = 0; o < nc; ++o) {
        g.b2[o] += scale * ws.prob[o];
    }
    for (std::size_t k = 0; k < nh; ++k) {
        const double *row = &m.w2[k * nc];
        double *grow = &g.w2[k * nc];
        double acc = 0.0;
        for (std::size_t o = 0; o < nc; ++o) {
            grow[o] += scale * ws.hidden[k] * ws.prob[o];
            acc += row[o] * ws.prob[o];
        }
        ws.d_hidden[k] = acc * (1.0 - ws.hidden[k] * ws.hidden[k]);
        g.b1[k] += scale * ws.d_hidden[k];
    }
    for (std::size_t f = 0; f < c.features(); ++f) {
        const double *row = &m.w1[f * nh];
        double *grow = &g.w1[f * nh];
        const double v = scale * ws.flat[f];
        double acc = 0.0;
        for (std::size_t k = 0; k < nh; ++k) {
            grow[k] += v * ws.d_hidden[k];
            acc += row[k] * ws.d_hidden[k];
        }
        ws.d_flat[f] = acc;
    }

    // each conv output feeds one pooled cell with weight 1/4
    const std::size_t ow = c.conv_width();
    const std::size_t pw = c.pool_width();
    for (std::size_t i = 0; i < c.conv_height(); ++i) {
        for (std::size_t j = 0; j < ow; ++j) {
            const double *d = &ws.d_flat[((i / 2) * pw + j / 2) * c.channels];
            bool gathered = false;
            for (std::size_t ch = 0; ch < c.channels; ++ch) {
                const double s = 0.25 * scale * d[ch];
                if (s == 0.0) {
                    continue;
                }
                if (!gathered) {
                    ws.gather(c, img, i, j);
                    gathered = true;
                }
                activations::eval_accumulate_grad(m.conv_kernels[ch], ws.trig[ch], ws.patch(),
                                                  g.conv[ch], s);
            }
        }
    }
    return loss;
}

} // namespace detail

/// Feature maps [B, H-k+1, W-k+1, C].
inline Tensor conv_forward(const CnnModel &m, const Tensor &images) {
    const auto &c = m.config;
    detail::check_images(c, images);
    const std::size_t batch = images.shape[0];
    Tensor out({batch, c.conv_height(), c.conv_width(), c.channels});
    detail::Workspace ws(m);
    const std::size_t per = ws.conv.size();
    for (std::size_t b = 0; b < batch; ++b) {
        detail::conv_sample(m, ws, images.data.data() + b * c.height * c.width);
        std::copy(ws.conv.begin(), ws.conv.end(), out.data.begin() + static_cast<std::ptrdiff_t>(b * per));
    }
    return out;
}

/// 2x2 non-overlapping means over [B, H, W, C].
inline Tensor avg_pool(const Tensor &x) {
    if (x.rank() != 4) {
        throw ShapeError("avg_pool expects [B,H,W,C], got " + x.shape_string());
    }
    const auto [batch, h, w, nc] = std::tuple{x.shape[0], x.shape[1], x.shape[2], x.shape[3]};
    if (h % 2 != 0 || w % 2 != 0) {
        throw ShapeError("avg_pool needs even spatial dims, got " + x.shape_string());
    }
    Tensor out({batch, h / 2, w / 2, nc});
    CnnConfig cfg;
    cfg.kernel = 1;
    cfg.height = h;
    cfg.width = w;
    cfg.channels = nc;
    const std::size_t in_per = h * w * nc;
    const std::size_t out_per = in_per / 4;
    for (std::size_t b = 0; b < batch; ++b) {
        detail::pool_sample(cfg, std::span(x.data).subspan(b * in_per, in_per),
                            std::span(out.data).subspan(b * out_per, out_per));
    }
    return out;
}

/// Intermediates kept for inspection and for the backward pass.
struct ForwardCache {
    Tensor pooled; ///< [B, features]
    Tensor hidden; ///< [B, hidden], post-tanh
};

struct ForwardResult {
    Tensor logits; ///< [B, classes]
    ForwardCache cache;
};

inline ForwardResult forward(const CnnModel &m, const Tensor &images) {
    const auto &c = m.config;
    detail::check_images(c, images);
    const std::size_t batch = images.shape[0];
    ForwardResult r{Tensor({batch, c.classes}), {Tensor({batch, c.features()}), Tensor({batch, c.hidden})}};
    detail::Workspace ws(m);
    for (std::size_t b = 0; b < batch; ++b) {
        detail::forward_sample(m, ws, images.data.data() + b * c.height * c.width);
        std::copy(ws.logits.begin(), ws.logits.end(), r.logits.data.begin() + static_cast<std::ptrdiff_t>(b * c.classes));
        std::copy(ws.flat.begin(), ws.flat.end(), r.cache.pooled.data.begin() + static_cast<std::ptrdiff_t>(b * c.features()));
        std::copy(ws.hidden.begin(), ws.hidden.end(), r.cache.hidden.data.begin() + static_cast<std::ptrdiff_t>(b * c.hidden));
    }
    return r;
}

inline Tensor softmax(const Tensor &logits) {
    if (logits.rank() != 2) {
        throw ShapeError("softmax expects [B,C], got " + logits.shape_string());
    }
    Tensor p(logits.shape);
    const std::size_t nc = logits.shape[1];
    for (std::size_t b = 0; b < logits.shape[0]; ++b) {
        detail::softmax_into(std::span(logits.data).subspan(b * nc, nc), std::span(p.data).subspan(b * nc, nc));
    }
    return p;
}

/// Mean cross-entropy of softmax(logits) against integer labels.
inline double loss_ce(const Tensor &logits, std::span<const int> labels) {
    if (logits.rank() != 2 || logits.shape[0] == 0) {
        throw ShapeError("loss_ce expects non-empty [B,C], got " + logits.shape_string());
    }
    const std::size_t batch = logits.shape[0];
    const std::size_t nc = logits.shape[1];
    detail::check_labels(labels, batch, nc);
    double total = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        total += detail::sample_ce(std::span(logits.data).subspan(b * nc, nc), labels[b]);
    }
    return total / static_cast<double>(batch);
}

struct LossAndGrad {
    double loss;
    Gradients grad;
};

/// Mean loss over the batch and its exact gradient.
inline LossAndGrad loss_and_gradient(const CnnModel &m, const Tensor &images, std::span<const int> labels) {
    const auto &c = m.config;
    detail::check_images(c, images);
    const std::size_t batch = images.shape[0];
    if (batch == 0) {
        throw ArgumentError("empty batch");
    }
    detail::check_labels(labels, batch, c.classes);
    LossAndGrad r{0.0, Gradients(m)};
    detail::Workspace ws(m);
    const double scale = 1.0 / static_cast<double>(batch);
    for (std::size_t b = 0; b < batch; ++b) {
        const double *img = images.data.data() + b * c.height * c.width;
        detail::forward_sample(m, ws, img);
        r.loss += detail::backward_sample(m, ws, img, labels[b], scale, r.grad);
    }
    r.loss *= scale;
    return r;
}

inline void apply_adam(CnnModel &m, const Gradients &g, double lr) {
    auto blocks = m.blocks();
    std::vector<std::span<double>> params;
    for (auto &b : blocks) {
        params.push_back(b.values);
    }
    const auto grads = g.blocks();
    m.adam.step(params, grads, lr);
}

/// One optimizer step on a batch. Returns the pre-step batch loss.
inline double backward_and_step(CnnModel &m, const Tensor &images, std::span<const int> labels, double lr) {
    auto lg = loss_and_gradient(m, images, labels);
    if (!std::isfinite(lg.loss)) {
        throw NumericalError("non-finite batch loss " + format_double(lg.loss));
    }
    apply_adam(m, lg.grad, lr);
    return lg.loss;
}

struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
};

/// Mean loss and accuracy over the full set.
inline Evaluation evaluate(const CnnModel &m, const ImageSet &set) {
    const auto &c = m.config;
    if (set.size() == 0) {
        throw ArgumentError("cannot evaluate an empty set");
    }
    detail::check_images(c, set.images);
    detail::check_labels(set.labels, set.size(), c.classes);
    detail::Workspace ws(m);
    double loss = 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        detail::forward_sample(m, ws, set.image(i));
        loss += detail::sample_ce(ws.logits, set.labels[i]);
        correct += detail::argmax(ws.logits) == static_cast<std::size_t>(set.labels[i]) ? 1 : 0;
    }
    const auto n = static_cast<double>(set.size());
    return {loss / n, static_cast<double>(correct) / n};
}

/// Seeded predictions (argmax class) for every image.
inline std::vector<int> predict(const CnnModel &m, const ImageSet &set) {
    detail::check_images(m.config, set.images);
    detail::Workspace ws(m);
    std::vector<int> out(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        detail::forward_sample(m, ws, set.image(i));
        out[i] = static_cast<int>(detail::argmax(ws.logits));
    }
    return out;
}

struct TrainOptions {
    int epochs = 5;
    std::size_t batch_size = 64;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    int start_epoch = 1; ///< > 1 when resuming; earlier epochs are skipped
};

/// Called after every epoch with the finished record and the current model.
using EpochCallback = std::function<void(const EpochRecord &, const CnnModel &)>;

/// Sample order for an epoch; depends only on (seed, epoch) so resumed runs
/// see the same batches as uninterrupted ones.
inline std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, int epoch) {
    Rng rng(seed, 0x10000 + static_cast<std::uint64_t>(epoch));
    return permutation(n, rng);
}

inline TrainReport train(CnnModel &m, const ImageSet &train_set, const ImageSet &test_set,
                         const TrainOptions &opt, const EpochCallback &on_epoch = {}) {
    if (train_set.size() == 0 || test_set.size() == 0) {
        throw ArgumentError("train and test sets must be non-empty");
    }
    if (opt.batch_size == 0) {
        throw ArgumentError("batch size must be positive");
    }
    const auto &c = m.config;
    detail::check_images(c, train_set.images);
    detail::check_images(c, test_set.images);
    detail::check_labels(train_set.labels, train_set.size(), c.classes);
    detail::check_labels(test_set.labels, test_set.size(), c.classes);

    const std::size_t pixels = c.height * c.width;
    TrainReport report;
    for (int epoch = opt.start_epoch; epoch <= opt.epochs; ++epoch) {
        const auto order = epoch_order(train_set.size(), opt.seed, epoch);
        for (std::size_t start = 0, batch_no = 0; start < order.size(); start += opt.batch_size, ++batch_no) {
            const std::size_t bs = std::min(opt.batch_size, order.size() - start);
            Tensor images({bs, c.height, c.width});
            std::vector<int> labels(bs);
            for (std::size_t b = 0; b < bs; ++b) {
                const std::size_t idx = order[start + b];
                std::copy_n(train_set.image(idx), pixels, images.data.begin() + static_cast<std::ptrdiff_t>(b * pixels));
                labels[b] = train_set.labels[idx];
            }
            try {
                backward_and_step(m, images, labels, opt.lr);
            } catch (const NumericalError &e) {
                throw NumericalError(std::string(e.what()) + " at epoch " + std::to_string(epoch) +
                                     ", batch " + std::to_string(batch_no));
            }
        }
        const auto tr = evaluate(m, train_set);
        const auto te = evaluate(m, test_set);
        EpochRecord rec{epoch, tr.loss, tr.accuracy, te.loss, te.accuracy};
        report.records.push_back(rec);
        if (on_epoch) {
            on_epoch(rec, m);
        }
    }
    return report;
}

} // namespace qiml::nngine
