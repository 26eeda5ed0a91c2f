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
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "qiml/nngine.hpp"
#include "qiml/random.hpp"

using namespace qiml;
using namespace qiml::nngine;

namespace {

CnnConfig tiny(Kind kind) {
    CnnConfig c;
    c.height = 4;
    c.width = 4;
    c.channels = 2;
    c.hidden = 8;
    c.classes = 10;
    c.kind = kind;
    return c;
}

Tensor random_images(std::size_t batch, std::size_t h, std::size_t w, std::uint64_t seed) {
    Rng rng(seed);
    Tensor t({batch, h, w});
    for (auto &v : t.data) {
        v = rng.uniform();
    }
    return t;
}

ImageSet random_set(std::size_t n, std::size_t h, std::size_t w, std::uint64_t seed) {
    ImageSet s;
    s.images = random_images(n, h, w, seed);
    Rng rng(seed, 7);
    for (std::size_t i = 0; i < n; ++i) {
        s.labels.push_back(static_cast<int>(rng.index(10)));
    }
    return s;
}

// Loss recomputed from scratch with the slow per-patch API and plain loops.
double reference_loss(const CnnModel &m, const Tensor &images, const std::vector<int> &labels) {
    const auto &c = m.config;
    const std::size_t oh = c.conv_height(), ow = c.conv_width();
    double total = 0.0;
    for (std::size_t b = 0; b < images.shape[0]; ++b) {
        std::vector<double> flat(c.features(), 0.0);
        for (std::size_t i = 0; i < oh; ++i) {
            for (std::size_t j = 0; j < ow; ++j) {
                std::vector<double> patch;
                for (std::size_t di = 0; di < c.kernel; ++di) {
                    for (std::size_t dj = 0; dj < c.kernel; ++dj) {
                        patch.push_back(images.data[(b * c.height + i + di) * c.width + j + dj]);
                    }
                }
                for (std::size_t ch = 0; ch < c.channels; ++ch) {
                    flat[((i / 2) * (ow / 2) + j / 2) * c.channels + ch] +=
                        0.25 * activations::eval(m.conv_kernels[ch], patch);
                }
            }
        }
        std::vector<double> h(c.hidden);
        for (std::size_t k = 0; k < c.hidden; ++k) {
            double s = m.b1[k];
            for (std::size_t f = 0; f < flat.size(); ++f) {
                s += flat[f] * m.w1[f * c.hidden + k];
            }
            h[k] = std::tanh(s);
        }
        std::vector<double> z(c.classes);
        double norm = 0.0;
        for (std::size_t o = 0; o < c.classes; ++o) {
            z[o] = m.b2[o];
            for (std::size_t k = 0; k < c.hidden; ++k) {
                z[o] += h[k] * m.w2[k * c.classes + o];
            }
            norm += std::exp(z[o]);
        }
        total += std::log(norm) - z[static_cast<std::size_t>(labels[b])];
    }
    return total / static_cast<double>(images.shape[0]);
}

} // namespace

TEST(CnnConfig, PaperShape) {
    CnnConfig c;
    EXPECT_EQ(c.conv_height(), 26u);
    EXPECT_EQ(c.pool_height(), 13u);
    EXPECT_EQ(c.features(), 2704u);
    const auto m = CnnModel::init(c, 1);
    EXPECT_EQ(m.w1.size(), 2704u * 64u);
    EXPECT_EQ(m.w2.size(), 640u);
    EXPECT_EQ(m.conv_kernels.size(), 16u);
}

TEST(CnnConfig, OddConvOutputRejected) {
    CnnConfig c;
    c.height = 27;
    EXPECT_THROW(c.validate(), ShapeError);
}

TEST(CnnModel, InitIsSeededAndGlorotBounded) {
    const auto a = CnnModel::init({}, 3);
    const auto b = CnnModel::init({}, 3);
    EXPECT_EQ(a.w1, b.w1);
    EXPECT_EQ(a.conv_kernels[5].params, b.conv_kernels[5].params);
    const double lim = std::sqrt(6.0 / (2704.0 + 64.0));
    for (double v : a.w1) {
        ASSERT_LE(std::abs(v), lim);
    }
    EXPECT_NE(a.w1, CnnModel::init({}, 4).w1);
}

TEST(ConvForward, Af3ZeroBackground) {
    auto m = CnnModel::zeros({});
    for (auto &k : m.conv_kernels) {
        std::fill(k.params.begin(), k.params.end(), std::numbers::pi / 2);
    }
    const auto out = conv_forward(m, Tensor({2, 28, 28}));
    EXPECT_EQ(out.shape, (std::vector<std::size_t>{2, 26, 26, 16}));
    for (double v : out.data) {
        ASSERT_EQ(v, 0.0);
    }
}

TEST(ConvForward, Af1ZeroWeights) {
    CnnConfig c;
    c.kind = Kind::AF1;
    const auto m = CnnModel::zeros(c);
    const auto out = conv_forward(m, random_images(1, 28, 28, 2));
    for (double v : out.data) {
        ASSERT_EQ(v, 0.0);
    }
}

TEST(ConvForward, SinglePatchMatchesKernelEval) {
    for (Kind kind : activations::kAllKinds) {
        CnnConfig c;
        c.height = c.width = 3;
        c.kind = kind;
        // 1x1 conv output cannot be pooled, so only the conv stage is exercised
        CnnModel m;
        m.config = c;
        Rng rng(11);
        for (int ch = 0; ch < 3; ++ch) {
            m.conv_kernels.push_back(ActivationKernel::random(kind, 9, rng));
        }
        m.config.channels = 3;
        const auto img = random_images(1, 3, 3, 5);
        const auto out = conv_forward(m, img);
        ASSERT_EQ(out.size(), 3u);
        for (std::size_t ch = 0; ch < 3; ++ch) {
            EXPECT_DOUBLE_EQ(out.data[ch], activations::eval(m.conv_kernels[ch], img.data)) << to_string(kind);
        }
    }
}

TEST(ConvForward, WrongShape) {
    const auto m = CnnModel::zeros({});
    EXPECT_THROW(conv_forward(m, Tensor({1, 28, 27})), ShapeError);
    EXPECT_THROW(conv_forward(m, Tensor({28, 28})), ShapeError);
}

TEST(AvgPool, Examples) {
    Tensor x({1, 2, 2, 1}, {0, 0, 0, 4});
    EXPECT_EQ(avg_pool(x).data, std::vector<double>{1.0});

    Tensor c({2, 26, 26, 3}, 0.7);
    const auto p = avg_pool(c);
    EXPECT_EQ(p.shape, (std::vector<std::size_t>{2, 13, 13, 3}));
    for (double v : p.data) {
        ASSERT_DOUBLE_EQ(v, 0.7);
    }
    EXPECT_THROW(avg_pool(Tensor({1, 3, 4, 1})), ShapeError);
}

TEST(AvgPool, Linear) {
    Rng rng(9);
    Tensor a({1, 6, 4, 2}), b({1, 6, 4, 2}), s({1, 6, 4, 2});
    for (std::size_t i = 0; i < a.size(); ++i) {
        a.data[i] = rng.uniform(-1, 1);
        b.data[i] = rng.uniform(-1, 1);
        s.data[i] = a.data[i] + b.data[i];
    }
    const auto pa = avg_pool(a), pb = avg_pool(b), ps = avg_pool(s);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        EXPECT_NEAR(ps.data[i], pa.data[i] + pb.data[i], 1e-15);
    }
}

TEST(Forward, ZeroParamsGiveUniformProbabilities) {
    const auto m = CnnModel::zeros({});
    const auto r = forward(m, random_images(3, 28, 28, 1));
    const auto p = softmax(r.logits);
    for (double v : p.data) {
        EXPECT_NEAR(v, 0.1, 1e-15);
    }
    EXPECT_NEAR(loss_ce(r.logits, std::vector<int>{0, 4, 9}), std::log(10.0), 1e-14);
}

TEST(Forward, BatchRowsAreIndependent) {
    const auto m = CnnModel::init(tiny(Kind::AF3), 2);
    auto imgs = random_images(3, 4, 4, 8);
    const auto r = forward(m, imgs);
    // swap samples 0 and 2
    Tensor swapped = imgs;
    std::swap_ranges(swapped.data.begin(), swapped.data.begin() + 16, swapped.data.begin() + 32);
    const auto rs = forward(m, swapped);
    for (std::size_t o = 0; o < 10; ++o) {
        EXPECT_EQ(r.logits.data[o], rs.logits.data[20 + o]);
        EXPECT_EQ(r.logits.data[10 + o], rs.logits.data[10 + o]);
    }
    Tensor same({2, 4, 4});
    std::copy_n(imgs.data.begin(), 16, same.data.begin());
    std::copy_n(imgs.data.begin(), 16, same.data.begin() + 16);
    const auto rr = forward(m, same);
    for (std::size_t o = 0; o < 10; ++o) {
        EXPECT_EQ(rr.logits.data[o], rr.logits.data[10 + o]);
    }
}

TEST(LossCe, Examples) {
    Tensor z({1, 10}, 0.0);
    z.data[3] = 1000.0;
    EXPECT_NEAR(loss_ce(z, std::vector<int>{3}), 0.0, 1e-300);

    Tensor two({2, 10}, 0.0);
    two.data[1] = 2.0;
    two.data[15] = -1.0;
    const double l0 = loss_ce(Tensor({1, 10}, std::vector<double>(two.data.begin(), two.data.begin() + 10)), std::vector<int>{0});
    const double l1 = loss_ce(Tensor({1, 10}, std::vector<double>(two.data.begin() + 10, two.data.end())), std::vector<int>{5});
    EXPECT_NEAR(loss_ce(two, std::vector<int>{0, 5}), 0.5 * (l0 + l1), 1e-15);
}

TEST(LossCe, BadLabel) {
    Tensor z({1, 10}, 0.0);
    EXPECT_THROW(loss_ce(z, std::vector<int>{10}), ArgumentError);
    EXPECT_THROW(loss_ce(z, std::vector<int>{-1}), ArgumentError);
}

TEST(LossCe, LargeLogitsStayFinite) {
    Rng rng(4);
    Tensor z({20, 10});
    for (auto &v : z.data) {
        v = rng.uniform(-1e4, 1e4);
    }
    std::vector<int> labels(20, 2);
    EXPECT_TRUE(std::isfinite(loss_ce(z, labels)));
    const auto p = softmax(z);
    for (std::size_t b = 0; b < 20; ++b) {
        double s = 0.0;
        for (std::size_t o = 0; o < 10; ++o) {
            s += p.data[b * 10 + o];
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(Gradient, LossMatchesReferenceForward) {
    for (Kind kind : activations::kAllKinds) {
        const auto m = CnnModel::init(tiny(kind), 21);
        const auto imgs = random_images(3, 4, 4, 22);
        const std::vector<int> labels{1, 7, 3};
        EXPECT_NEAR(loss_and_gradient(m, imgs, labels).loss, reference_loss(m, imgs, labels), 1e-12)
            << to_string(kind);
    }
}

TEST(Gradient, MatchesFiniteDifferencesOnTinyConfig) {
    for (Kind kind : activations::kAllKinds) {
        auto m = CnnModel::init(tiny(kind), 31);
        const auto imgs = random_images(3, 4, 4, 32);
        const std::vector<int> labels{2, 5, 9};
        const auto lg = loss_and_gradient(m, imgs, labels);
        const auto analytic = lg.grad.blocks();
        auto blocks = m.blocks();
        const double h = 1e-6;
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            for (std::size_t i = 0; i < blocks[bi].values.size(); ++i) {
                double &p = blocks[bi].values[i];
                const double saved = p;
                p = saved + h;
                const double up = reference_loss(m, imgs, labels);
                p = saved - h;
                const double down = reference_loss(m, imgs, labels);
                p = saved;
                const double numeric = (up - down) / (2 * h);
                const double a = analytic[bi][i];
                const double denom = std::max({std::abs(a), std::abs(numeric), 1e-3});
                EXPECT_LE(std::abs(a - numeric) / denom, 1e-4)
                    << to_string(kind) << " " << blocks[bi].name << "[" << i << "] analytic " << a
                    << " numeric " << numeric;
            }
        }
    }
}

TEST(Step, ZeroLearningRateKeepsParameters) {
    auto m = CnnModel::init(tiny(Kind::AF4), 5);
    const auto before = m;
    backward_and_step(m, random_images(4, 4, 4, 6), std::vector<int>{0, 1, 2, 3}, 0.0);
    EXPECT_EQ(m.w1, before.w1);
    EXPECT_EQ(m.b2, before.b2);
    EXPECT_EQ(m.conv_kernels[1].params, before.conv_kernels[1].params);
    EXPECT_EQ(m.adam.step_count, 1);
}

TEST(Step, SmallStepDecreasesSampleLoss) {
    for (Kind kind : activations::kAllKinds) {
        auto m = CnnModel::init(tiny(kind), 41);
        const auto img = random_images(1, 4, 4, 42);
        const std::vector<int> label{6};
        const double before = backward_and_step(m, img, label, 1e-4);
        EXPECT_LT(loss_and_gradient(m, img, label).loss, before) << to_string(kind);
    }
}

TEST(Step, NonFiniteLossAborts) {
    auto m = CnnModel::init(tiny(Kind::AF3), 5);
    m.b2[0] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(backward_and_step(m, random_images(1, 4, 4, 1), std::vector<int>{0}, 1e-3), NumericalError);
}

TEST(Train, ZeroEpochs) {
    auto m = CnnModel::init(tiny(Kind::AF3), 1);
    TrainOptions opt;
    opt.epochs = 0;
    const auto report = train(m, random_set(8, 4, 4, 1), random_set(4, 4, 4, 2), opt);
    EXPECT_TRUE(report.records.empty());
    EXPECT_THROW(static_cast<void>(report.optimal_epoch()), ArgumentError);
}

TEST(Train, EmptySetRejected) {
    auto m = CnnModel::init(tiny(Kind::AF3), 1);
    ImageSet empty;
    empty.images = Tensor({0, 4, 4});
    EXPECT_THROW(train(m, empty, random_set(4, 4, 4, 2), {}), ArgumentError);
}

TEST(Train, DeterministicAndResumable) {
    const auto tr = random_set(40, 4, 4, 11);
    const auto te = random_set(10, 4, 4, 12);
    TrainOptions opt;
    opt.epochs = 4;
    opt.batch_size = 8;
    opt.lr = 1e-2;
    opt.seed = 99;

    auto a = CnnModel::init(tiny(Kind::AF3), 7);
    auto b = CnnModel::init(tiny(Kind::AF3), 7);
    const auto ra = train(a, tr, te, opt);
    const auto rb = train(b, tr, te, opt);
    EXPECT_EQ(ra, rb);
    ASSERT_EQ(ra.records.size(), 4u);
    EXPECT_LT(ra.records.back().train_loss, ra.records.front().train_loss);

    // stop after two epochs and continue from the saved model
    auto c = CnnModel::init(tiny(Kind::AF3), 7);
    opt.epochs = 2;
    auto first = train(c, tr, te, opt);
    opt.epochs = 4;
    opt.start_epoch = 3;
    const auto rest = train(c, tr, te, opt);
    first.records.insert(first.records.end(), rest.records.begin(), rest.records.end());
    EXPECT_EQ(first, ra);
    EXPECT_EQ(c.w1, a.w1);
}

TEST(TrainReport, OptimalEpochIsArgminTestLoss) {
    TrainReport r;
    r.records = {{1, 0, 0, 0.5, 0}, {2, 0, 0, 0.3, 0}, {3, 0, 0, 0.3, 0}, {4, 0, 0, 0.4, 0}};
    EXPECT_EQ(r.optimal_epoch(), 2);
}

TEST(Metrics, CsvFormat) {
    TrainReport r;
    r.records = {{1, 0.5, 0.25, 1.0 / 3.0, 1.0}};
    std::ostringstream os;
    write_metrics_csv(os, r);
    EXPECT_EQ(os.str(), "epoch,train_loss,train_acc,test_loss,test_acc\n1,0.5,0.25,0.3333333333333333,1\n");
}
