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

#include <unistd.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <filesystem>
#include <limits>
#include <sstream>

#include "qiml/checkpoint.hpp"
#include "qiml/nngine.hpp"
#include "qiml/persist.hpp"
#include "qiml/qcpn.hpp"
#include "qiml/random.hpp"

using namespace qiml;
namespace fs = std::filesystem;

namespace {

std::string to_text(const Checkpoint &c) {
    std::ostringstream os;
    write_checkpoint(os, c);
    return os.str();
}

Checkpoint from_text(const std::string &s) {
    std::istringstream is(s);
    return read_checkpoint(is);
}

Checkpoint sample_checkpoint() {
    Checkpoint c;
    c.epoch = 3;
    c.config = {{"activation", "af3"}, {"lr", "0.001"}, {"note", "two words"}};
    c.metrics = {{1, 0.5, 0.75, 0.6, 0.7}, {2, 1.0 / 3.0, 0.8, 0.4, 0.9}};
    Rng rng(8);
    std::vector<double> v(11);
    for (auto &x : v) {
        x = rng.uniform(-1e3, 1e3) * std::pow(10.0, rng.uniform(-300, 300) / 10);
    }
    v[0] = 0.1;
    v[1] = -0.0;
    v[2] = std::numeric_limits<double>::denorm_min();
    v[3] = std::numeric_limits<double>::max();
    c.arrays = {{"w", v}, {"empty", {}}, {"one", {std::numbers::pi}}};
    return c;
}

nngine::CnnConfig tiny() {
    nngine::CnnConfig c;
    c.height = c.width = 6;
    c.channels = 3;
    c.hidden = 5;
    return c;
}

ImageSet random_set(std::size_t n, std::uint64_t seed) {
    ImageSet s;
    Rng rng(seed);
    s.images = Tensor({n, 6, 6});
    for (auto &v : s.images.data) {
        v = rng.uniform();
    }
    for (std::size_t i = 0; i < n; ++i) {
        s.labels.push_back(static_cast<int>(rng.index(10)));
    }
    return s;
}

} // namespace

TEST(Checkpoint, BitExactRoundTrip) {
    const auto c = sample_checkpoint();
    const std::string text = to_text(c);
    const auto back = from_text(text);
    ASSERT_EQ(back.arrays.size(), c.arrays.size());
    for (std::size_t i = 0; i < c.arrays.size(); ++i) {
        ASSERT_EQ(back.arrays[i].second.size(), c.arrays[i].second.size());
        for (std::size_t j = 0; j < c.arrays[i].second.size(); ++j) {
            EXPECT_EQ(std::bit_cast<std::uint64_t>(back.arrays[i].second[j]),
                      std::bit_cast<std::uint64_t>(c.arrays[i].second[j]));
        }
    }
    EXPECT_EQ(back, c);
    EXPECT_EQ(to_text(back), text);
}

TEST(Checkpoint, FileRoundTrip) {
    const auto path = (fs::temp_directory_path() / ("qiml_ckpt_" + std::to_string(::getpid()))).string();
    save_checkpoint(path, sample_checkpoint());
    EXPECT_FALSE(fs::exists(path + ".tmp"));
    EXPECT_EQ(load_checkpoint(path), sample_checkpoint());
    fs::remove(path);
}

TEST(Checkpoint, UnknownVersion) {
    std::string text = to_text(sample_checkpoint());
    text.replace(text.find(" 1\n"), 3, " 7\n");
    EXPECT_THROW(from_text(text), FormatError);
    EXPECT_THROW(from_text("not a checkpoint\n"), FormatError);
}

TEST(Checkpoint, CorruptSectionIsNamed) {
    const std::string text = to_text(sample_checkpoint());
    auto expect_named = [](const std::string &broken, const std::string &section) {
        try {
            from_text(broken);
            FAIL() << "expected a parse error for " << section;
        } catch (const ParseError &e) {
            EXPECT_NE(std::string(e.what()).find(section), std::string::npos) << e.what();
        }
    };
    std::string bad_value = text;
    bad_value.replace(bad_value.find("0.10000000000000001"), 19, "0.1x");
    expect_named(bad_value, "array w");

    std::string bad_metric = text;
    bad_metric.replace(bad_metric.find("1 0.5 0.75"), 10, "1 0.5");
    expect_named(bad_metric, "metrics");

    expect_named(text.substr(0, text.find("section array one")), "array");
    std::string short_array = text;
    short_array.replace(short_array.find("section array w 11"), 18, "section array w 12");
    expect_named(short_array, "array w");
}

TEST(Persist, CnnRoundTripIncludesOptimizer) {
    auto m = nngine::CnnModel::init(tiny(), 4);
    const auto set = random_set(16, 1);
    nngine::backward_and_step(m, set.images, set.labels, 1e-3);
    const auto c = persist::to_checkpoint(m, {{"seed", "4"}}, 1, {});
    const auto back = persist::cnn_from_checkpoint(from_text(to_text(c)));
    EXPECT_EQ(back.config, m.config);
    EXPECT_EQ(back.w1, m.w1);
    EXPECT_EQ(back.conv_kernels[2].params, m.conv_kernels[2].params);
    EXPECT_EQ(back.adam.m, m.adam.m);
    EXPECT_EQ(back.adam.v, m.adam.v);
    EXPECT_EQ(back.adam.step_count, 1);
    EXPECT_EQ(c.get("seed"), "4");
    EXPECT_EQ(c.get("activation"), "af3");
}

TEST(Persist, WrongModelKind) {
    const auto c = persist::to_checkpoint(nngine::CnnModel::init(tiny(), 1), {}, 0, {});
    EXPECT_THROW(persist::qcpn_from_checkpoint(c), FormatError);
}

TEST(Persist, ResumeWithZeroEpochsReproducesSnapshot) {
    const auto tr = random_set(24, 2);
    const auto te = random_set(8, 3);
    nngine::TrainOptions opt;
    opt.epochs = 2;
    opt.batch_size = 8;
    opt.seed = 5;
    auto m = nngine::CnnModel::init(tiny(), 5);
    const auto report = nngine::train(m, tr, te, opt);
    const auto text = to_text(persist::to_checkpoint(m, {}, 2, report.records));

    const auto loaded = from_text(text);
    const auto resumed = persist::cnn_from_checkpoint(loaded);
    const auto a = nngine::evaluate(resumed, tr);
    const auto b = nngine::evaluate(resumed, te);
    EXPECT_EQ(a.loss, loaded.metrics.back().train_loss);
    EXPECT_EQ(a.accuracy, loaded.metrics.back().train_acc);
    EXPECT_EQ(b.loss, loaded.metrics.back().test_loss);
    EXPECT_EQ(b.accuracy, loaded.metrics.back().test_acc);
}

TEST(Persist, ResumedTrainingMatchesUninterrupted) {
    const auto d = qcpn::gen_dataset(qcpn::Target::P6, 200, 50, 9);
    qcpn::RegressionOptions opt;
    opt.epochs = 6;
    opt.seed = 9;
    auto full = qcpn::HybridQcpn::init(d.domain, 2, 8, 9);
    const auto all = qcpn::train_qcpn(full, d, opt);

    auto part = qcpn::HybridQcpn::init(d.domain, 2, 8, 9);
    opt.epochs = 3;
    const auto first = qcpn::train_qcpn(part, d, opt);
    auto resumed = persist::qcpn_from_checkpoint(from_text(to_text(persist::to_checkpoint(part, {}, 3, first.records))));
    opt.epochs = 6;
    opt.start_epoch = 4;
    const auto rest = qcpn::train_qcpn(resumed, d, opt);
    ASSERT_EQ(rest.records.size(), 3u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(rest.records[static_cast<std::size_t>(i)], all.records[static_cast<std::size_t>(i) + 3]);
    }
    EXPECT_EQ(resumed.a, full.a);

    auto base = qcpn::BaselineNn::init(d.domain, 4, 1);
    const auto bb = persist::baseline_from_checkpoint(from_text(to_text(persist::to_checkpoint(base, {}, 0, {}))));
    EXPECT_EQ(bb.w1, base.w1);
    EXPECT_EQ(bb.domain, base.domain);
}
