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
// Command-line driver: oracle verification, CNN and Chebyshev-network
// training, feature-map export and circuit projection.
//
// Exit codes: 0 success, 1 verification failure, 2 data error,
// 3 numerical abort, 64 usage error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qiml/activations.hpp"
#include "qiml/checkpoint.hpp"
#include "qiml/closedform.hpp"
#include "qiml/datasets.hpp"
#include "qiml/metrics.hpp"
#include "qiml/nngine.hpp"
#include "qiml/persist.hpp"
#include "qiml/qcpn.hpp"
#include "qiml/qsim.hpp"
#include "qiml/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace qiml;

namespace {

enum Exit : int { kOk = 0, kVerifyFailed = 1, kDataError = 2, kNumerical = 3, kUsage = 64 };

struct UsageError : Error {
    using Error::Error;
};

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_atomic(const fs::path &path, const std::string &text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw IoError("cannot write " + tmp.string());
        }
        f << text;
        if (!f.flush()) {
            throw IoError("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

std::string metrics_text(const std::vector<EpochRecord> &records) {
    std::ostringstream os;
    write_metrics_csv(os, TrainReport{records});
    return os.str();
}

/// Runs `body`, maps failures onto exit codes and writes manifest.json.
int run_command(const std::string &command, const fs::path &out, const json &config, std::uint64_t seed,
                const std::function<int()> &body) {
    const std::string start = utc_now();
    int code = kOk;
    std::string error;
    try {
        fs::create_directories(out);
        code = body();
    } catch (const UsageError &e) {
        code = kUsage;
        error = e.what();
    } catch (const ArgumentError &e) {
        code = kUsage;
        error = e.what();
    } catch (const NumericalError &e) {
        code = kNumerical;
        error = e.what();
    } catch (const IoError &e) {
        code = kDataError;
        error = e.what();
    } catch (const FormatError &e) {
        code = kDataError;
        error = e.what();
    } catch (const LengthError &e) {
        code = kDataError;
        error = e.what();
    } catch (const ParseError &e) {
        code = kDataError;
        error = e.what();
    } catch (const SizeError &e) {
        code = kDataError;
        error = e.what();
    } catch (const IndexError &e) {
        code = kDataError;
        error = e.what();
    } catch (const DomainError &e) {
        code = kUsage;
        error = e.what();
    } catch (const fs::filesystem_error &e) {
        code = kDataError;
        error = e.what();
    }
    if (!error.empty()) {
        std::cerr << "qiml " << command << ": " << error << "\n";
    }
    json manifest;
    manifest["command"] = command;
    manifest["config"] = config;
    manifest["seed"] = seed;
    manifest["start"] = start;
    manifest["end"] = utc_now();
    manifest["output_dir"] = out.string();
    manifest["exit_status"] = code;
    if (!error.empty()) {
        manifest["error"] = error;
    }
    try {
        fs::create_directories(out);
        write_atomic(out / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception &e) {
        std::cerr << "qiml " << command << ": could not write manifest: " << e.what() << "\n";
        if (code == kOk) {
            code = kDataError;
        }
    }
    return code;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    std::vector<std::string> suites;
    int max_n = 12;
    int draws = 100;
    double tol = 1e-10;
    std::uint64_t seed = 1;
    std::string out = "runs/verify";
};

int cmd_verify(const VerifyArgs &a) {
    verify::Options o{a.max_n, a.draws, a.tol, a.seed};
    std::vector<std::string> suites = a.suites;
    if (suites.empty()) {
        suites.assign(verify::kSuites.begin(), verify::kSuites.end());
    }
    bool all_pass = true;
    std::ostringstream table;
    table << std::left << std::setw(8) << "suite" << std::setw(9) << "n-range" << std::setw(7) << "draws"
          << std::setw(15) << "max-deviation" << std::setw(11) << "tolerance" << "status\n";
    for (const auto &s : suites) {
        const auto r = verify::run_suite(s, o);
        all_pass = all_pass && r.pass;
        std::ostringstream dev, tol;
        dev << std::scientific << std::setprecision(3) << r.max_deviation;
        tol << std::scientific << std::setprecision(0) << r.tolerance;
        table << std::left << std::setw(8) << r.suite << std::setw(9)
              << (std::to_string(r.n_lo) + ".." + std::to_string(r.n_hi)) << std::setw(7) << r.draws << std::setw(15)
              << dev.str() << std::setw(11) << tol.str() << (r.pass ? "pass" : "FAIL");
        if (!r.note.empty()) {
            table << "  (" << r.note << ")";
        }
        table << "\n";
    }
    std::cout << table.str();
    write_atomic(fs::path(a.out) / "verify.txt", table.str());

    std::ostringstream report;
    closedform::write_discrepancy_report(report, closedform::discrepancy_report(a.max_n, a.draws, a.seed));
    write_atomic(fs::path(a.out) / "qc2_discrepancy.txt", report.str());
    std::cout << "printed-vs-derived expression report: " << (fs::path(a.out) / "qc2_discrepancy.txt").string() << "\n";
    std::cout << (all_pass ? "all suites pass" : "verification FAILED") << "\n";
    return all_pass ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------
// train-cnn

struct CnnArgs {
    std::string dataset = "mnist";
    std::string activation = "af3";
    int epochs = 5;
    std::size_t batch = 64;
    double lr = 1e-3;
    std::uint64_t seed = 42;
    std::size_t n_train = 8000;
    std::size_t n_test = 2000;
    std::size_t channels = 16;
    std::size_t hidden = 64;
    std::string data_dir;
    std::string out = "runs/train-cnn";
    std::string resume;
};

std::string ckpt_name(int epoch) {
    std::ostringstream os;
    os << "epoch-" << std::setw(3) << std::setfill('0') << epoch << ".ckpt";
    return os.str();
}

int cmd_train_cnn(CnnArgs a, const std::string &data_root) {
    nngine::CnnModel model;
    std::vector<EpochRecord> records;
    int start = 1;
    if (!a.resume.empty()) {
        const auto ck = load_checkpoint(a.resume);
        model = persist::cnn_from_checkpoint(ck);
        records = ck.metrics;
        start = ck.epoch + 1;
        // the run is defined by the checkpoint; only the epoch target comes from the flags
        a.dataset = ck.get("dataset");
        a.seed = std::stoull(ck.get("seed"));
        a.n_train = std::stoul(ck.get("n_train"));
        a.n_test = std::stoul(ck.get("n_test"));
        a.batch = std::stoul(ck.get("batch"));
        a.lr = detail::parse_real(ck.get("lr"), "config");
        a.activation = ck.get("activation");
    } else {
        nngine::CnnConfig cfg;
        cfg.kind = activations::parse_kind(a.activation);
        cfg.channels = a.channels;
        cfg.hidden = a.hidden;
        model = nngine::CnnModel::init(cfg, a.seed);
    }
    const auto split = datasets::load_split(datasets::parse_dataset(a.dataset), a.n_train, a.n_test, a.seed, data_root);
    if (split.train.height() != model.config.height || split.train.width() != model.config.width) {
        throw FormatError("images are " + std::to_string(split.train.height()) + "x" +
                          std::to_string(split.train.width()) + ", model expects " +
                          std::to_string(model.config.height) + "x" + std::to_string(model.config.width));
    }
    const fs::path out(a.out);
    fs::create_directories(out / "checkpoints");
    const persist::Config run{{"dataset", a.dataset},
                              {"seed", std::to_string(a.seed)},
                              {"n_train", std::to_string(a.n_train)},
                              {"n_test", std::to_string(a.n_test)},
                              {"batch", std::to_string(a.batch)},
                              {"lr", detail::g17(a.lr)},
                              {"data_digests", [&] {
                                   std::string s;
                                   for (const auto &d : split.train.digests) {
                                       s += (s.empty() ? "" : ";") + d;
                                   }
                                   return s;
                               }()}};
    nngine::TrainOptions opt;
    opt.epochs = a.epochs;
    opt.batch_size = a.batch;
    opt.lr = a.lr;
    opt.seed = a.seed;
    opt.start_epoch = start;
    std::cout << "train-cnn " << a.dataset << " " << a.activation << ": " << split.train.size() << " train / "
              << split.test.size() << " test, epochs " << start << ".." << a.epochs << "\n";
    nngine::train(model, split.train, split.test, opt, [&](const EpochRecord &r, const nngine::CnnModel &m) {
        records.push_back(r);
        write_atomic(out / "metrics.csv", metrics_text(records));
        save_checkpoint((out / "checkpoints" / ckpt_name(r.epoch)).string(),
                        persist::to_checkpoint(m, run, r.epoch, records));
        std::cout << "epoch " << r.epoch << "  train loss " << format_double(r.train_loss) << " acc "
                  << format_double(r.train_acc) << "  test loss " << format_double(r.test_loss) << " acc "
                  << format_double(r.test_acc) << std::endl;
    });
    write_atomic(out / "metrics.csv", metrics_text(records));
    if (!records.empty()) {
        const TrainReport report{records};
        const auto &best = report.record(report.optimal_epoch());
        std::cout << "optimal epoch " << best.epoch << "  train acc " << format_double(best.train_acc)
                  << "  test acc " << format_double(best.test_acc) << "\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// train-qcpn

struct QcpnArgs {
    std::string target = "p5";
    int order = 12;
    std::size_t units = 2;
    std::size_t terms = 10;
    int epochs = 200;
    double lr = 0.05;
    double lr_decay = 0.97;
    std::size_t batch = 50;
    std::uint64_t seed = 7;
    std::size_t n_train = 5000;
    std::size_t n_test = 1000;
    std::vector<double> domain;
    bool baseline = false;
    std::size_t hidden = 16;
    std::string out = "runs/train-qcpn";
};

int cmd_train_qcpn(const QcpnArgs &a) {
    const auto target = qcpn::parse_target(a.target);
    std::optional<std::vector<qcpn::Interval>> domain;
    if (!a.domain.empty()) {
        if (a.domain.size() != 2 * qcpn::input_dim(target)) {
            throw UsageError("--domain needs " + std::to_string(2 * qcpn::input_dim(target)) + " values for " +
                             a.target);
        }
        domain.emplace();
        for (std::size_t i = 0; i < a.domain.size(); i += 2) {
            domain->push_back({a.domain[i], a.domain[i + 1]});
        }
    }
    const auto data = qcpn::gen_dataset(target, a.n_train, a.n_test, a.seed, domain);
    qcpn::RegressionOptions opt;
    opt.epochs = a.epochs;
    opt.batch_size = a.batch;
    opt.lr = a.lr;
    opt.lr_decay = a.lr_decay;
    opt.seed = a.seed;
    const fs::path out(a.out);
    const std::size_t terms = qcpn::input_dim(target) == 1 ? a.units : a.terms;
    const persist::Config run{{"target", qcpn::to_string(target)}, {"seed", std::to_string(a.seed)},
                              {"n_train", std::to_string(a.n_train)}, {"n_test", std::to_string(a.n_test)},
                              {"batch", std::to_string(a.batch)},      {"lr", detail::g17(a.lr)},
                              {"lr_decay", detail::g17(a.lr_decay)}};

    auto model = qcpn::HybridQcpn::init(data.domain, terms, a.order, a.seed);
    const auto report = qcpn::train_qcpn(model, data, opt);
    write_atomic(out / "metrics.csv", metrics_text(report.records));
    {
        std::ostringstream p;
        qcpn::write_predictions(p, model, target, data.domain);
        write_atomic(out / "predictions.csv", p.str());
    }
    save_checkpoint((out / "qcpn.ckpt").string(), persist::to_checkpoint(model, run, a.epochs, report.records));
    if (!report.records.empty()) {
        std::cout << "qcpn " << qcpn::to_string(target) << " (" << terms << " terms, order " << a.order
                  << ")  final test MSE " << format_double(report.records.back().test_loss) << "\n";
    }

    if (a.baseline) {
        auto base = qcpn::BaselineNn::init(data.domain, a.hidden, a.seed);
        const auto br = qcpn::train_baseline(base, data, opt);
        write_atomic(out / "baseline_metrics.csv", metrics_text(br.records));
        std::ostringstream p;
        qcpn::write_predictions(p, base, target, data.domain);
        write_atomic(out / "baseline_predictions.csv", p.str());
        save_checkpoint((out / "baseline.ckpt").string(), persist::to_checkpoint(base, run, a.epochs, br.records));
        if (!br.records.empty()) {
            std::cout << "baseline (H=" << a.hidden << ")  final test MSE "
                      << format_double(br.records.back().test_loss) << "\n";
        }
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// features

struct FeaturesArgs {
    std::string checkpoint;
    std::size_t image_index = 0;
    bool blank = false;
    std::string dataset;
    std::string out = "runs/features";
};

int cmd_features(const FeaturesArgs &a, const std::string &data_root) {
    const auto ck = load_checkpoint(a.checkpoint);
    const auto model = persist::cnn_from_checkpoint(ck);
    const auto &cfg = model.config;
    Tensor image({1, cfg.height, cfg.width});
    if (!a.blank) {
        const std::string name = a.dataset.empty() ? ck.get("dataset") : a.dataset;
        const auto corpus = datasets::load_raw_corpus(datasets::parse_dataset(name), data_root);
        if (a.image_index >= corpus.size()) {
            throw IndexError("image index " + std::to_string(a.image_index) + " outside corpus of " +
                             std::to_string(corpus.size()));
        }
        const std::size_t idx[] = {a.image_index};
        image = datasets::subset(corpus, idx).images;
        if (image.shape[1] != cfg.height || image.shape[2] != cfg.width) {
            throw FormatError("image size does not match the model");
        }
    }
    const auto maps = nngine::conv_forward(model, image);
    const fs::path out(a.out);
    const std::size_t oh = cfg.conv_height(), ow = cfg.conv_width();
    for (std::size_t c = 0; c < cfg.channels; ++c) {
        std::ostringstream f;
        for (std::size_t i = 0; i < oh; ++i) {
            for (std::size_t j = 0; j < ow; ++j) {
                f << (j ? "," : "") << format_double(maps.data[(i * ow + j) * cfg.channels + c]);
            }
            f << "\n";
        }
        std::ostringstream name;
        name << "featuremap_" << std::setw(2) << std::setfill('0') << c << ".csv";
        write_atomic(out / name.str(), f.str());
    }

    const bool angles = activations::is_angle_kind(cfg.kind);
    std::ostringstream p;
    p << (angles ? "channel,index,phi\n" : "channel,index,value\n");
    for (std::size_t c = 0; c < cfg.channels; ++c) {
        const auto &params = model.conv_kernels[c].params;
        for (std::size_t i = 0; i < params.size(); ++i) {
            p << c << ',' << i << ',' << format_double(params[i]) << '\n';
        }
    }
    write_atomic(out / (angles ? "angles.csv" : "weights.csv"), p.str());
    std::cout << "wrote " << cfg.channels << " feature maps and " << (angles ? "angles.csv" : "weights.csv") << " to "
              << out.string() << "\n";
    if (angles) {
        // distance of each angle to the nearest odd multiple of pi/2
        constexpr double pi = std::numbers::pi;
        for (std::size_t c = 0; c < cfg.channels; ++c) {
            const auto &params = model.conv_kernels[c].params;
            std::size_t best = 0;
            double best_d = 1e300;
            for (std::size_t i = 0; i < params.size(); ++i) {
                const double d = std::abs(std::remainder(params[i] - pi / 2, pi));
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            std::cout << "channel " << c << ": phi[" << best << "] = " << format_double(params[best])
                      << "  (|phi mod pi - pi/2| = " << format_double(best_d) << ")\n";
        }
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// project

struct ProjectArgs {
    int qubits = 4;
    int samples = 100;
    std::uint64_t seed = 1;
    std::string out = "runs/project";
};

int cmd_project(const ProjectArgs &a) {
    const int k = qsim::qcpn_max_order(a.qubits);
    if (a.samples < k + 1) {
        throw UsageError("--samples must be at least " + std::to_string(k + 1) + " for " + std::to_string(a.qubits) +
                         " qubits");
    }
    Rng rng(a.seed, 9);
    const auto theta = rng.uniform_vector(static_cast<std::size_t>(qsim::qcpn_param_count(a.qubits)),
                                          -std::numbers::pi, std::numbers::pi);
    const auto nodes = closedform::chebyshev_nodes(a.samples);
    std::vector<double> ys;
    for (double x : nodes) {
        ys.push_back(qsim::run_qcpn_circuit(x, theta, a.qubits));
    }
    const auto at_k = closedform::chebyshev_project(nodes, ys, k);
    const auto below = closedform::chebyshev_project(nodes, ys, k - 1);
    std::ostringstream os;
    os << "qubits " << a.qubits << "  K = (n-1)(n-2) = " << k << "\n"
       << "residual at K   " << format_double(at_k.residual) << "\n"
       << "residual at K-1 " << format_double(below.residual) << "\n";
    std::cout << os.str();
    std::ostringstream coeffs;
    coeffs << "order,coefficient\n";
    for (std::size_t i = 0; i < at_k.fit.coeffs.size(); ++i) {
        coeffs << i << ',' << format_double(at_k.fit.coeffs[i]) << '\n';
    }
    write_atomic(fs::path(a.out) / "projection.txt", os.str());
    write_atomic(fs::path(a.out) / "coefficients.csv", coeffs.str());
    return kOk;
}

std::string resolve_data_dir(const std::string &flag) {
    return flag.empty() ? datasets::data_dir().string() : flag;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"qiml: quantum-inspired activations, Chebyshev networks and their oracles"};
    app.require_subcommand(1);
    std::string data_dir;
    app.add_option("--data-dir", data_dir,
                   std::string("image corpus root (default: $") + datasets::kDataDirEnv + " or ./data)");

    std::vector<std::string> kinds;
    for (auto k : activations::kAllKinds) {
        kinds.push_back(activations::to_string(k));
    }
    std::vector<std::string> targets;
    for (auto t : qcpn::kAllTargets) {
        targets.push_back(qcpn::to_string(t));
    }
    const auto lower = [](std::string s) {
        for (auto &c : s) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        return s;
    };

    VerifyArgs va;
    auto *verify = app.add_subcommand("verify", "check closed forms and recursions against the simulator");
    verify->add_option("--suite", va.suites, "suites to run (default: all)")
        ->check(CLI::IsMember(std::vector<std::string>(verify::kSuites.begin(), verify::kSuites.end())));
    verify->add_option("--max-n", va.max_n, "largest register size")->check(CLI::Range(3, qsim::kMaxQubits));
    verify->add_option("--draws", va.draws, "random draws per size")->check(CLI::PositiveNumber);
    verify->add_option("--tol", va.tol, "tolerance for the equivalence suites")->check(CLI::NonNegativeNumber);
    verify->add_option("--seed", va.seed);
    verify->add_option("--out", va.out, "output directory");

    CnnArgs ca;
    auto *cnn = app.add_subcommand("train-cnn", "train the activation-kernel CNN on an image corpus");
    cnn->add_option("--dataset", ca.dataset)->check(CLI::IsMember({"mnist", "fmnist", "letter"}, lower));
    cnn->add_option("--activation", ca.activation)->check(CLI::IsMember(kinds, lower));
    cnn->add_option("--epochs", ca.epochs)->check(CLI::NonNegativeNumber);
    cnn->add_option("--batch", ca.batch)->check(CLI::PositiveNumber);
    cnn->add_option("--lr", ca.lr)->check(CLI::NonNegativeNumber);
    cnn->add_option("--seed", ca.seed);
    cnn->add_option("--train", ca.n_train, "training samples")->check(CLI::PositiveNumber);
    cnn->add_option("--test", ca.n_test, "test samples")->check(CLI::PositiveNumber);
    cnn->add_option("--channels", ca.channels)->check(CLI::PositiveNumber);
    cnn->add_option("--hidden", ca.hidden)->check(CLI::PositiveNumber);
    cnn->add_option("--resume", ca.resume, "continue from a checkpoint written by this command");
    cnn->add_option("--out", ca.out, "output directory");

    QcpnArgs qa;
    auto *qc = app.add_subcommand("train-qcpn", "fit a Chebyshev-unit network to a special-function target");
    qc->add_option("--target", qa.target)->check(CLI::IsMember(targets, lower));
    qc->add_option("--order", qa.order, "maximum Chebyshev order K")->check(CLI::Range(0, 64));
    qc->add_option("--units", qa.units, "units for 1-D targets")->check(CLI::PositiveNumber);
    qc->add_option("--terms", qa.terms, "product terms for 2-D targets")->check(CLI::PositiveNumber);
    qc->add_option("--epochs", qa.epochs)->check(CLI::NonNegativeNumber);
    qc->add_option("--lr", qa.lr)->check(CLI::NonNegativeNumber);
    qc->add_option("--lr-decay", qa.lr_decay, "per-epoch learning-rate factor")->check(CLI::Range(0.0, 1.0));
    qc->add_option("--batch", qa.batch)->check(CLI::PositiveNumber);
    qc->add_option("--seed", qa.seed);
    qc->add_option("--train", qa.n_train)->check(CLI::PositiveNumber);
    qc->add_option("--test", qa.n_test)->check(CLI::PositiveNumber);
    qc->add_option("--domain", qa.domain, "lo hi [lo hi] per input dimension")->expected(2, 4);
    qc->add_flag("--baseline", qa.baseline, "also train the tanh baseline under the same budget");
    qc->add_option("--hidden", qa.hidden, "baseline hidden width")->check(CLI::PositiveNumber);
    qc->add_option("--out", qa.out, "output directory");

    FeaturesArgs fa;
    auto *feat = app.add_subcommand("features", "export first-layer feature maps and kernel parameters");
    feat->add_option("--checkpoint", fa.checkpoint)->required();
    feat->add_option("--image-index", fa.image_index, "index into the pooled corpus (train files, then test)");
    feat->add_flag("--blank", fa.blank, "use an all-zero image instead of a corpus image");
    feat->add_option("--dataset", fa.dataset, "corpus (default: the checkpoint's)");
    feat->add_option("--out", fa.out, "output directory");

    ProjectArgs pa;
    auto *proj = app.add_subcommand("project", "project a random Chebyshev circuit onto T_0..T_K");
    proj->add_option("--qubits", pa.qubits)->check(CLI::Range(3, 8));
    proj->add_option("--samples", pa.samples, "Chebyshev nodes")->check(CLI::PositiveNumber);
    proj->add_option("--seed", pa.seed);
    proj->add_option("--out", pa.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }

    const std::string root = resolve_data_dir(data_dir);
    if (verify->parsed()) {
        const json cfg{{"suites", va.suites.empty() ? std::vector<std::string>(verify::kSuites.begin(),
                                                                               verify::kSuites.end())
                                                    : va.suites},
                       {"max_n", va.max_n},
                       {"draws", va.draws},
                       {"tol", va.tol},
                       {"seed", va.seed},
                       {"out", va.out}};
        return run_command("verify", va.out, cfg, va.seed, [&] { return cmd_verify(va); });
    }
    if (cnn->parsed()) {
        ca.activation = lower(ca.activation);
        ca.dataset = lower(ca.dataset);
        const json cfg{{"dataset", ca.dataset}, {"activation", ca.activation}, {"epochs", ca.epochs},
                       {"batch", ca.batch},     {"lr", ca.lr},                 {"seed", ca.seed},
                       {"train", ca.n_train},   {"test", ca.n_test},           {"channels", ca.channels},
                       {"hidden", ca.hidden},   {"data_dir", root},            {"resume", ca.resume},
                       {"out", ca.out}};
        return run_command("train-cnn", ca.out, cfg, ca.seed, [&] { return cmd_train_cnn(ca, root); });
    }
    if (qc->parsed()) {
        qa.target = lower(qa.target);
        const json cfg{{"target", qa.target}, {"order", qa.order},     {"units", qa.units},
                       {"terms", qa.terms},   {"epochs", qa.epochs},   {"lr", qa.lr},
                       {"lr_decay", qa.lr_decay}, {"batch", qa.batch}, {"seed", qa.seed},
                       {"train", qa.n_train}, {"test", qa.n_test},     {"domain", qa.domain},
                       {"baseline", qa.baseline}, {"hidden", qa.hidden}, {"out", qa.out}};
        return run_command("train-qcpn", qa.out, cfg, qa.seed, [&] { return cmd_train_qcpn(qa); });
    }
    if (feat->parsed()) {
        const json cfg{{"checkpoint", fa.checkpoint}, {"image_index", fa.image_index}, {"blank", fa.blank},
                       {"dataset", fa.dataset},       {"data_dir", root},              {"out", fa.out}};
        return run_command("features", fa.out, cfg, 0, [&] { return cmd_features(fa, root); });
    }
    const json cfg{{"qubits", pa.qubits}, {"samples", pa.samples}, {"seed", pa.seed}, {"out", pa.out}};
    return run_command("project", pa.out, cfg, pa.seed, [&] { return cmd_project(pa); });
}
