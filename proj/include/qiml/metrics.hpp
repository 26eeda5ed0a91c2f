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
 * Per-epoch training records and their CSV form.
 */
#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qiml {

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double test_loss = 0.0;
    double test_acc = 0.0;

    friend bool operator==(const EpochRecord &, const EpochRecord &) = default;
};

struct TrainReport {
    std::vector<EpochRecord> records;

    /// Epoch with the smallest test loss (first one on ties).
    [[nodiscard]] int optimal_epoch() const {
        if (records.empty()) {
            throw ArgumentError("optimal_epoch: report has no epochs");
        }
        const EpochRecord *best = &records.front();
        for (const auto &r : records) {
            if (r.test_loss < best->test_loss) {
                best = &r;
            }
        }
        return best->epoch;
    }

    [[nodiscard]] const EpochRecord &record(int epoch) const {
        for (const auto &r : records) {
            if (r.epoch == epoch) {
                return r;
            }
        }
        throw ArgumentError("no record for epoch " + std::to_string(epoch));
    }

    friend bool operator==(const TrainReport &, const TrainReport &) = default;
};

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline constexpr const char *kMetricsHeader = "epoch,train_loss,train_acc,test_loss,test_acc";

inline void write_metrics_row(std::ostream &os, const EpochRecord &r) {
    os << r.epoch << ',' << format_double(r.train_loss) << ',' << format_double(r.train_acc) << ','
       << format_double(r.test_loss) << ',' << format_double(r.test_acc) << '\n';
}

inline void write_metrics_csv(std::ostream &os, const TrainReport &report) {
    os << kMetricsHeader << '\n';
    for (const auto &r : report.records) {
        write_metrics_row(os, r);
    }
}

inline void write_metrics_csv(const std::string &path, const TrainReport &report) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot write " + path);
    }
    write_metrics_csv(f, report);
}

} // namespace qiml
