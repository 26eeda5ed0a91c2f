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
 * sin(pi t) and cos(pi t) with exact zeros at integer and half-integer t.
 */
#pragma once

#include <cmath>
#include <numbers>

namespace qiml {

namespace detail {
// t = q/2 + f with |f| <= 1/4, q in {0, 1, 2, 3}; both steps are exact.
inline void split_half_turns(double t, int &q, double &f) {
    const double r = std::remainder(t, 2.0);
    const double h = std::nearbyint(2.0 * r);
    f = r - 0.5 * h;
    q = static_cast<int>(h) & 3;
}
} // namespace detail

inline double sinpi(double t) {
    int q;
    double f;
    detail::split_half_turns(t, q, f);
    const double a = std::numbers::pi * f;
    switch (q) {
    case 0: return std::sin(a);
    case 1: return std::cos(a);
    case 2: return -std::sin(a);
    default: return -std::cos(a);
    }
}

inline double cospi(double t) {
    int q;
    double f;
    detail::split_half_turns(t, q, f);
    const double a = std::numbers::pi * f;
    switch (q) {
    case 0: return std::cos(a);
    case 1: return -std::sin(a);
    case 2: return -std::cos(a);
    default: return std::sin(a);
    }
}

/// cos of an angle in radians, exact zero at +-pi/2 (in double precision).
inline double cos_rad(double angle) { return cospi(angle / std::numbers::pi); }
inline double sin_rad(double angle) { return sinpi(angle / std::numbers::pi); }

} // namespace qiml
