// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "icnet/interval.hpp"

namespace icnet::simd {

// Select semantics matching _mm256_min_pd / _mm256_max_pd operand order.
// std::min/std::max differ on signed zeros.
inline double select_min(double a, double b) { return a < b ? a : b; }
inline double select_max(double a, double b) { return a > b ? a : b; }
inline double abs_value(double a) { return std::fabs(a); }

} // namespace icnet::simd
