// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "icnet/network.hpp"

namespace icnet {

// Two networks computing the same function f(x) = clamp(1 - x, 0, 1) with
// different interval behaviour on [0, 1]:
//   n1: [0, 1] propagates to [0, 3/2]
//   n2: [0, 1] propagates to [0, 1]
// Both are Input -> Affine(2x1) -> ReLU -> Affine(2x2) -> ReLU -> Affine(1x2).
Network fixture_n1();
Network fixture_n2();

/// Names accepted by fixture_by_name: "fig2-n1", "fig2-n2".
std::vector<std::string> fixture_names();

/// Throws std::invalid_argument for an unknown name.
Network fixture_by_name(std::string_view name);

} // namespace icnet
