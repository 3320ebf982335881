// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include "icnet/fixtures.hpp"

#include <stdexcept>

namespace icnet {

namespace {

// Both hidden layers start from x/2, and the middle layer carries bias 1/2.
// Only the middle weights differ.
Network two_layer(std::vector<double> middle, const char* name) {
    GraphBuilder g(1);
    const NodeId a = g.affine(g.input(0), 2, {0.5, 0.5}, {0.0, 0.0});
    const NodeId r1 = g.relu(a);
    const NodeId b = g.affine(r1, 2, std::move(middle), {0.5, 0.5});
    const NodeId r2 = g.relu(b);
    const NodeId out = g.affine(r2, 1, {1.0, 1.0}, {0.0});
    return g.finish(out, {{"fixture", name}});
}

} // namespace

Network fixture_n1() { return two_layer({-1.5, 0.5, 0.5, -1.5}, "fig2-n1"); }

Network fixture_n2() { return two_layer({-0.5, -0.5, -0.5, -0.5}, "fig2-n2"); }

std::vector<std::string> fixture_names() { return {"fig2-n1", "fig2-n2"}; }

Network fixture_by_name(std::string_view name) {
    if (name == "fig2-n1") {
        return fixture_n1();
    }
    if (name == "fig2-n2") {
        return fixture_n2();
    }
    throw std::invalid_argument("unknown fixture '" + std::string(name) + "' (expected fig2-n1 or fig2-n2)");
}

} // namespace icnet
