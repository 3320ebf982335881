// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include <string>

#include "icnet/errors.hpp"
#include "icnet/network.hpp"

namespace icnet {
namespace {

std::vector<double> identity_rows(std::size_t n) {
    std::vector<double> w(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        w[i * n + i] = 1.0;
    }
    return w;
}

// Width-1 nodes carrying the components of `node`. A width-1 node is used as
// is; wider nodes get one 1 x k selection row per component.
std::vector<NodeId> split(GraphBuilder& g, NodeId node) {
    const std::size_t k = g.arity(node);
    if (k == 1) {
        return {node};
    }
    std::vector<NodeId> parts(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> row(k, 0.0);
        row[j] = 1.0;
        parts[j] = g.affine(node, 1, std::move(row), {0.0});
    }
    return parts;
}

} // namespace

Network compose(const Network& f, const Network& g) {
    if (g.output_dim() != f.input_dim()) {
        throw DimensionError("cannot compose: inner output dimension " + std::to_string(g.output_dim()) +
                             " differs from outer input dimension " + std::to_string(f.input_dim()));
    }
    GraphBuilder b(g.input_dim());
    const NodeId inner = b.import(g);
    const std::vector<NodeId> parts = split(b, inner);
    const NodeId out = b.import(f, parts);
    return b.finish(out);
}

Network sum_outputs(const std::vector<Network>& nets, std::span<const double> coefficients) {
    if (nets.empty() || nets.size() != coefficients.size()) {
        throw DimensionError("sum_outputs needs one coefficient per network");
    }
    const std::size_t m = nets[0].input_dim();
    const std::size_t k = nets[0].output_dim();
    GraphBuilder b(m);
    std::vector<NodeId> outs;
    for (const Network& n : nets) {
        if (n.input_dim() != m || n.output_dim() != k) {
            throw DimensionError("sum_outputs operands must share input and output dimensions");
        }
        outs.push_back(b.import(n));
    }
    const NodeId joined = nets.size() == 1 ? outs[0] : b.concat(outs);
    const std::size_t cols = k * nets.size();
    std::vector<double> w(k * cols, 0.0);
    for (std::size_t i = 0; i < nets.size(); ++i) {
        for (std::size_t r = 0; r < k; ++r) {
            w[r * cols + i * k + r] = coefficients[i];
        }
    }
    const NodeId out = b.affine(joined, k, std::move(w), std::vector<double>(k, 0.0));
    return b.finish(out);
}

Network concat_outputs(const std::vector<Network>& nets) {
    if (nets.empty()) {
        throw DimensionError("concat_outputs needs at least one network");
    }
    GraphBuilder b(nets[0].input_dim());
    std::vector<NodeId> outs;
    for (const Network& n : nets) {
        outs.push_back(b.import(n));
    }
    const NodeId out = b.concat(std::move(outs));
    return b.finish(out);
}

Network affine_pre(const Network& net, std::size_t cols, std::span<const double> w, std::span<const double> b) {
    const std::size_t rows = net.input_dim();
    if (w.size() != rows * cols || b.size() != rows) {
        throw DimensionError("affine_pre: weight matrix must be " + std::to_string(rows) + " x " +
                             std::to_string(cols));
    }
    GraphBuilder g(cols);
    const NodeId x = g.input_vector();
    const NodeId pre = g.affine(x, rows, {w.begin(), w.end()}, {b.begin(), b.end()});
    const std::vector<NodeId> parts = split(g, pre);
    const NodeId out = g.import(net, parts);
    return g.finish(out);
}

Network affine_post(const Network& net, std::size_t rows, std::span<const double> w, std::span<const double> b) {
    const std::size_t cols = net.output_dim();
    if (w.size() != rows * cols || b.size() != rows) {
        throw DimensionError("affine_post: weight matrix must be " + std::to_string(rows) + " x " +
                             std::to_string(cols));
    }
    GraphBuilder g(net.input_dim());
    const NodeId inner = g.import(net);
    const NodeId out = g.affine(inner, rows, {w.begin(), w.end()}, {b.begin(), b.end()});
    return g.finish(out);
}

Network constant_shift(const Network& net, double c) {
    const std::size_t k = net.output_dim();
    const std::vector<double> bias(k, c);
    return affine_post(net, k, identity_rows(k), bias);
}

Network constant_network(std::size_t input_dim, std::span<const double> values) {
    if (values.empty()) {
        throw DimensionError("constant network needs at least one output");
    }
    GraphBuilder g(input_dim);
    const NodeId x = g.input_vector();
    const NodeId out = g.affine(x, values.size(), std::vector<double>(values.size() * input_dim, 0.0),
                                {values.begin(), values.end()});
    return g.finish(out);
}

Network identity_network(std::size_t dim) {
    GraphBuilder g(dim);
    const NodeId x = g.input_vector();
    const NodeId out = g.affine(x, dim, identity_rows(dim), std::vector<double>(dim, 0.0));
    return g.finish(out);
}

} // namespace icnet
