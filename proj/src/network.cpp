// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include "icnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "icnet/errors.hpp"
#include "icnet/simd/kernels.hpp"

namespace icnet {

std::string_view kind_name(NodeKind kind) {
    switch (kind) {
    case NodeKind::input: return "input";
    case NodeKind::affine: return "affine";
    case NodeKind::relu: return "relu";
    case NodeKind::sum: return "sum";
    case NodeKind::concat: return "concat";
    }
    return "unknown";
}

namespace {

void validate(std::size_t input_dim, const std::vector<Node>& nodes, NodeId output) {
    if (nodes.empty() || output >= nodes.size()) {
        throw SchemaError("no output node");
    }
    if (input_dim == 0) {
        throw SchemaError("input dimension must be positive");
    }
    std::vector<int> seen_input(input_dim, 0);
    for (NodeId id = 0; id < nodes.size(); ++id) {
        const Node& n = nodes[id];
        const auto gid = static_cast<std::int64_t>(id);
        for (NodeId p : n.preds) {
            if (p >= id) {
                throw CycleError("predecessor " + std::to_string(p) + " does not precede its consumer", gid);
            }
        }
        switch (n.kind) {
        case NodeKind::input:
            if (!n.preds.empty() || n.arity != 1) {
                throw ArityError("input nodes have no predecessors and width 1", gid);
            }
            if (n.input_index >= input_dim) {
                throw SchemaError("input index " + std::to_string(n.input_index) + " out of range", gid);
            }
            if (seen_input[n.input_index]++ != 0) {
                throw SchemaError("duplicate input index " + std::to_string(n.input_index), gid);
            }
            break;
        case NodeKind::affine: {
            if (n.preds.size() != 1) {
                throw ArityError("affine nodes take exactly one predecessor", gid);
            }
            const std::size_t in = nodes[n.preds[0]].arity;
            if (n.cols != in || n.arity == 0 || n.weights.size() != n.arity * in || n.bias.size() != n.arity) {
                throw ArityError("affine weight shape does not match its predecessor", gid);
            }
            const auto finite = [](double v) { return std::isfinite(v); };
            if (!std::all_of(n.weights.begin(), n.weights.end(), finite) ||
                !std::all_of(n.bias.begin(), n.bias.end(), finite)) {
                throw SchemaError("non-finite affine parameter", gid);
            }
            break;
        }
        case NodeKind::relu:
            if (n.preds.size() != 1 || n.arity != nodes[n.preds[0]].arity) {
                throw ArityError("relu nodes take one predecessor of equal width", gid);
            }
            break;
        case NodeKind::sum:
            if (n.preds.size() < 2) {
                throw ArityError("sum nodes take at least two predecessors", gid);
            }
            for (NodeId p : n.preds) {
                if (nodes[p].arity != n.arity) {
                    throw ArityError("sum predecessors must share the node width", gid);
                }
            }
            break;
        case NodeKind::concat: {
            if (n.preds.empty()) {
                throw ArityError("concat nodes take at least one predecessor", gid);
            }
            std::size_t total = 0;
            for (NodeId p : n.preds) {
                total += nodes[p].arity;
            }
            if (total != n.arity) {
                throw ArityError("concat width is not the sum of its predecessor widths", gid);
            }
            break;
        }
        }
    }
    for (std::size_t k = 0; k < input_dim; ++k) {
        if (seen_input[k] == 0) {
            throw SchemaError("missing input node for index " + std::to_string(k));
        }
    }
}

} // namespace

void Network::index_layout() {
    offset_.resize(nodes_.size());
    weights_cm_.assign(nodes_.size(), {});
    std::size_t off = 0;
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        offset_[id] = off;
        off += nodes_[id].arity;
        const Node& n = nodes_[id];
        if (n.kind == NodeKind::affine) {
            auto& cm = weights_cm_[id];
            cm.resize(n.weights.size());
            for (std::size_t r = 0; r < n.arity; ++r) {
                for (std::size_t c = 0; c < n.cols; ++c) {
                    cm[c * n.arity + r] = n.weights[r * n.cols + c];
                }
            }
        }
    }
    buffer_size_ = off;
}

std::vector<double> Network::eval_concrete(std::span<const double> x) const {
    if (x.size() != input_dim_) {
        throw DimensionError("expected an input of dimension " + std::to_string(input_dim_) + ", got " +
                             std::to_string(x.size()));
    }
    const simd::KernelTable& k = simd::active();
    std::vector<double> buf(buffer_size_);
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        const Node& n = nodes_[id];
        double* out = buf.data() + offset_[id];
        switch (n.kind) {
        case NodeKind::input: out[0] = x[n.input_index]; break;
        case NodeKind::affine: {
            const simd::AffineView view{n.arity, n.cols, weights_cm_[id].data(), n.bias.data()};
            k.affine(view, buf.data() + offset_[n.preds[0]], out);
            break;
        }
        case NodeKind::relu: k.relu(buf.data() + offset_[n.preds[0]], out, n.arity); break;
        case NodeKind::sum: {
            std::copy_n(buf.data() + offset_[n.preds[0]], n.arity, out);
            for (std::size_t p = 1; p < n.preds.size(); ++p) {
                const double* in = buf.data() + offset_[n.preds[p]];
                for (std::size_t i = 0; i < n.arity; ++i) {
                    out[i] += in[i];
                }
            }
            break;
        }
        case NodeKind::concat:
            for (NodeId p : n.preds) {
                out = std::copy_n(buf.data() + offset_[p], nodes_[p].arity, out);
            }
            break;
        }
    }
    const double* y = buf.data() + offset_[output_];
    return {y, y + nodes_[output_].arity};
}

BoxRegion Network::eval_abstract(const BoxRegion& box) const {
    if (box.dim() != input_dim_) {
        throw DimensionError("expected a box of dimension " + std::to_string(input_dim_) + ", got " +
                             std::to_string(box.dim()));
    }
    const simd::KernelTable& k = simd::active();
    std::vector<double> lo(buffer_size_);
    std::vector<double> hi(buffer_size_);
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        const Node& n = nodes_[id];
        const std::size_t off = offset_[id];
        switch (n.kind) {
        case NodeKind::input:
            lo[off] = box[n.input_index].lo();
            hi[off] = box[n.input_index].hi();
            break;
        case NodeKind::affine: {
            const simd::AffineView view{n.arity, n.cols, weights_cm_[id].data(), n.bias.data()};
            const std::size_t in = offset_[n.preds[0]];
            k.affine_interval(view, lo.data() + in, hi.data() + in, lo.data() + off, hi.data() + off);
            break;
        }
        case NodeKind::relu: {
            const std::size_t in = offset_[n.preds[0]];
            k.relu(lo.data() + in, lo.data() + off, n.arity);
            k.relu(hi.data() + in, hi.data() + off, n.arity);
            break;
        }
        case NodeKind::sum: {
            std::copy_n(lo.data() + offset_[n.preds[0]], n.arity, lo.data() + off);
            std::copy_n(hi.data() + offset_[n.preds[0]], n.arity, hi.data() + off);
            for (std::size_t p = 1; p < n.preds.size(); ++p) {
                const std::size_t in = offset_[n.preds[p]];
                for (std::size_t i = 0; i < n.arity; ++i) {
                    lo[off + i] += lo[in + i];
                    hi[off + i] += hi[in + i];
                }
            }
            break;
        }
        case NodeKind::concat: {
            std::size_t o = off;
            for (NodeId p : n.preds) {
                std::copy_n(lo.data() + offset_[p], nodes_[p].arity, lo.data() + o);
                std::copy_n(hi.data() + offset_[p], nodes_[p].arity, hi.data() + o);
                o += nodes_[p].arity;
            }
            break;
        }
        }
    }
    std::vector<Interval> out;
    const std::size_t off = offset_[output_];
    out.reserve(nodes_[output_].arity);
    for (std::size_t i = 0; i < nodes_[output_].arity; ++i) {
        out.emplace_back(lo[off + i], hi[off + i]);
    }
    return BoxRegion{std::move(out)};
}

Network Network::with_metadata(Metadata metadata) const {
    Network copy = *this;
    copy.metadata_ = std::move(metadata);
    return copy;
}

Network assemble_network(std::size_t input_dim, std::vector<Node> nodes, NodeId output, Metadata metadata) {
    validate(input_dim, nodes, output);
    Network net;
    net.input_dim_ = input_dim;
    net.nodes_ = std::move(nodes);
    net.output_ = output;
    net.metadata_ = std::move(metadata);
    net.index_layout();
    return net;
}

GraphBuilder::GraphBuilder(std::size_t input_dim) : input_dim_(input_dim) {
    if (input_dim == 0) {
        throw DimensionError("input dimension must be positive");
    }
    for (std::size_t k = 0; k < input_dim; ++k) {
        Node n;
        n.kind = NodeKind::input;
        n.arity = 1;
        n.input_index = k;
        nodes_.push_back(std::move(n));
    }
}

NodeId GraphBuilder::input(std::size_t index) const {
    if (index >= input_dim_) {
        throw DimensionError("input index " + std::to_string(index) + " out of range");
    }
    return index;
}

NodeId GraphBuilder::input_vector() {
    if (input_dim_ == 1) {
        return 0;
    }
    if (input_vector_ == static_cast<NodeId>(-1)) {
        std::vector<NodeId> all(input_dim_);
        for (std::size_t k = 0; k < input_dim_; ++k) {
            all[k] = k;
        }
        input_vector_ = concat(std::move(all));
    }
    return input_vector_;
}

void GraphBuilder::check_pred(NodeId pred) const {
    if (pred >= nodes_.size()) {
        throw GraphError("unknown predecessor " + std::to_string(pred), static_cast<std::int64_t>(nodes_.size()));
    }
}

NodeId GraphBuilder::push(Node node) {
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
}

NodeId GraphBuilder::affine(NodeId pred, std::size_t rows, std::vector<double> weights, std::vector<double> bias) {
    check_pred(pred);
    const std::size_t cols = nodes_[pred].arity;
    if (rows == 0 || weights.size() != rows * cols || bias.size() != rows) {
        throw ArityError("affine weight shape does not match its predecessor",
                         static_cast<std::int64_t>(nodes_.size()));
    }
    Node n;
    n.kind = NodeKind::affine;
    n.preds = {pred};
    n.arity = rows;
    n.cols = cols;
    n.weights = std::move(weights);
    n.bias = std::move(bias);
    return push(std::move(n));
}

NodeId GraphBuilder::relu(NodeId pred) {
    check_pred(pred);
    Node n;
    n.kind = NodeKind::relu;
    n.preds = {pred};
    n.arity = nodes_[pred].arity;
    return push(std::move(n));
}

NodeId GraphBuilder::sum(std::vector<NodeId> preds) {
    if (preds.size() == 1) {
        check_pred(preds[0]);
        return preds[0];
    }
    if (preds.empty()) {
        throw ArityError("sum of no nodes", static_cast<std::int64_t>(nodes_.size()));
    }
    for (NodeId p : preds) {
        check_pred(p);
        if (nodes_[p].arity != nodes_[preds[0]].arity) {
            throw ArityError("sum predecessors must share the node width",
                             static_cast<std::int64_t>(nodes_.size()));
        }
    }
    Node n;
    n.kind = NodeKind::sum;
    n.arity = nodes_[preds[0]].arity;
    n.preds = std::move(preds);
    return push(std::move(n));
}

NodeId GraphBuilder::concat(std::vector<NodeId> preds) {
    if (preds.empty()) {
        throw ArityError("concat of no nodes", static_cast<std::int64_t>(nodes_.size()));
    }
    std::size_t total = 0;
    for (NodeId p : preds) {
        check_pred(p);
        total += nodes_[p].arity;
    }
    Node n;
    n.kind = NodeKind::concat;
    n.arity = total;
    n.preds = std::move(preds);
    return push(std::move(n));
}

NodeId GraphBuilder::import(const Network& net) {
    if (net.input_dim() != input_dim_) {
        throw DimensionError("imported network has input dimension " + std::to_string(net.input_dim()) +
                             ", expected " + std::to_string(input_dim_));
    }
    std::vector<NodeId> inputs(input_dim_);
    for (std::size_t k = 0; k < input_dim_; ++k) {
        inputs[k] = k;
    }
    return import(net, inputs);
}

NodeId GraphBuilder::import(const Network& net, std::span<const NodeId> inputs) {
    if (inputs.size() != net.input_dim()) {
        throw DimensionError("imported network needs " + std::to_string(net.input_dim()) + " inputs, got " +
                             std::to_string(inputs.size()));
    }
    for (NodeId in : inputs) {
        check_pred(in);
        if (nodes_[in].arity != 1) {
            throw ArityError("imported inputs must have width 1", static_cast<std::int64_t>(in));
        }
    }
    std::vector<NodeId> map(net.nodes().size());
    for (NodeId id = 0; id < net.nodes().size(); ++id) {
        const Node& src = net.node(id);
        if (src.kind == NodeKind::input) {
            map[id] = inputs[src.input_index];
            continue;
        }
        Node n = src;
        for (NodeId& p : n.preds) {
            p = map[p];
        }
        map[id] = push(std::move(n));
    }
    return map[net.output()];
}

Network GraphBuilder::finish(NodeId output, Metadata metadata) {
    Network net = assemble_network(input_dim_, std::move(nodes_), output, std::move(metadata));
    nodes_.clear();
    input_vector_ = static_cast<NodeId>(-1);
    return net;
}

NetworkStats stats(const Network& net) {
    NetworkStats s;
    const auto& nodes = net.nodes();
    std::vector<std::size_t> depth(nodes.size(), 0);
    s.nodes = nodes.size();
    for (NodeId id = 0; id < nodes.size(); ++id) {
        const Node& n = nodes[id];
        if (n.kind != NodeKind::input) {
            std::size_t d = 0;
            for (NodeId p : n.preds) {
                d = std::max(d, depth[p]);
            }
            depth[id] = d + 1;
        }
        if (n.kind == NodeKind::affine) {
            ++s.affine_nodes;
            s.parameters += n.weights.size() + n.bias.size();
        }
        if (n.kind == NodeKind::relu) {
            s.relu_units += n.arity;
        }
    }
    s.depth = depth[net.output()];
    return s;
}

} // namespace icnet
