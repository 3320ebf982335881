// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
/*******************************************************************************
 *
 * A ReLU network as a DAG of Input, Affine, ReLU, Sum and Concat nodes.
 *
 * Node ids are positions in the node vector and the vector is stored in a
 * topological order. Concrete and abstract evaluation both walk that order and
 * run the same floating-point operations, which makes evaluation on a point
 * box bit-identical to concrete evaluation.
 *
 * Networks are immutable; build them with GraphBuilder.
 *
 ******************************************************************************/
#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "icnet/interval.hpp"

namespace icnet {

using NodeId = std::size_t;

enum class NodeKind { input, affine, relu, sum, concat };

std::string_view kind_name(NodeKind kind);

struct Node {
    NodeKind kind = NodeKind::input;
    std::vector<NodeId> preds;
    std::size_t arity = 0; // output width

    std::size_t input_index = 0; // Input only

    // Affine only: arity x cols matrix, row-major, plus the bias vector.
    std::size_t cols = 0;
    std::vector<double> weights;
    std::vector<double> bias;
};

using Metadata = std::map<std::string, std::string>;

struct NetworkStats {
    std::size_t nodes = 0;
    std::size_t affine_nodes = 0;
    std::size_t relu_units = 0;
    std::size_t parameters = 0; // weights + biases
    std::size_t depth = 0;      // longest input-to-output path, in non-input nodes
};

class Network {
  public:
    [[nodiscard]] std::size_t input_dim() const { return input_dim_; }
    [[nodiscard]] std::size_t output_dim() const { return nodes_[output_].arity; }
    [[nodiscard]] NodeId output() const { return output_; }
    [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }
    [[nodiscard]] const Node& node(NodeId id) const { return nodes_.at(id); }
    [[nodiscard]] const Metadata& metadata() const { return metadata_; }

    /// Throws DimensionError unless |x| = input_dim.
    [[nodiscard]] std::vector<double> eval_concrete(std::span<const double> x) const;

    /// Interval propagation. Throws DimensionError unless dim = input_dim.
    [[nodiscard]] BoxRegion eval_abstract(const BoxRegion& box) const;

    /// Copy with replaced metadata.
    [[nodiscard]] Network with_metadata(Metadata metadata) const;

  private:
    friend Network assemble_network(std::size_t, std::vector<Node>, NodeId, Metadata);
    Network() = default;

    void index_layout();

    std::size_t input_dim_ = 0;
    NodeId output_ = 0;
    std::vector<Node> nodes_;
    Metadata metadata_;

    // Derived: value offset of each node in the evaluation buffer, and
    // column-major copies of affine weights for the kernels.
    std::vector<std::size_t> offset_;
    std::vector<std::vector<double>> weights_cm_;
    std::size_t buffer_size_ = 0;
};

/// Incremental construction of a Network. Nodes are appended, so every node
/// refers only to earlier ones and insertion order is a topological order.
/// The m Input nodes are created up front with ids 0..m-1.
class GraphBuilder {
  public:
    explicit GraphBuilder(std::size_t input_dim);

    [[nodiscard]] std::size_t input_dim() const { return input_dim_; }
    [[nodiscard]] NodeId input(std::size_t index) const;
    [[nodiscard]] std::size_t arity(NodeId id) const { return nodes_.at(id).arity; }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }

    /// All inputs as one vector-valued node (the single Input when m = 1).
    /// Created on first use and shared afterwards.
    NodeId input_vector();

    /// `weights` is rows x arity(pred), row-major.
    NodeId affine(NodeId pred, std::size_t rows, std::vector<double> weights, std::vector<double> bias);
    NodeId relu(NodeId pred);
    NodeId sum(std::vector<NodeId> preds);
    NodeId concat(std::vector<NodeId> preds);

    /// Copies every non-input node of `net` into this graph, wiring its inputs
    /// to this graph's inputs. Returns the id of net's output here.
    NodeId import(const Network& net);

    /// As above, with net's Input k wired to the width-1 node inputs[k].
    NodeId import(const Network& net, std::span<const NodeId> inputs);

    /// Validates and freezes the graph. The builder is left empty.
    Network finish(NodeId output, Metadata metadata = {});

  private:
    NodeId push(Node node);
    void check_pred(NodeId pred) const;

    std::size_t input_dim_;
    std::vector<Node> nodes_;
    NodeId input_vector_ = static_cast<NodeId>(-1);
};

/// Checks structure (acyclicity in stored order, arities, input indices) and
/// assembles a Network from raw nodes. Used by deserialization. Throws the
/// GraphError subclasses with the offending node id.
Network assemble_network(std::size_t input_dim, std::vector<Node> nodes, NodeId output, Metadata metadata);

NetworkStats stats(const Network& net);

// Combinators. Each returns a new network; concrete semantics is the
// mathematical composition and abstract semantics the composition of the
// node transformers.

/// x -> f(g(x)). Requires g.output_dim = f.input_dim.
Network compose(const Network& f, const Network& g);

/// x -> sum_i c_i * n_i(x). All nets share input and output dimensions.
Network sum_outputs(const std::vector<Network>& nets, std::span<const double> coefficients);

/// x -> (n_1(x), ..., n_k(x)). All nets share the input dimension.
Network concat_outputs(const std::vector<Network>& nets);

/// x -> net(W x + b). W is net.input_dim x cols, row-major.
Network affine_pre(const Network& net, std::size_t cols, std::span<const double> w, std::span<const double> b);

/// x -> W net(x) + b. W is rows x net.output_dim, row-major.
Network affine_post(const Network& net, std::size_t rows, std::span<const double> w, std::span<const double> b);

/// x -> net(x) + c componentwise.
Network constant_shift(const Network& net, double c);

/// x -> (values...) for every x in R^m.
Network constant_network(std::size_t input_dim, std::span<const double> values);

/// x -> x.
Network identity_network(std::size_t dim);

} // namespace icnet
