// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include "icnet/serialize.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "icnet/errors.hpp"

namespace icnet {

using json = nlohmann::ordered_json;

std::string hex_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_real(std::string_view text) {
    const std::string s{text};
    if (s.empty()) {
        throw SchemaError("empty number");
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) {
        throw SchemaError("invalid number '" + s + "'");
    }
    return v;
}

namespace {

json reals(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) {
        a.push_back(hex_real(x));
    }
    return a;
}

double real_of(const json& j, std::int64_t node) {
    if (j.is_string()) {
        try {
            return parse_real(j.get<std::string>());
        } catch (const SchemaError& e) {
            throw SchemaError(e.what(), node);
        }
    }
    if (j.is_number()) {
        return j.get<double>();
    }
    throw SchemaError("expected a number", node);
}

std::vector<double> reals_of(const json& j, std::int64_t node) {
    if (!j.is_array()) {
        throw SchemaError("expected an array of numbers", node);
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (const json& x : j) {
        out.push_back(real_of(x, node));
    }
    return out;
}

std::int64_t int_of(const json& obj, const char* key, std::int64_t node = -1) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer()) {
        throw SchemaError(std::string("missing or non-integer field '") + key + "'", node);
    }
    return it->get<std::int64_t>();
}

const json& field(const json& obj, const char* key, std::int64_t node = -1) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw SchemaError(std::string("missing field '") + key + "'", node);
    }
    return *it;
}

} // namespace

std::string serialize(const Network& net) {
    json doc;
    doc["format"] = kNetworkFormat;
    doc["version"] = kNetworkVersion;
    doc["input_dim"] = net.input_dim();
    doc["output_dim"] = net.output_dim();
    doc["output"] = net.output();
    json order = json::array();
    for (NodeId id = 0; id < net.nodes().size(); ++id) {
        order.push_back(id);
    }
    doc["order"] = std::move(order);
    json meta = json::object();
    for (const auto& [k, v] : net.metadata()) {
        meta[k] = v;
    }
    doc["metadata"] = std::move(meta);
    json nodes = json::array();
    for (NodeId id = 0; id < net.nodes().size(); ++id) {
        const Node& n = net.node(id);
        json j;
        j["id"] = id;
        j["kind"] = kind_name(n.kind);
        switch (n.kind) {
        case NodeKind::input: j["index"] = n.input_index; break;
        case NodeKind::affine:
            j["preds"] = n.preds;
            j["rows"] = n.arity;
            j["cols"] = n.cols;
            j["weights"] = reals(n.weights);
            j["bias"] = reals(n.bias);
            break;
        default: j["preds"] = n.preds; break;
        }
        nodes.push_back(std::move(j));
    }
    doc["nodes"] = std::move(nodes);
    return doc.dump(1) + "\n";
}

Network deserialize(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("malformed network document: ") + e.what());
    }
    if (!doc.is_object()) {
        throw SchemaError("network document must be an object");
    }
    if (!doc.contains("format") || doc["format"] != kNetworkFormat) {
        throw SchemaError("not an icnet-network document");
    }
    if (int_of(doc, "version") != kNetworkVersion) {
        throw SchemaError("unsupported network document version");
    }
    const json& nodes_j = field(doc, "nodes");
    if (!nodes_j.is_array() || nodes_j.empty() || !doc.contains("output")) {
        throw SchemaError("no output node");
    }
    const std::int64_t input_dim = int_of(doc, "input_dim");
    if (input_dim <= 0) {
        throw SchemaError("input_dim must be positive");
    }

    // Raw nodes keyed by their document id.
    struct Raw {
        Node node;
        std::vector<std::int64_t> preds;
    };
    std::map<std::int64_t, Raw> raw;
    for (const json& j : nodes_j) {
        if (!j.is_object()) {
            throw SchemaError("node entries must be objects");
        }
        const std::int64_t id = int_of(j, "id");
        if (id < 0 || raw.count(id) != 0) {
            throw SchemaError("duplicate or negative node id", id);
        }
        const json& kind_j = field(j, "kind", id);
        const std::string kind = kind_j.is_string() ? kind_j.get<std::string>() : "";
        Raw r;
        if (kind == "input") {
            r.node.kind = NodeKind::input;
            r.node.arity = 1;
            const std::int64_t index = int_of(j, "index", id);
            if (index < 0) {
                throw SchemaError("negative input index", id);
            }
            r.node.input_index = static_cast<std::size_t>(index);
        } else if (kind == "affine" || kind == "relu" || kind == "sum" || kind == "concat") {
            r.node.kind = kind == "affine" ? NodeKind::affine
                          : kind == "relu" ? NodeKind::relu
                          : kind == "sum"  ? NodeKind::sum
                                           : NodeKind::concat;
            const json& preds = field(j, "preds", id);
            if (!preds.is_array()) {
                throw SchemaError("preds must be an array", id);
            }
            for (const json& p : preds) {
                if (!p.is_number_integer()) {
                    throw SchemaError("predecessor ids must be integers", id);
                }
                r.preds.push_back(p.get<std::int64_t>());
            }
            if (r.node.kind == NodeKind::affine) {
                const std::int64_t rows = int_of(j, "rows", id);
                const std::int64_t cols = int_of(j, "cols", id);
                if (rows <= 0 || cols <= 0) {
                    throw ArityError("affine shape must be positive", id);
                }
                r.node.arity = static_cast<std::size_t>(rows);
                r.node.cols = static_cast<std::size_t>(cols);
                r.node.weights = reals_of(field(j, "weights", id), id);
                r.node.bias = reals_of(field(j, "bias", id), id);
            }
        } else {
            throw SchemaError("unknown node kind '" + kind + "'", id);
        }
        raw.emplace(id, std::move(r));
    }
    for (const auto& [id, r] : raw) {
        for (std::int64_t p : r.preds) {
            if (raw.count(p) == 0) {
                throw SchemaError("unknown predecessor " + std::to_string(p), id);
            }
        }
    }

    // Kahn's algorithm: any node left unprocessed lies on or behind a cycle.
    {
        std::map<std::int64_t, std::size_t> indegree;
        std::map<std::int64_t, std::vector<std::int64_t>> succ;
        for (const auto& [id, r] : raw) {
            indegree[id] += 0;
            for (std::int64_t p : r.preds) {
                ++indegree[id];
                succ[p].push_back(id);
            }
        }
        std::vector<std::int64_t> ready;
        for (const auto& [id, d] : indegree) {
            if (d == 0) {
                ready.push_back(id);
            }
        }
        std::size_t done = 0;
        while (!ready.empty()) {
            const std::int64_t id = ready.back();
            ready.pop_back();
            ++done;
            for (std::int64_t s : succ[id]) {
                if (--indegree[s] == 0) {
                    ready.push_back(s);
                }
            }
        }
        if (done != raw.size()) {
            for (const auto& [id, d] : indegree) {
                if (d != 0) {
                    throw CycleError("cycle", id);
                }
            }
        }
    }

    const json& order_j = field(doc, "order");
    if (!order_j.is_array() || order_j.size() != raw.size()) {
        throw SchemaError("order must list every node exactly once");
    }
    std::map<std::int64_t, NodeId> position;
    for (const json& o : order_j) {
        if (!o.is_number_integer()) {
            throw SchemaError("order entries must be integers");
        }
        const std::int64_t id = o.get<std::int64_t>();
        if (raw.count(id) == 0 || position.count(id) != 0) {
            throw SchemaError("order must list every node exactly once", id);
        }
        position.emplace(id, position.size());
    }
    std::vector<Node> nodes(raw.size());
    for (auto& [id, r] : raw) {
        const NodeId pos = position.at(id);
        for (std::int64_t p : r.preds) {
            if (position.at(p) >= pos) {
                throw SchemaError("stored order is not topological", id);
            }
            r.node.preds.push_back(position.at(p));
        }
        nodes[pos] = std::move(r.node);
    }
    // Widths of relu/sum/concat depend on predecessors; settle them in order.
    for (NodeId id = 0; id < nodes.size(); ++id) {
        Node& n = nodes[id];
        if (n.preds.empty()) {
            continue;
        }
        if (n.kind == NodeKind::relu || n.kind == NodeKind::sum) {
            n.arity = nodes[n.preds[0]].arity;
        } else if (n.kind == NodeKind::concat) {
            n.arity = 0;
            for (NodeId p : n.preds) {
                n.arity += nodes[p].arity;
            }
        }
    }

    const std::int64_t output = int_of(doc, "output");
    if (position.count(output) == 0) {
        throw SchemaError("no output node");
    }
    Metadata meta;
    if (doc.contains("metadata")) {
        const json& m = doc["metadata"];
        if (!m.is_object()) {
            throw SchemaError("metadata must be an object");
        }
        for (const auto& [k, v] : m.items()) {
            if (!v.is_string()) {
                throw SchemaError("metadata values must be strings");
            }
            meta.emplace(k, v.get<std::string>());
        }
    }
    const NodeId out = position.at(output);
    try {
        Network net = assemble_network(static_cast<std::size_t>(input_dim), std::move(nodes), out, std::move(meta));
        if (doc.contains("output_dim") && int_of(doc, "output_dim") != static_cast<std::int64_t>(net.output_dim())) {
            throw ArityError("output_dim does not match the output node", output);
        }
        return net;
    } catch (const GraphError& e) {
        // Report document ids rather than internal positions.
        if (e.node() < 0) {
            throw;
        }
        std::int64_t doc_id = e.node();
        for (const auto& [id, pos] : position) {
            if (static_cast<std::int64_t>(pos) == e.node()) {
                doc_id = id;
            }
        }
        const std::string msg = e.what();
        const std::string prefix = "node " + std::to_string(e.node()) + ": ";
        const std::string body = msg.rfind(prefix, 0) == 0 ? msg.substr(prefix.size()) : msg;
        if (dynamic_cast<const ArityError*>(&e) != nullptr) {
            throw ArityError(body, doc_id);
        }
        if (dynamic_cast<const CycleError*>(&e) != nullptr) {
            throw CycleError(body, doc_id);
        }
        throw SchemaError(body, doc_id);
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

void save_network(const Network& net, const std::filesystem::path& path) { write_text_file(path, serialize(net)); }

Network load_network(const std::filesystem::path& path) { return deserialize(read_text_file(path)); }

} // namespace icnet
