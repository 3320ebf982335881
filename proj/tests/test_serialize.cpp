// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include <json.hpp>

#include "icnet/errors.hpp"
#include "icnet/fixtures.hpp"
#include "icnet/serialize.hpp"
#include "support/random_network.hpp"

using namespace icnet;
using icnet::testing::random_box;
using icnet::testing::random_network;
using icnet::testing::random_point;

namespace {

void expect_same_graph(const Network& a, const Network& b) {
    ASSERT_EQ(a.input_dim(), b.input_dim());
    ASSERT_EQ(a.output(), b.output());
    ASSERT_EQ(a.nodes().size(), b.nodes().size());
    for (std::size_t i = 0; i < a.nodes().size(); ++i) {
        const Node& x = a.node(i);
        const Node& y = b.node(i);
        ASSERT_EQ(x.kind, y.kind);
        ASSERT_EQ(x.preds, y.preds);
        ASSERT_EQ(x.arity, y.arity);
        ASSERT_EQ(x.input_index, y.input_index);
        ASSERT_EQ(x.weights.size(), y.weights.size());
        ASSERT_EQ(std::memcmp(x.weights.data(), y.weights.data(), x.weights.size() * sizeof(double)), 0);
        ASSERT_EQ(std::memcmp(x.bias.data(), y.bias.data(), x.bias.size() * sizeof(double)), 0);
    }
    EXPECT_EQ(a.metadata(), b.metadata());
}

std::string fig_doc() { return serialize(fixture_n2()); }

} // namespace

TEST(Serialize, FixtureRoundTrip) {
    const Network n = deserialize(fig_doc());
    EXPECT_EQ(n.eval_abstract(BoxRegion{Interval{0, 1}})[0], Interval(0, 1));
    expect_same_graph(fixture_n2(), n);
    EXPECT_EQ(serialize(n), fig_doc());
}

TEST(Serialize, RandomRoundTripIsBitExact) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 300; ++t) {
        const Network n = random_network(rng).with_metadata({{"seed", std::to_string(t)}});
        const Network m = deserialize(serialize(n));
        expect_same_graph(n, m);
        const BoxRegion box = random_box(rng, n.input_dim(), -2, 2);
        EXPECT_EQ(n.eval_abstract(box), m.eval_abstract(box));
        const std::vector<double> x = random_point(rng, box);
        EXPECT_EQ(n.eval_concrete(x), m.eval_concrete(x));
    }
}

TEST(Serialize, HexReals) {
    for (double v : {0.0, -0.0, 0.1, -1.5, 1e-300, 123456789.125}) {
        const double r = parse_real(hex_real(v));
        EXPECT_EQ(std::memcmp(&r, &v, sizeof v), 0) << hex_real(v);
    }
    EXPECT_EQ(parse_real("0.5"), 0.5);
    EXPECT_THROW(parse_real("0.5x"), SchemaError);
    EXPECT_THROW(parse_real("inf"), SchemaError);
}

TEST(Serialize, AcceptsDecimalAndPlainNumbers) {
    auto doc = nlohmann::json::parse(fig_doc());
    for (auto& node : doc["nodes"]) {
        if (node["kind"] == "affine") {
            for (auto& w : node["weights"]) {
                w = parse_real(w.get<std::string>());
            }
            for (auto& b : node["bias"]) {
                b = std::to_string(parse_real(b.get<std::string>()));
            }
        }
    }
    const Network n = deserialize(doc.dump());
    EXPECT_EQ(n.eval_abstract(BoxRegion{Interval{0, 1}})[0], Interval(0, 1));
}

TEST(Serialize, NonContiguousIds) {
    auto doc = nlohmann::json::parse(fig_doc());
    std::map<int, int> remap;
    int next = 100;
    for (auto& node : doc["nodes"]) {
        remap[node["id"].get<int>()] = next;
        next += 7;
    }
    for (auto& node : doc["nodes"]) {
        node["id"] = remap[node["id"].get<int>()];
        if (node.contains("preds")) {
            for (auto& p : node["preds"]) {
                p = remap[p.get<int>()];
            }
        }
    }
    for (auto& o : doc["order"]) {
        o = remap[o.get<int>()];
    }
    doc["output"] = remap[doc["output"].get<int>()];
    const Network n = deserialize(doc.dump());
    EXPECT_EQ(n.eval_abstract(BoxRegion{Interval{0, 1}})[0], Interval(0, 1));
}

TEST(Serialize, EmptyGraph) {
    const std::string doc = R"({"format":"icnet-network","version":1,"input_dim":1,"output_dim":1,"nodes":[]})";
    try {
        (void)deserialize(doc);
        FAIL() << "expected an error";
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("no output node"), std::string::npos);
    }
}

TEST(Serialize, Cycle) {
    const std::string doc = R"({"format":"icnet-network","version":1,"input_dim":1,"output_dim":1,"output":2,
        "order":[0,1,2],
        "nodes":[{"id":0,"kind":"input","index":0},
                 {"id":1,"kind":"relu","preds":[2]},
                 {"id":2,"kind":"relu","preds":[1]}]})";
    try {
        (void)deserialize(doc);
        FAIL() << "expected an error";
    } catch (const CycleError& e) {
        EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos);
        EXPECT_GE(e.node(), 1);
    }
}

TEST(Serialize, ArityMismatch) {
    const std::string doc = R"({"format":"icnet-network","version":1,"input_dim":1,"output_dim":1,"output":1,
        "order":[0,1],
        "nodes":[{"id":0,"kind":"input","index":0},
                 {"id":1,"kind":"affine","preds":[0],"rows":1,"cols":2,"weights":[1,2],"bias":[0]}]})";
    try {
        (void)deserialize(doc);
        FAIL() << "expected an error";
    } catch (const ArityError& e) {
        EXPECT_EQ(e.node(), 1);
    }
}

TEST(Serialize, SchemaViolations) {
    EXPECT_THROW(deserialize("not json"), SchemaError);
    EXPECT_THROW(deserialize(R"({"format":"other","version":1})"), SchemaError);
    auto doc = nlohmann::json::parse(fig_doc());
    doc["version"] = 99;
    EXPECT_THROW(deserialize(doc.dump()), SchemaError);

    doc = nlohmann::json::parse(fig_doc());
    doc["nodes"][1]["kind"] = "tanh";
    EXPECT_THROW(deserialize(doc.dump()), SchemaError);

    doc = nlohmann::json::parse(fig_doc());
    doc["nodes"][1]["preds"] = {42};
    EXPECT_THROW(deserialize(doc.dump()), GraphError);

    doc = nlohmann::json::parse(fig_doc());
    doc["order"] = {0, 2, 1, 3, 4, 5};
    EXPECT_THROW(deserialize(doc.dump()), SchemaError);

    doc = nlohmann::json::parse(fig_doc());
    doc["output_dim"] = 3;
    EXPECT_THROW(deserialize(doc.dump()), ArityError);

    doc = nlohmann::json::parse(fig_doc());
    doc["metadata"]["n"] = 3;
    EXPECT_THROW(deserialize(doc.dump()), SchemaError);
}

TEST(Serialize, Files) {
    const auto path = std::filesystem::temp_directory_path() / "icnet_serialize_test.json";
    save_network(fixture_n1(), path);
    const Network n = load_network(path);
    EXPECT_EQ(n.eval_abstract(BoxRegion{Interval{0, 1}})[0], Interval(0, 1.5));
    std::filesystem::remove(path);
    EXPECT_THROW(load_network(path), std::exception);
}
