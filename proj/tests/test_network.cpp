// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "icnet/errors.hpp"
#include "icnet/fixtures.hpp"
#include "icnet/network.hpp"
#include "support/random_network.hpp"

using namespace icnet;
using icnet::testing::random_box;
using icnet::testing::random_network;
using icnet::testing::random_point;
using icnet::testing::random_sub_box;
using icnet::testing::uniform;

namespace {

double eval1(const Network& n, double x) { return n.eval_concrete(std::vector<double>{x})[0]; }

Interval prop1(const Network& n, double lo, double hi) { return n.eval_abstract(BoxRegion{Interval{lo, hi}})[0]; }

} // namespace

TEST(Fixtures, ConcreteValues) {
    const Network n1 = fixture_n1();
    const Network n2 = fixture_n2();
    EXPECT_EQ(eval1(n1, 0.0), 1.0);
    EXPECT_EQ(eval1(n1, 1.0), 0.0);
    EXPECT_EQ(eval1(n1, 0.5), 0.5);
    EXPECT_EQ(eval1(n2, 0.5), 0.5);
    // Both encode clamp(1 - x, 0, 1).
    for (int i = -50; i <= 150; ++i) {
        const double x = i / 100.0;
        const double f = std::clamp(1.0 - x, 0.0, 1.0);
        EXPECT_NEAR(eval1(n1, x), f, 1e-15);
        EXPECT_NEAR(eval1(n2, x), f, 1e-15);
    }
}

TEST(Fixtures, Propagation) {
    EXPECT_EQ(prop1(fixture_n1(), 0, 1), Interval(0, 1.5));
    EXPECT_EQ(prop1(fixture_n2(), 0, 1), Interval(0, 1));
    EXPECT_FALSE(iv_subset(prop1(fixture_n1(), 0, 1), {-0.25, 1.25}));
    EXPECT_THROW(fixture_by_name("fig3"), std::invalid_argument);
    EXPECT_EQ(fixture_by_name("fig2-n2").metadata().at("fixture"), "fig2-n2");
}

TEST(Network, DifferenceLosesPrecision) {
    // x - x is 0 everywhere but propagates [0, 1] to [-1, 1].
    GraphBuilder g(1);
    const NodeId both = g.concat({g.input(0), g.input(0)});
    const Network n = g.finish(g.affine(both, 1, {1.0, -1.0}, {0.0}));
    EXPECT_EQ(eval1(n, 0.7), 0.0);
    EXPECT_EQ(prop1(n, 0, 1), Interval(-1, 1));
}

TEST(Network, DimensionChecks) {
    const Network n = fixture_n1();
    EXPECT_THROW((void)n.eval_concrete(std::vector<double>{1.0, 2.0}), DimensionError);
    EXPECT_THROW((void)n.eval_abstract(BoxRegion{{0, 1}, {0, 1}}), DimensionError);
}

TEST(Network, BuilderRejectsBadShapes) {
    GraphBuilder g(2);
    EXPECT_THROW(g.affine(g.input(0), 2, {1.0}, {0.0, 0.0}), ArityError);
    EXPECT_THROW(g.sum({g.input(0), g.input_vector()}), ArityError);
    EXPECT_THROW(g.relu(99), GraphError);
    EXPECT_THROW((void)g.input(2), std::exception);
}

TEST(Network, Stats) {
    GraphBuilder g(1);
    const Network a = g.finish(g.affine(g.input(0), 1, {2.0}, {1.0}));
    const NetworkStats s = stats(a);
    EXPECT_EQ(s.relu_units, 0U);
    EXPECT_EQ(s.depth, 1U);
    EXPECT_EQ(s.parameters, 2U);

    const NetworkStats f = stats(fixture_n1());
    EXPECT_EQ(f.relu_units, 4U);
    EXPECT_EQ(f.depth, 5U);
    EXPECT_EQ(f.parameters, 4U + 6U + 3U);
}

TEST(Combinators, SumWithShift) {
    const Network n1 = fixture_n1();
    const std::vector<double> one{1.0};
    const Network shifted = constant_shift(sum_outputs({n1}, one), -2.0);
    for (double x : {-0.5, 0.0, 0.3, 1.0, 2.0}) {
        EXPECT_EQ(eval1(shifted, x), eval1(n1, x) - 2.0);
    }
}

TEST(Combinators, ComposeWithIdentity) {
    std::mt19937_64 rng(21);
    const Network n1 = fixture_n1();
    const Network c = compose(identity_network(1), n1);
    const Network d = compose(n1, identity_network(1));
    for (int i = 0; i < 100; ++i) {
        const double x = uniform(rng, -2, 2);
        EXPECT_EQ(eval1(c, x), eval1(n1, x));
        EXPECT_EQ(eval1(d, x), eval1(n1, x));
    }
}

TEST(Combinators, DifferenceOfFixtures) {
    const Network n1 = fixture_n1();
    const std::vector<double> coeff{1.0, -1.0};
    const Network diff = sum_outputs({n1, n1}, coeff);
    for (double x : {-1.0, 0.0, 0.25, 0.5, 1.0, 3.0}) {
        EXPECT_EQ(eval1(diff, x), 0.0);
    }
    EXPECT_EQ(prop1(diff, 0, 1), Interval(-1.5, 1.5));
}

TEST(Combinators, ConcatAndAffine) {
    const Network n1 = fixture_n1();
    const Network n2 = fixture_n2();
    const Network both = concat_outputs({n1, n2});
    ASSERT_EQ(both.output_dim(), 2U);
    const BoxRegion b = both.eval_abstract(BoxRegion{Interval{0, 1}});
    EXPECT_EQ(b[0], Interval(0, 1.5));
    EXPECT_EQ(b[1], Interval(0, 1));

    // y = 2 n(x) + 1 and n(3x - 1).
    const std::vector<double> w{2.0};
    const std::vector<double> bias{1.0};
    const Network post = affine_post(n1, 1, w, bias);
    const std::vector<double> wi{3.0};
    const std::vector<double> bi{-1.0};
    const Network pre = affine_pre(n1, 1, wi, bi);
    for (double x : {0.0, 0.2, 0.5}) {
        EXPECT_EQ(eval1(post, x), 2.0 * eval1(n1, x) + 1.0);
        EXPECT_EQ(eval1(pre, x), eval1(n1, 3.0 * x - 1.0));
    }
    EXPECT_THROW(affine_post(n1, 1, std::vector<double>{1.0, 2.0}, bias), std::exception);
}

TEST(Combinators, ConstantNetwork) {
    const std::vector<double> v{3.0, -1.0};
    const Network c = constant_network(2, v);
    const BoxRegion b = c.eval_abstract(BoxRegion{{-5, 5}, {0, 1}});
    EXPECT_EQ(b[0], Interval::point(3.0));
    EXPECT_EQ(b[1], Interval::point(-1.0));
}

// The abstract value of a composition is the composition of abstract values.
TEST(Combinators, AbstractHomomorphism) {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 300; ++t) {
        Network inner = random_network(rng, 2);
        while (inner.output_dim() != 1) {
            inner = random_network(rng, 2);
        }
        Network outer = random_network(rng, 1);
        while (outer.input_dim() != 1) {
            outer = random_network(rng, 1);
        }
        const Network c = compose(outer, inner);
        const BoxRegion box = random_box(rng, inner.input_dim(), -2, 2);
        EXPECT_EQ(c.eval_abstract(box), outer.eval_abstract(inner.eval_abstract(box)));
        const std::vector<double> x = random_point(rng, box);
        EXPECT_EQ(c.eval_concrete(x), outer.eval_concrete(inner.eval_concrete(x)));
    }
}

TEST(NetworkProperty, Soundness) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 2000; ++t) {
        const Network n = random_network(rng);
        for (int s = 0; s < 10; ++s) {
            const BoxRegion box = random_box(rng, n.input_dim(), -3, 3);
            const BoxRegion out = n.eval_abstract(box);
            for (int p = 0; p < 5; ++p) {
                const std::vector<double> y = n.eval_concrete(random_point(rng, box));
                ASSERT_TRUE(box_contains(out, y, 1e-9));
            }
        }
    }
}

TEST(NetworkProperty, Monotonicity) {
    std::mt19937_64 rng(24);
    for (int t = 0; t < 2000; ++t) {
        const Network n = random_network(rng);
        const BoxRegion outer = random_box(rng, n.input_dim(), -3, 3);
        const BoxRegion inner = random_sub_box(rng, outer);
        ASSERT_TRUE(box_subset(n.eval_abstract(inner), n.eval_abstract(outer)));
    }
}

TEST(NetworkProperty, PointExactness) {
    std::mt19937_64 rng(25);
    for (int t = 0; t < 2000; ++t) {
        const Network n = random_network(rng);
        const std::vector<double> x = random_point(rng, random_box(rng, n.input_dim(), -3, 3));
        const std::vector<double> y = n.eval_concrete(x);
        const BoxRegion b = n.eval_abstract(BoxRegion::point(x));
        ASSERT_EQ(b, BoxRegion::point(y));
    }
}
