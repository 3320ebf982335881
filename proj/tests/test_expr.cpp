// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "icnet/errors.hpp"
#include "icnet/expr.hpp"
#include "support/random_network.hpp"

using namespace icnet;
using icnet::testing::random_point;
using icnet::testing::uniform;

namespace {

const BoxRegion kCubicDomain{Interval{-2, 2}};
const BoxRegion kUnitSquare{{0, 1}, {0, 1}};

double ev(const char* src, std::vector<double> x) { return eval(parse_expr(src, x.size()), x); }

} // namespace

TEST(Expr, ParseExamples) {
    const FuncExpr cubic = parse("-x0*x0*x0 + 3*x0", 1, kCubicDomain);
    EXPECT_EQ(eval(cubic, std::vector<double>{1.0}), 2.0);
    EXPECT_EQ(eval(cubic, std::vector<double>{-1.0}), -2.0);
    const FuncExpr m = parse("min(x0, x1)", 2, kUnitSquare);
    EXPECT_EQ(eval(m, std::vector<double>{0.3, 0.7}), 0.3);
    EXPECT_THROW(parse("x2", 2, kUnitSquare), ParseError);
}

TEST(Expr, Errors) {
    EXPECT_THROW(parse_expr("sin(x0)", 1), ParseError);
    EXPECT_THROW(parse_expr("min(x0)", 1), ParseError);
    EXPECT_THROW(parse_expr("relu(x0, x0)", 1), ParseError);
    EXPECT_THROW(parse_expr("x0 +", 1), ParseError);
    EXPECT_THROW(parse_expr("(x0", 1), ParseError);
    EXPECT_THROW(parse_expr("x0 / 2", 1), ParseError);
    EXPECT_THROW(parse_expr("", 1), ParseError);
    try {
        (void)parse_expr("x0 + foo", 1);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 5U);
    }
    EXPECT_THROW(parse("x0", 2, kCubicDomain), DimensionError);
    EXPECT_THROW(eval(parse("x0", 1, kCubicDomain), std::vector<double>{1, 2}), DimensionError);
}

TEST(Expr, Evaluation) {
    EXPECT_EQ(ev("2*x0 - -x0", {1.5}), 4.5);
    EXPECT_EQ(ev("-x0*x0", {3}), -9);
    EXPECT_EQ(ev("1 - 2 - 3", {0}), -4);
    EXPECT_EQ(ev("max(x0, x1) + relu(-x0) + abs(x1)", {-1, -2}), -1 + 1 + 2);
    EXPECT_EQ(ev("0x1.8p+1", {0}), 3.0);
    EXPECT_EQ(ev("2.5e-1 * x0", {4}), 1.0);
    EXPECT_EQ(ev("  min ( x0 ,x1 )", {2, 1}), 1.0);
}

TEST(Expr, PrintIsFixedPoint) {
    const char* sources[] = {"-x0*x0*x0 + 3*x0", "x0 - (x1 - x0)", "-(x0 + x1) * 2", "min(x0, -0.5) - -x1",
                             "abs(relu(x0) - max(x1, 0x1p-3))", "1 - 2 - 3", "x0 * (x1 * x0)", "--x0"};
    for (const char* s : sources) {
        const std::string once = to_string(parse_expr(s, 2));
        const std::string twice = to_string(parse_expr(once, 2));
        EXPECT_EQ(once, twice) << s;
        std::mt19937_64 rng(41);
        for (int i = 0; i < 20; ++i) {
            const std::vector<double> x = random_point(rng, BoxRegion{{-3, 3}, {-3, 3}});
            EXPECT_EQ(eval(parse_expr(s, 2), x), eval(parse_expr(once, 2), x)) << s;
        }
    }
}

TEST(Expr, FormatReal) {
    for (double v : {0.1, -2.5, 1e-300, 3.0, 0.30000000000000004}) {
        EXPECT_EQ(std::stod(format_real(v)), v);
    }
    EXPECT_EQ(format_real(3.0), "3");
}

TEST(Expr, IntervalEvaluationEncloses) {
    std::mt19937_64 rng(42);
    const Expr e = parse_expr("-x0*x0*x0 + 3*x1 - abs(min(x0, x1)) * relu(x1)", 2);
    for (int t = 0; t < 2000; ++t) {
        const BoxRegion box = icnet::testing::random_box(rng, 2, -2, 2);
        const Interval iv = eval_interval(e, box);
        for (int p = 0; p < 5; ++p) {
            ASSERT_TRUE(iv_contains(iv, eval(e, random_point(rng, box)), 1e-9));
        }
    }
}

TEST(Lipschitz, Examples) {
    const FuncExpr cubic = parse("-x0*x0*x0 + 3*x0", 1, kCubicDomain);
    EXPECT_GE(cubic.lipschitz, 9.0);
    EXPECT_LT(cubic.lipschitz, 9.1);
    EXPECT_EQ(parse("5", 1, kCubicDomain).lipschitz, 0.0);
    EXPECT_EQ(parse("x0 + x1", 2, BoxRegion{{-7, 3}, {0, 100}}).lipschitz, 2.0);
    EXPECT_EQ(parse("min(x0, x1)", 2, kUnitSquare).lipschitz, 2.0);
    EXPECT_EQ(parse("x0*x1", 2, kUnitSquare).lipschitz, 2.0);
    EXPECT_EQ(parse("abs(x0)", 1, kCubicDomain).lipschitz, 1.0);
}

TEST(Lipschitz, DerivativeMatchesFiniteDifference) {
    const Expr e = parse_expr("-x0*x0*x0 + 3*x0*x1", 2);
    const Expr d0 = derivative(e, 0);
    const Expr d1 = derivative(e, 1);
    for (double x : {-1.0, 0.5, 1.5}) {
        for (double y : {-0.5, 2.0}) {
            EXPECT_DOUBLE_EQ(eval(d0, std::vector<double>{x, y}), -3 * x * x + 3 * y);
            EXPECT_DOUBLE_EQ(eval(d1, std::vector<double>{x, y}), 3 * x);
        }
    }
}

// |f(x) - f(y)| <= L |x - y|_inf on random pairs.
TEST(LipschitzProperty, CertificateHolds) {
    struct Case {
        const char* src;
        BoxRegion dom;
    };
    const Case cases[] = {
        {"-x0*x0*x0 + 3*x0", BoxRegion{Interval{-2, 2}}},
        {"min(x0, x1)", kUnitSquare},
        {"x0*x1", kUnitSquare},
        {"abs(x0 - x1) * x0 + max(x1, 0.25) - relu(x0*x0 - 0.5)", BoxRegion{{-1, 2}, {-1, 1}}},
    };
    std::mt19937_64 rng(43);
    for (const Case& c : cases) {
        const FuncExpr f = parse(c.src, c.dom.dim(), c.dom);
        for (int t = 0; t < 25000; ++t) {
            const std::vector<double> x = random_point(rng, c.dom);
            const std::vector<double> y = random_point(rng, c.dom);
            double dist = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                dist = std::max(dist, std::fabs(x[k] - y[k]));
            }
            ASSERT_LE(std::fabs(eval(f, x) - eval(f, y)), f.lipschitz * dist + 1e-9) << c.src;
        }
    }
}

TEST(Compile, RejectsSelect) {
    const Expr d = derivative(parse_expr("min(x0, 1)", 1), 0);
    EXPECT_THROW(compile(d, 1), std::invalid_argument);
}
