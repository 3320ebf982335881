// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
/*******************************************************************************
 *
 * Target functions given as expressions over x0 .. x{m-1}.
 *
 * Grammar (whitespace-insensitive):
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary ('*' unary)*
 *   unary   := '-' unary | primary
 *   primary := number | 'x' digits | '(' expr ')'
 *            | ('min' | 'max') '(' expr ',' expr ')'
 *            | ('relu' | 'abs') '(' expr ')'
 *   number  := decimal literal (1, 0.25, 3e-2) or hex-float (0x1.8p+1)
 *
 * Powers are written as repeated products; there is no division, so every
 * expression is Lipschitz on a bounded box.
 *
 ******************************************************************************/
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icnet/interval.hpp"
#include "icnet/simd/kernels.hpp"

namespace icnet {

enum class ExprKind : std::uint8_t {
    constant,
    variable,
    neg,
    add,
    sub,
    mul,
    min,
    max,
    relu,
    abs,
    // select(p, q, a, b): a where p < q, b where p > q, either where equal.
    // Produced only by differentiation.
    select,
};

struct ExprNode {
    ExprKind kind = ExprKind::constant;
    double value = 0.0;          // constant
    std::uint32_t var = 0;       // variable
    std::int32_t arg[4] = {-1, -1, -1, -1};
};

/// An expression tree stored as an arena; children precede their parents.
class Expr {
  public:
    [[nodiscard]] std::int32_t root() const { return root_; }
    [[nodiscard]] const ExprNode& node(std::int32_t i) const { return nodes_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] bool empty() const { return nodes_.empty(); }

    /// One plus the largest variable index used, 0 for closed expressions.
    [[nodiscard]] std::size_t arity() const;

    std::int32_t constant(double v);
    std::int32_t variable(std::uint32_t k);
    std::int32_t unary(ExprKind kind, std::int32_t a);
    std::int32_t binary(ExprKind kind, std::int32_t a, std::int32_t b);
    std::int32_t select(std::int32_t p, std::int32_t q, std::int32_t a, std::int32_t b);
    void set_root(std::int32_t r) { root_ = r; }

  private:
    std::int32_t push(ExprNode n);

    std::vector<ExprNode> nodes_;
    std::int32_t root_ = -1;
};

/// A parsed function together with its box domain and a certified
/// infinity-norm Lipschitz bound on that domain.
struct FuncExpr {
    Expr expr;
    std::size_t dim = 0;
    BoxRegion domain{Interval{0.0, 0.0}};
    double lipschitz = 0.0;
    std::string source;
};

/// Throws ParseError with the byte offset of the problem.
Expr parse_expr(std::string_view text, std::size_t dim);

/// Parses and attaches the domain and Lipschitz bound. Throws
/// DimensionError when domain.dim() != dim.
FuncExpr parse(std::string_view text, std::size_t dim, const BoxRegion& domain);

/// Minimal-parenthesis text that parses back to the same tree.
std::string to_string(const Expr& e);

/// Shortest decimal text that reads back as the same double.
std::string format_real(double v);

double eval(const Expr& e, std::span<const double> x);

/// Throws DimensionError unless |x| = f.dim.
double eval(const FuncExpr& f, std::span<const double> x);

/// Interval extension of the expression (natural interval evaluation).
Interval eval_interval(const Expr& e, const BoxRegion& box);

/// Formal partial derivative with respect to x_k. Kinks of min, max, relu
/// and abs become select nodes, whose interval value is the hull of the
/// one-sided derivatives where the branch is undecided.
Expr derivative(const Expr& e, std::size_t k);

/// max over sub-boxes P of sum_k sup_P |d f / d x_k|, each sup bounded by
/// interval evaluation on P. The domain is split into about 4096 pieces.
double lipschitz_bound(const Expr& e, const BoxRegion& domain);

/// Postfix program for the SIMD evaluator.
struct Program {
    std::vector<simd::Op> ops;
    std::size_t max_stack = 0;
    std::size_t num_vars = 0;

    [[nodiscard]] simd::ProgramView view() const { return {ops.data(), ops.size(), max_stack, num_vars}; }
};

/// Throws std::invalid_argument for expressions containing select.
Program compile(const Expr& e, std::size_t num_vars);

} // namespace icnet
