// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
/*******************************************************************************
 *
 * The interval domain over doubles: intervals, axis-aligned boxes and the
 * interval transformers for the operations ReLU networks are made of.
 *
 * Arithmetic is plain round-to-nearest. Every transformer performs the same
 * floating-point operations, in the same order, as its concrete counterpart,
 * so a degenerate interval [p, p] is mapped to [f(p), f(p)] exactly.
 *
 ******************************************************************************/
#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace icnet {

/// ReLU with the select semantics shared by every kernel: `x > 0 ? x : +0`.
inline double relu(double x) { return x > 0.0 ? x : 0.0; }

/// A closed interval [lo, hi] with finite endpoints and lo <= hi.
class Interval {
  public:
    /// Throws std::invalid_argument on NaN, infinite endpoints or lo > hi.
    Interval(double lo, double hi);

    static Interval point(double x) { return Interval{x, x}; }

    [[nodiscard]] double lo() const { return lo_; }
    [[nodiscard]] double hi() const { return hi_; }
    [[nodiscard]] double width() const { return hi_ - lo_; }
    [[nodiscard]] bool is_point() const { return lo_ == hi_; }

    friend bool operator==(const Interval&, const Interval&) = default;

  private:
    double lo_;
    double hi_;
};

std::ostream& operator<<(std::ostream& os, const Interval& x);

Interval iv_add(const Interval& x, const Interval& y);
Interval iv_neg(const Interval& x);

/// lambda * x for lambda >= 0; a negative lambda throws std::invalid_argument.
Interval iv_scale(double lambda, const Interval& x);

Interval iv_relu(const Interval& x);

/// Clipping t -> b - relu(b - t), applied to both endpoints.
Interval iv_clip_above(double b, const Interval& x);

/// bias + sum_i weights[i] * inputs[i], accumulated left to right starting
/// from the bias. Terms with a negative weight are iv_neg(iv_scale(-w, x)).
Interval iv_affine_row(std::span<const double> weights, double bias, std::span<const Interval> inputs);

/// The same row in positive/negative weight-split form:
/// [sum w+ lo - w- hi + b, sum w+ hi - w- lo + b]. Equal to iv_affine_row in
/// exact arithmetic; used as a second route in tests.
Interval iv_affine_row_split(std::span<const double> weights, double bias, std::span<const Interval> inputs);

/// Closed-form interval image of the two-input min gadget, case by case.
Interval nmin2_closed_form(const Interval& x, const Interval& y);

/// x subset-of y, with both of x's endpoints allowed to stick out by `tol`.
bool iv_subset(const Interval& x, const Interval& y, double tol = 0.0);
bool iv_contains(const Interval& x, double p, double tol = 0.0);

/// An axis-aligned box, one interval per dimension.
class BoxRegion {
  public:
    /// Throws DimensionError on an empty bound list.
    explicit BoxRegion(std::vector<Interval> bounds);
    BoxRegion(std::initializer_list<Interval> bounds) : BoxRegion(std::vector<Interval>(bounds)) {}

    static BoxRegion point(std::span<const double> x);

    [[nodiscard]] std::size_t dim() const { return bounds_.size(); }
    [[nodiscard]] const Interval& operator[](std::size_t k) const { return bounds_[k]; }
    [[nodiscard]] const std::vector<Interval>& bounds() const { return bounds_; }
    [[nodiscard]] std::vector<double> lower() const;
    [[nodiscard]] std::vector<double> upper() const;
    [[nodiscard]] bool is_point() const;

    friend bool operator==(const BoxRegion&, const BoxRegion&) = default;

  private:
    std::vector<Interval> bounds_;
};

std::ostream& operator<<(std::ostream& os, const BoxRegion& b);

bool box_subset(const BoxRegion& x, const BoxRegion& y, double tol = 0.0);
bool box_contains(const BoxRegion& x, std::span<const double> p, double tol = 0.0);

} // namespace icnet
