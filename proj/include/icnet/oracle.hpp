// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
/*******************************************************************************
 *
 * Certified extrema of an expression over a box, and N-slicing of its range.
 *
 * The extremum oracle samples f on a lattice whose spacing h (per axis, in
 * the infinity norm) satisfies L * h / 2 <= margin. Every point of the box is
 * within h / 2 of a sample, so the true minimum lies in
 * [sampled - L h / 2, sampled], and symmetrically for the maximum.
 *
 ******************************************************************************/
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "icnet/expr.hpp"
#include "icnet/interval.hpp"

namespace icnet {

inline constexpr std::size_t kDefaultSampleBudget = 50'000'000;

struct CertifiedBound {
    bool is_min = true;
    double sampled = 0.0;          // best sampled value
    double margin = 0.0;           // L * h / 2
    std::vector<double> argument;  // lexicographically smallest sample attaining it

    /// [sampled - margin, sampled] for a minimum, [sampled, sampled + margin]
    /// for a maximum.
    [[nodiscard]] Interval certified() const;
};

struct BoxExtrema {
    CertifiedBound min;
    CertifiedBound max;
    std::size_t samples = 0;
};

/// Number of lattice points the oracle would use. Returns SIZE_MAX when the
/// count does not fit.
std::size_t oracle_sample_count(const FuncExpr& f, const BoxRegion& box, double target_margin);

/// Both extrema from one pass. Requires target_margin > 0 and box.dim() =
/// f.dim. Throws BudgetExceeded when more than sample_budget points are
/// needed.
BoxExtrema certified_box_extrema(const FuncExpr& f, const BoxRegion& box, double target_margin,
                                 std::size_t sample_budget = kDefaultSampleBudget);

CertifiedBound certified_box_min(const FuncExpr& f, const BoxRegion& box, double target_margin,
                                 std::size_t sample_budget = kDefaultSampleBudget);
CertifiedBound certified_box_max(const FuncExpr& f, const BoxRegion& box, double target_margin,
                                 std::size_t sample_budget = kDefaultSampleBudget);

/// Levels xi_0 < ... < xi_N splitting a range into N slabs of equal height.
struct SliceSpec {
    std::size_t N = 1;
    std::vector<double> xi;   // N + 1 levels
    double delta = 0.0;       // adjusted tolerance, 2 * (xi_N - xi_0) / N
    double half_delta = 0.0;  // slab height

    [[nodiscard]] double level(std::size_t k) const { return xi.at(k); }
};

/// N = ceil(2 (xi_max - xi_min) / delta) and delta' = 2 (xi_max - xi_min) / N.
/// A zero-width range gives N = 1 and keeps delta. Throws
/// std::invalid_argument when delta <= 0 or xi_max < xi_min.
SliceSpec make_slice_spec(double xi_min, double xi_max, double delta);

/// clamp(v - xi_k, 0, xi_{k+1} - xi_k).
double slice_value(const SliceSpec& spec, std::size_t k, double v);

/// f_k(x) = slice_value(spec, k, f(x)). Throws std::out_of_range for k >= N.
double slice_eval(const FuncExpr& f, const SliceSpec& spec, std::size_t k, std::span<const double> x);

} // namespace icnet
