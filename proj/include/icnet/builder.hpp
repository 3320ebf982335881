// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
/*******************************************************************************
 *
 * Construction of ReLU networks whose interval propagation tracks the range
 * of a target function on every sub-box.
 *
 * Building blocks:
 *   nmin(x, y)   = 1/2 (1, -1, -1, -1) . relu(W [x; y]),
 *                  W = [[1, 1], [-1, -1], [1, -1], [-1, 1]]
 *   nmin_N       = nmin(nmin_{ceil(N/2)}(first half), nmin_{N-ceil(N/2)}(rest))
 *   clip_b(x)    = b - relu(b - x)
 *   bump phi_c   = relu(nmin_2m(clip_1(M l x_k + 1 - l i_k^lo),
 *                               clip_1(-M l x_k + l i_k^hi + 1), k = 0..m-1))
 *   slice n_k    = clip_1(sum_{c in Delta_k} phi_c)
 *   network n    = xi_0 + delta'/2 * sum_k n_k
 *
 * with grid step 1/M and ramp steepness l = 2^(ceil(log2 2m) + 1).
 *
 ******************************************************************************/
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "icnet/expr.hpp"
#include "icnet/interval.hpp"
#include "icnet/network.hpp"
#include "icnet/oracle.hpp"

namespace icnet {

inline constexpr double kDefaultBuildBudget = 5e6;

/// The grid (Z/M)^m over a box domain. The index range covers the domain
/// snapped outward to grid points.
struct GridSpec {
    std::int64_t M = 1;
    BoxRegion domain{Interval{0.0, 0.0}};
    std::vector<std::int64_t> lo_index; // largest i with i/M <= domain lo
    std::vector<std::int64_t> hi_index; // smallest i with i/M >= domain hi

    static GridSpec make(std::int64_t M, const BoxRegion& domain);

    [[nodiscard]] std::size_t dim() const { return domain.dim(); }
    [[nodiscard]] std::int64_t ell() const;
    [[nodiscard]] std::size_t points(std::size_t k) const {
        return static_cast<std::size_t>(hi_index[k] - lo_index[k] + 1);
    }
    [[nodiscard]] double coordinate(std::int64_t i) const { return static_cast<double>(i) / static_cast<double>(M); }
};

/// ramp steepness 2^(ceil(log2 2m) + 1).
std::int64_t grid_ell(std::size_t m);

/// Grid hyperrectangle with corner indices lower[k] <= upper[k].
struct HyperRect {
    std::vector<std::int64_t> lower;
    std::vector<std::int64_t> upper;

    /// conv(c): the box spanned by the corners.
    [[nodiscard]] BoxRegion hull(const GridSpec& g) const;
    /// conv(N(c)): one grid step wider on every side, clipped to the domain.
    [[nodiscard]] BoxRegion neighborhood_hull(const GridSpec& g) const;
    /// Throws std::invalid_argument unless the corners are ordered and inside
    /// the grid's index range.
    void check(const GridSpec& g) const;

    friend bool operator==(const HyperRect&, const HyperRect&) = default;
};

struct SliceReport {
    std::size_t members = 0; // all qualifying hyperrectangles
    std::size_t maximal = 0; // kept after inclusion-maximal pruning
};

struct BuildReport {
    std::string expr;
    BoxRegion domain{Interval{0.0, 0.0}};
    double delta_requested = 0.0;
    double delta_prime = 0.0;
    double lipschitz = 0.0;
    double xi_min = 0.0;
    double xi_max = 0.0;
    double range_margin = 0.0;
    bool constant = false;
    std::int64_t M = 0;
    std::int64_t ell = 0;
    std::size_t N = 0;
    std::vector<double> xi;
    std::vector<SliceReport> slices;
    std::size_t candidates = 0; // hyperrectangles x slices examined
    std::size_t bumps = 0;      // distinct bumps in the network
    std::size_t relu_units = 0;
    std::size_t nodes = 0;
    double wall_seconds = 0.0;
};

struct BuildOptions {
    double budget = kDefaultBuildBudget; // hyperrectangles x slices
    bool prune = true;                   // keep only inclusion-maximal members
    std::size_t sample_budget = kDefaultSampleBudget;
};

struct BuildResult {
    Network net;
    BuildReport report;
};

// Gadgets appended to an existing graph. A Scalar names one component of a
// node's output.
struct Scalar {
    NodeId node;
    std::size_t index = 0;
};

Scalar add_nmin2(GraphBuilder& g, Scalar x, Scalar y);
Scalar add_nmin_n(GraphBuilder& g, const std::vector<Scalar>& xs);
/// Elementwise b - relu(b - x) over the whole node.
NodeId add_clip_above(GraphBuilder& g, NodeId x, double b);
/// Bump over g.input_vector().
NodeId add_local_bump(GraphBuilder& g, const GridSpec& grid, const HyperRect& c);

// The same gadgets as standalone networks.
Network build_nmin2();
Network build_nmin_n(std::size_t n);
Network build_clip_above(double b);
Network build_local_bump(const GridSpec& grid, const HyperRect& c);

/// Reference value of a bump from its closed form
/// max(0, min(1, min_k ramps)).
double bump_closed_form(const GridSpec& grid, const HyperRect& c, std::span<const double> x);

/// relu units of one bump: 2m clips, 4 (2m - 1) in nmin_2m, 1 at the output.
std::size_t bump_relu_units(std::size_t m);
/// The textbook count 1 + 2 (2m - 1) + 2m, reported next to the real one.
std::size_t bump_relu_formula(std::size_t m);

/// M = max(1, ceil(2 L / delta)). Throws std::invalid_argument when
/// delta <= 0 or L is negative or not finite.
std::int64_t choose_grid_resolution(double lipschitz, double delta);

/// Sampled minimum of f at the grid points of every grid hyperrectangle,
/// with f evaluated at the nearest point of its domain.
class CandidateTable {
  public:
    CandidateTable(const FuncExpr& f, const GridSpec& grid);

    [[nodiscard]] std::size_t size() const { return mins_.size(); }
    [[nodiscard]] const GridSpec& grid() const { return grid_; }

    /// Hyperrectangles whose sampled minimum is >= threshold, in a fixed
    /// order; with prune, only the inclusion-maximal ones.
    [[nodiscard]] std::vector<HyperRect> members(double threshold, bool prune, SliceReport* report = nullptr) const;

    [[nodiscard]] double min_over(const HyperRect& c) const;

  private:
    [[nodiscard]] std::size_t flat(const std::vector<std::size_t>& pair) const;

    GridSpec grid_;
    std::vector<std::size_t> pairs_; // pairs per axis, G (G + 1) / 2
    std::vector<double> mins_;
};

/// Number of grid hyperrectangles, or +inf-like huge value when it overflows.
double hyperrect_count(const GridSpec& grid);

/// Delta_k for slice k: members of the table at threshold xi_{k+1}.
std::vector<HyperRect> enumerate_delta_k(const FuncExpr& f, const GridSpec& grid, const SliceSpec& spec, std::size_t k,
                                         bool prune = true);

/// clip_1(sum of bumps); the constant 0 network for an empty set.
Network build_slice_network(const std::vector<HyperRect>& delta_k, const GridSpec& grid);

/// The full construction for a scalar f. Throws std::invalid_argument for
/// delta <= 0 and BudgetExceeded when the enumeration would exceed the budget.
BuildResult build_certified_network(const FuncExpr& f, double delta, const BuildOptions& options = {});

struct VectorBuildResult {
    Network net;
    std::vector<BuildReport> reports;
};

/// Componentwise builds concatenated into one network.
VectorBuildResult build_vector_valued(const std::vector<FuncExpr>& fs, const std::vector<double>& deltas,
                                      const BuildOptions& options = {});

/// JSON build report document ("icnet-build-report").
std::string report_document(const std::vector<BuildReport>& reports);

/// Domain text "lo,hi;lo,hi" with round-trip numbers, and its parser.
std::string format_domain(const BoxRegion& box);
BoxRegion parse_domain(std::string_view text);

} // namespace icnet
