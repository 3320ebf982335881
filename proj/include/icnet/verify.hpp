// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
/*******************************************************************************
 *
 * Sandwich checks of a built network against its target function.
 *
 * For a box B with true range [l, u] of f, the network must satisfy
 *
 *     [l + d, u - d]  subset of  n#(B)  subset of  [l - d, u + d]
 *
 * where d is the adjusted tolerance delta'. The oracle only brackets l and u:
 * l lies in [l_s - mu, l_s] and u in [u_s, u_s + mu] for sampled extremes
 * l_s, u_s and margin mu. Each inclusion is decided only when every (l, u)
 * in that bracket gives the same answer; otherwise the margin is refined and
 * the box is marked inconclusive once the sample budget runs out.
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

struct RunConfig {
    std::uint64_t seed = 42;
    std::size_t boxes = 100;
    double tolerance = 1e-9;      // slack for floating-point comparisons
    double margin = 0.0;          // starting oracle margin; 0 means delta'/64
    std::size_t sample_budget = kDefaultSampleBudget;
    unsigned threads = 0;         // 0 means hardware concurrency
    std::size_t max_refinements = 6;
};

enum class SandwichStatus { holds, vacuous, violated, inconclusive };

std::string_view status_name(SandwichStatus s);

struct LabeledBox {
    BoxRegion box{Interval{0.0, 0.0}};
    std::string origin; // random, domain, lattice, reference
};

/// `count` random boxes (componentwise min/max of two uniform points), then,
/// when count > 0, the domain itself, the point boxes of the 5^m lattice
/// (m <= 5) and [-1, 1] when the domain is [-2, 2].
std::vector<LabeledBox> verification_boxes(const BoxRegion& domain, std::size_t count, std::uint64_t seed);

struct BoxRecord {
    std::size_t index = 0;
    std::size_t component = 0;
    LabeledBox box;
    double l = 0.0; // sampled minimum
    double u = 0.0; // sampled maximum
    double margin = 0.0;
    Interval propagated{0.0, 0.0};
    SandwichStatus lower = SandwichStatus::inconclusive;
    SandwichStatus upper = SandwichStatus::inconclusive;
    double violation = 0.0; // certified lower bound on the violation

    [[nodiscard]] bool failed() const {
        return lower == SandwichStatus::violated || upper == SandwichStatus::violated;
    }
    [[nodiscard]] bool inconclusive() const {
        return !failed() && (lower == SandwichStatus::inconclusive || upper == SandwichStatus::inconclusive);
    }
};

/// One box, one output component.
BoxRecord check_sandwich(const Network& net, std::size_t component, const FuncExpr& f, const LabeledBox& box,
                         double delta_prime, const RunConfig& config);

struct VerificationSummary {
    std::size_t boxes = 0;
    std::size_t records = 0;
    std::size_t failures = 0;
    std::size_t inconclusive = 0;
    double max_violation = 0.0;
};

struct VerificationReport {
    RunConfig config;
    std::vector<std::string> exprs;
    BoxRegion domain{Interval{0.0, 0.0}};
    std::vector<double> delta_prime;
    std::vector<BoxRecord> records; // box order, then component
    VerificationSummary summary;
    double wall_seconds = 0.0;      // not part of the document

    /// JSON document ("icnet-verify-report"); identical configs give
    /// byte-identical documents.
    [[nodiscard]] std::string document() const;
};

/// Domain and per-output delta' recorded by the builder.
struct NetworkInfo {
    BoxRegion domain{Interval{0.0, 0.0}};
    std::vector<double> delta_prime;
};

/// Throws SchemaError when the metadata lacks them or disagrees with the
/// network's shape.
NetworkInfo network_info(const Network& net);

/// Checks every box against every component; fs[j] is the target of output j.
VerificationReport verify_network(const Network& net, const std::vector<FuncExpr>& fs, const NetworkInfo& info,
                                  const RunConfig& config);

/// CSV with header: coordinates, then f, n and the propagated bounds of the
/// cell starting at the sample, per output. Requires input dimension <= 2;
/// `samples` points per axis.
std::string plot_table(const Network& net, const std::vector<FuncExpr>& fs, const BoxRegion& domain,
                       std::size_t samples);

} // namespace icnet
