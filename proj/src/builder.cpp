// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include "icnet/builder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "icnet/errors.hpp"
#include "icnet/serialize.hpp"
#include "icnet/simd/kernels.hpp"

namespace icnet {

std::int64_t grid_ell(std::size_t m) {
    std::int64_t e = 0;
    while ((std::int64_t{1} << e) < static_cast<std::int64_t>(2 * m)) {
        ++e;
    }
    return std::int64_t{1} << (e + 1);
}

GridSpec GridSpec::make(std::int64_t M, const BoxRegion& domain) {
    if (M < 1) {
        throw std::invalid_argument("grid resolution must be at least 1");
    }
    GridSpec g;
    g.M = M;
    g.domain = domain;
    const auto Md = static_cast<double>(M);
    for (std::size_t k = 0; k < domain.dim(); ++k) {
        // fma gives the exact sign of x * M - i, so the snapping is exact even
        // where x * M itself rounds.
        const double lo = domain[k].lo();
        auto i = static_cast<std::int64_t>(std::floor(lo * Md));
        while (std::fma(lo, Md, -static_cast<double>(i)) < 0.0) {
            --i;
        }
        while (std::fma(lo, Md, -static_cast<double>(i + 1)) >= 0.0) {
            ++i;
        }
        const double hi = domain[k].hi();
        auto j = static_cast<std::int64_t>(std::ceil(hi * Md));
        while (std::fma(hi, Md, -static_cast<double>(j)) > 0.0) {
            ++j;
        }
        while (std::fma(hi, Md, -static_cast<double>(j - 1)) <= 0.0) {
            --j;
        }
        g.lo_index.push_back(i);
        g.hi_index.push_back(j);
    }
    return g;
}

std::int64_t GridSpec::ell() const { return grid_ell(dim()); }

BoxRegion HyperRect::hull(const GridSpec& g) const {
    std::vector<Interval> b;
    for (std::size_t k = 0; k < lower.size(); ++k) {
        b.emplace_back(g.coordinate(lower[k]), g.coordinate(upper[k]));
    }
    return BoxRegion{std::move(b)};
}

BoxRegion HyperRect::neighborhood_hull(const GridSpec& g) const {
    std::vector<Interval> b;
    for (std::size_t k = 0; k < lower.size(); ++k) {
        const double lo = std::min(g.coordinate(lower[k]), std::max(g.domain[k].lo(), g.coordinate(lower[k] - 1)));
        const double hi = std::max(g.coordinate(upper[k]), std::min(g.domain[k].hi(), g.coordinate(upper[k] + 1)));
        b.emplace_back(lo, hi);
    }
    return BoxRegion{std::move(b)};
}

void HyperRect::check(const GridSpec& g) const {
    if (lower.size() != g.dim() || upper.size() != g.dim()) {
        throw DimensionError("hyperrectangle dimension does not match the grid");
    }
    for (std::size_t k = 0; k < g.dim(); ++k) {
        if (lower[k] > upper[k]) {
            throw std::invalid_argument("hyperrectangle corners are not ordered");
        }
        if (lower[k] < g.lo_index[k] || upper[k] > g.hi_index[k]) {
            throw std::invalid_argument("hyperrectangle corner outside the domain grid");
        }
    }
}

Scalar add_nmin2(GraphBuilder& g, Scalar x, Scalar y) {
    NodeId src = x.node;
    std::size_t ix = x.index;
    std::size_t iy = y.index;
    if (x.node != y.node) {
        src = g.concat({x.node, y.node});
        iy += g.arity(x.node);
    }
    const std::size_t cols = g.arity(src);
    std::vector<double> w(4 * cols, 0.0);
    const double rows[4][2] = {{1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}};
    for (std::size_t r = 0; r < 4; ++r) {
        w[r * cols + ix] += rows[r][0];
        w[r * cols + iy] += rows[r][1];
    }
    const NodeId h = g.affine(src, 4, std::move(w), std::vector<double>(4, 0.0));
    const NodeId a = g.relu(h);
    const NodeId out = g.affine(a, 1, {0.5, -0.5, -0.5, -0.5}, {0.0});
    return {out, 0};
}

Scalar add_nmin_n(GraphBuilder& g, const std::vector<Scalar>& xs) {
    if (xs.empty()) {
        throw std::invalid_argument("nmin needs at least one input");
    }
    if (xs.size() == 1) {
        return xs[0];
    }
    const std::size_t half = (xs.size() + 1) / 2;
    const Scalar left = add_nmin_n(g, {xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(half)});
    const Scalar right = add_nmin_n(g, {xs.begin() + static_cast<std::ptrdiff_t>(half), xs.end()});
    return add_nmin2(g, left, right);
}

NodeId add_clip_above(GraphBuilder& g, NodeId x, double b) {
    const std::size_t n = g.arity(x);
    std::vector<double> neg(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        neg[i * n + i] = -1.0;
    }
    const NodeId t = g.affine(x, n, neg, std::vector<double>(n, b));
    const NodeId r = g.relu(t);
    return g.affine(r, n, std::move(neg), std::vector<double>(n, b));
}

NodeId add_local_bump(GraphBuilder& g, const GridSpec& grid, const HyperRect& c) {
    c.check(grid);
    const std::size_t m = grid.dim();
    const std::int64_t ell = grid.ell();
    const auto slope = static_cast<double>(grid.M * ell);
    std::vector<double> w(2 * m * m, 0.0);
    std::vector<double> bias(2 * m);
    for (std::size_t k = 0; k < m; ++k) {
        w[(2 * k) * m + k] = slope;
        bias[2 * k] = static_cast<double>(1 - ell * c.lower[k]);
        w[(2 * k + 1) * m + k] = -slope;
        bias[2 * k + 1] = static_cast<double>(ell * c.upper[k] + 1);
    }
    const NodeId ramps = g.affine(g.input_vector(), 2 * m, std::move(w), std::move(bias));
    const NodeId clipped = add_clip_above(g, ramps, 1.0);
    std::vector<Scalar> parts;
    for (std::size_t j = 0; j < 2 * m; ++j) {
        parts.push_back({clipped, j});
    }
    const Scalar mn = add_nmin_n(g, parts);
    return g.relu(mn.node);
}

Network build_nmin2() {
    GraphBuilder g(2);
    const Scalar s = add_nmin2(g, {g.input(0), 0}, {g.input(1), 0});
    return g.finish(s.node);
}

Network build_nmin_n(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("nmin needs at least one input");
    }
    GraphBuilder g(n);
    std::vector<Scalar> xs;
    for (std::size_t k = 0; k < n; ++k) {
        xs.push_back({g.input(k), 0});
    }
    const Scalar s = add_nmin_n(g, xs);
    return g.finish(s.node);
}

Network build_clip_above(double b) {
    GraphBuilder g(1);
    const NodeId out = add_clip_above(g, g.input(0), b);
    return g.finish(out);
}

Network build_local_bump(const GridSpec& grid, const HyperRect& c) {
    GraphBuilder g(grid.dim());
    const NodeId out = add_local_bump(g, grid, c);
    return g.finish(out);
}

double bump_closed_form(const GridSpec& grid, const HyperRect& c, std::span<const double> x) {
    const std::int64_t ell = grid.ell();
    const auto slope = static_cast<double>(grid.M * ell);
    double v = 1.0;
    for (std::size_t k = 0; k < grid.dim(); ++k) {
        v = std::min(v, slope * x[k] + static_cast<double>(1 - ell * c.lower[k]));
        v = std::min(v, -slope * x[k] + static_cast<double>(ell * c.upper[k] + 1));
    }
    return std::max(0.0, v);
}

std::size_t bump_relu_units(std::size_t m) { return 2 * m + 4 * (2 * m - 1) + 1; }

std::size_t bump_relu_formula(std::size_t m) { return 1 + 2 * (2 * m - 1) + 2 * m; }

std::int64_t choose_grid_resolution(double lipschitz, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("delta must be positive");
    }
    if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) {
        throw std::invalid_argument("Lipschitz bound must be finite and nonnegative");
    }
    const double m = std::ceil(2.0 * lipschitz / delta);
    if (m > 1e15) {
        throw BudgetExceeded("grid resolution " + format_real(m) + " is too large; use a larger delta");
    }
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(m));
}

namespace {

std::size_t pair_index(std::size_t G, std::size_t a, std::size_t b) { return a * G - a * (a - 1) / 2 + (b - a); }

} // namespace

double hyperrect_count(const GridSpec& grid) {
    double n = 1.0;
    for (std::size_t k = 0; k < grid.dim(); ++k) {
        const auto G = static_cast<double>(grid.points(k));
        n *= G * (G + 1.0) / 2.0;
    }
    return n;
}

CandidateTable::CandidateTable(const FuncExpr& f, const GridSpec& grid) : grid_(grid) {
    const std::size_t m = grid.dim();
    if (f.dim != m) {
        throw DimensionError("function and grid dimensions differ");
    }
    std::vector<std::size_t> G(m);
    std::size_t total = 1;
    for (std::size_t k = 0; k < m; ++k) {
        G[k] = grid.points(k);
        pairs_.push_back(G[k] * (G[k] + 1) / 2);
        total *= G[k];
    }

    // f at every grid point, axis 0 slowest; points outside the domain are
    // clamped onto it.
    std::vector<std::vector<double>> axis(m);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < G[k]; ++i) {
            const double x = grid.coordinate(grid.lo_index[k] + static_cast<std::int64_t>(i));
            axis[k].push_back(std::clamp(x, grid.domain[k].lo(), grid.domain[k].hi()));
        }
    }
    std::vector<double> values(total);
    {
        const Program prog = compile(f.expr, m);
        std::vector<std::vector<double>> cols(m, std::vector<double>(total));
        std::vector<std::size_t> idx(m, 0);
        for (std::size_t j = 0; j < total; ++j) {
            for (std::size_t k = 0; k < m; ++k) {
                cols[k][j] = axis[k][idx[k]];
            }
            for (std::size_t k = m; k-- > 0;) {
                if (++idx[k] < G[k]) {
                    break;
                }
                idx[k] = 0;
            }
        }
        std::vector<const double*> vars(m);
        for (std::size_t k = 0; k < m; ++k) {
            vars[k] = cols[k].data();
        }
        simd::active().eval_program(prog.view(), vars.data(), total, values.data());
    }

    // Replace one axis at a time by its (lower, upper) pairs, keeping the
    // running minimum along the pair's span.
    std::vector<std::size_t> shape = G;
    for (std::size_t d = 0; d < m; ++d) {
        std::size_t outer = 1;
        std::size_t inner = 1;
        for (std::size_t j = 0; j < d; ++j) {
            outer *= shape[j];
        }
        for (std::size_t j = d + 1; j < m; ++j) {
            inner *= shape[j];
        }
        const std::size_t n = G[d];
        std::vector<double> next(outer * pairs_[d] * inner);
        std::vector<double> run(inner);
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t a = 0; a < n; ++a) {
                std::fill(run.begin(), run.end(), std::numeric_limits<double>::infinity());
                for (std::size_t b = a; b < n; ++b) {
                    const double* src = values.data() + (o * n + b) * inner;
                    double* dst = next.data() + (o * pairs_[d] + pair_index(n, a, b)) * inner;
                    for (std::size_t i = 0; i < inner; ++i) {
                        run[i] = std::min(run[i], src[i]);
                        dst[i] = run[i];
                    }
                }
            }
        }
        values = std::move(next);
        shape[d] = pairs_[d];
    }
    mins_ = std::move(values);
}

std::size_t CandidateTable::flat(const std::vector<std::size_t>& pair) const {
    std::size_t f = 0;
    for (std::size_t k = 0; k < pair.size(); ++k) {
        f = f * pairs_[k] + pair[k];
    }
    return f;
}

double CandidateTable::min_over(const HyperRect& c) const {
    c.check(grid_);
    std::vector<std::size_t> pair(grid_.dim());
    for (std::size_t k = 0; k < grid_.dim(); ++k) {
        const auto a = static_cast<std::size_t>(c.lower[k] - grid_.lo_index[k]);
        const auto b = static_cast<std::size_t>(c.upper[k] - grid_.lo_index[k]);
        pair[k] = pair_index(grid_.points(k), a, b);
    }
    return mins_[flat(pair)];
}

std::vector<HyperRect> CandidateTable::members(double threshold, bool prune, SliceReport* report) const {
    const std::size_t m = grid_.dim();
    // Per axis: the (a, b) of every pair index.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> decode(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t n = grid_.points(k);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a; b < n; ++b) {
                decode[k].emplace_back(a, b);
            }
        }
    }
    std::vector<std::size_t> stride(m, 1);
    for (std::size_t k = m; k-- > 1;) {
        stride[k - 1] = stride[k] * pairs_[k];
    }
    std::vector<HyperRect> out;
    std::size_t count = 0;
    std::vector<std::size_t> pair(m, 0);
    for (std::size_t f = 0; f < mins_.size(); ++f) {
        if (mins_[f] >= threshold) {
            ++count;
            bool maximal = true;
            if (prune) {
                // Membership is closed under shrinking, so c is maximal iff
                // none of its one-step extensions is a member.
                for (std::size_t k = 0; k < m && maximal; ++k) {
                    const std::size_t n = grid_.points(k);
                    const auto [a, b] = decode[k][pair[k]];
                    const std::size_t base = f - pair[k] * stride[k];
                    if (a > 0 && mins_[base + pair_index(n, a - 1, b) * stride[k]] >= threshold) {
                        maximal = false;
                    }
                    if (b + 1 < n && mins_[base + pair_index(n, a, b + 1) * stride[k]] >= threshold) {
                        maximal = false;
                    }
                }
            }
            if (maximal) {
                HyperRect c;
                for (std::size_t k = 0; k < m; ++k) {
                    const auto [a, b] = decode[k][pair[k]];
                    c.lower.push_back(grid_.lo_index[k] + static_cast<std::int64_t>(a));
                    c.upper.push_back(grid_.lo_index[k] + static_cast<std::int64_t>(b));
                }
                out.push_back(std::move(c));
            }
        }
        for (std::size_t k = m; k-- > 0;) {
            if (++pair[k] < pairs_[k]) {
                break;
            }
            pair[k] = 0;
        }
    }
    if (report != nullptr) {
        report->members = count;
        report->maximal = out.size();
    }
    return out;
}

std::vector<HyperRect> enumerate_delta_k(const FuncExpr& f, const GridSpec& grid, const SliceSpec& spec, std::size_t k,
                                         bool prune) {
    if (k >= spec.N) {
        throw std::out_of_range("slice index " + std::to_string(k) + " out of range");
    }
    const CandidateTable table(f, grid);
    return table.members(spec.xi[k + 1], prune);
}

namespace {

using BumpCache = std::map<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>, NodeId>;

NodeId add_slice(GraphBuilder& g, const GridSpec& grid, const std::vector<HyperRect>& rects, BumpCache& cache) {
    std::vector<NodeId> bumps;
    for (const HyperRect& c : rects) {
        const auto key = std::make_pair(c.lower, c.upper);
        auto it = cache.find(key);
        if (it == cache.end()) {
            it = cache.emplace(key, add_local_bump(g, grid, c)).first;
        }
        bumps.push_back(it->second);
    }
    const NodeId total = g.sum(std::move(bumps));
    return add_clip_above(g, total, 1.0);
}

std::string join_reals(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + format_real(v[i]);
    }
    return s;
}

template <class F>
std::string join_reports(const std::vector<BuildReport>& rs, char sep, F&& field) {
    std::string s;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (i > 0) {
            s += sep;
        }
        s += field(rs[i]);
    }
    return s;
}

Metadata metadata_for(const std::vector<BuildReport>& rs) {
    Metadata md;
    md["generator"] = "icnet build";
    md["domain"] = format_domain(rs.front().domain);
    md["expr"] = join_reports(rs, ';', [](const BuildReport& r) { return r.expr; });
    md["delta"] = join_reports(rs, ',', [](const BuildReport& r) { return format_real(r.delta_requested); });
    md["delta_prime"] = join_reports(rs, ',', [](const BuildReport& r) { return format_real(r.delta_prime); });
    md["lipschitz"] = join_reports(rs, ',', [](const BuildReport& r) { return format_real(r.lipschitz); });
    md["M"] = join_reports(rs, ',', [](const BuildReport& r) { return std::to_string(r.M); });
    md["ell"] = join_reports(rs, ',', [](const BuildReport& r) { return std::to_string(r.ell); });
    md["N"] = join_reports(rs, ',', [](const BuildReport& r) { return std::to_string(r.N); });
    md["xi_min"] = join_reports(rs, ',', [](const BuildReport& r) { return format_real(r.xi_min); });
    md["xi_max"] = join_reports(rs, ',', [](const BuildReport& r) { return format_real(r.xi_max); });
    md["levels"] = join_reports(rs, ';', [](const BuildReport& r) { return join_reals(r.xi); });
    md["bumps"] = join_reports(rs, ',', [](const BuildReport& r) { return std::to_string(r.bumps); });
    return md;
}

nlohmann::ordered_json report_json(const BuildReport& r) {
    nlohmann::ordered_json j;
    j["expr"] = r.expr;
    j["domain"] = format_domain(r.domain);
    j["delta_requested"] = r.delta_requested;
    j["delta_prime"] = r.delta_prime;
    j["lipschitz"] = r.lipschitz;
    j["xi_min"] = r.xi_min;
    j["xi_max"] = r.xi_max;
    j["range_margin"] = r.range_margin;
    j["constant"] = r.constant;
    j["M"] = r.M;
    j["ell"] = r.ell;
    j["N"] = r.N;
    j["levels"] = r.xi;
    nlohmann::ordered_json slices = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < r.slices.size(); ++k) {
        slices.push_back({{"k", k}, {"members", r.slices[k].members}, {"maximal", r.slices[k].maximal}});
    }
    j["slices"] = std::move(slices);
    j["candidates"] = r.candidates;
    j["bumps"] = r.bumps;
    j["relu_units"] = r.relu_units;
    j["nodes"] = r.nodes;
    j["wall_seconds"] = r.wall_seconds;
    return j;
}

} // namespace

Network build_slice_network(const std::vector<HyperRect>& delta_k, const GridSpec& grid) {
    if (delta_k.empty()) {
        const double zero = 0.0;
        return constant_network(grid.dim(), {&zero, 1});
    }
    GraphBuilder g(grid.dim());
    BumpCache cache;
    const NodeId out = add_slice(g, grid, delta_k, cache);
    return g.finish(out);
}

BuildResult build_certified_network(const FuncExpr& f, double delta, const BuildOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("delta must be positive");
    }
    const std::size_t m = f.dim;
    BuildReport rep;
    rep.expr = f.source.empty() ? to_string(f.expr) : f.source;
    rep.domain = f.domain;
    rep.delta_requested = delta;
    rep.lipschitz = f.lipschitz;
    rep.ell = grid_ell(m);

    // Range of f on the domain. The sampled extremes are used unwidened; the
    // construction tolerates a range error below delta'/2 and the margin is
    // kept at delta'/8 or less.
    double xi_min = 0.0;
    double xi_max = 0.0;
    if (f.lipschitz == 0.0) {
        xi_min = xi_max = eval(f, f.domain.lower());
    } else {
        double margin = delta / 8.0;
        for (int round = 0; round < 8; ++round) {
            const BoxExtrema ext = certified_box_extrema(f, f.domain, margin, options.sample_budget);
            xi_min = ext.min.sampled;
            xi_max = ext.max.sampled;
            rep.range_margin = ext.min.margin;
            const SliceSpec s = make_slice_spec(xi_min, xi_max, delta);
            if (xi_max == xi_min || ext.min.margin <= s.delta / 4.0) {
                break;
            }
            margin = s.delta / 8.0;
        }
    }
    const SliceSpec spec = make_slice_spec(xi_min, xi_max, delta);
    rep.xi_min = xi_min;
    rep.xi_max = xi_max;
    rep.N = spec.N;
    rep.xi = spec.xi;
    rep.delta_prime = spec.delta;

    GraphBuilder g(m);
    NodeId out = 0;
    if (xi_max == xi_min) {
        rep.constant = true;
        rep.M = 1;
        rep.slices.assign(1, SliceReport{});
        out = g.affine(g.input_vector(), 1, std::vector<double>(m, 0.0), {xi_min});
    } else {
        rep.M = choose_grid_resolution(f.lipschitz, spec.delta);
        const GridSpec grid = GridSpec::make(rep.M, f.domain);
        const double candidates = hyperrect_count(grid) * static_cast<double>(spec.N);
        if (candidates > options.budget) {
            std::ostringstream msg;
            msg << "enumeration needs " << candidates << " candidate evaluations (M=" << rep.M << ", N=" << spec.N
                << ", m=" << m << "), budget is " << options.budget
                << "; use a larger delta or fewer input dimensions";
            throw BudgetExceeded(msg.str());
        }
        rep.candidates = static_cast<std::size_t>(candidates);
        const CandidateTable table(f, grid);
        BumpCache cache;
        std::vector<NodeId> slices;
        for (std::size_t k = 0; k < spec.N; ++k) {
            SliceReport sr;
            const std::vector<HyperRect> rects = table.members(spec.xi[k + 1], options.prune, &sr);
            rep.slices.push_back(sr);
            if (!rects.empty()) {
                slices.push_back(add_slice(g, grid, rects, cache));
            }
        }
        rep.bumps = cache.size();
        if (slices.empty()) {
            out = g.affine(g.input_vector(), 1, std::vector<double>(m, 0.0), {xi_min});
        } else {
            const std::size_t n = slices.size();
            const NodeId joined = n == 1 ? slices[0] : g.concat(std::move(slices));
            out = g.affine(joined, 1, std::vector<double>(n, spec.delta / 2.0), {xi_min});
        }
    }
    Network net = g.finish(out);
    const NetworkStats st = stats(net);
    rep.relu_units = st.relu_units;
    rep.nodes = st.nodes;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Network tagged = net.with_metadata(metadata_for({rep}));
    return {std::move(tagged), std::move(rep)};
}

VectorBuildResult build_vector_valued(const std::vector<FuncExpr>& fs, const std::vector<double>& deltas,
                                      const BuildOptions& options) {
    if (fs.empty() || fs.size() != deltas.size()) {
        throw DimensionError("need one delta per component function");
    }
    for (const FuncExpr& f : fs) {
        if (!(f.domain == fs[0].domain)) {
            throw DimensionError("component functions must share the domain");
        }
    }
    VectorBuildResult out{constant_network(fs[0].dim, std::vector<double>{0.0}), {}};
    std::vector<Network> nets;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        BuildResult r = build_certified_network(fs[i], deltas[i], options);
        nets.push_back(std::move(r.net));
        out.reports.push_back(std::move(r.report));
    }
    Network joined = nets.size() == 1 ? std::move(nets[0]) : concat_outputs(nets);
    out.net = joined.with_metadata(metadata_for(out.reports));
    return out;
}

std::string report_document(const std::vector<BuildReport>& reports) {
    nlohmann::ordered_json doc;
    doc["format"] = "icnet-build-report";
    doc["version"] = 1;
    nlohmann::ordered_json comps = nlohmann::ordered_json::array();
    for (const BuildReport& r : reports) {
        comps.push_back(report_json(r));
    }
    doc["components"] = std::move(comps);
    return doc.dump(1) + "\n";
}

std::string format_domain(const BoxRegion& box) {
    std::string s;
    for (std::size_t k = 0; k < box.dim(); ++k) {
        if (k > 0) {
            s += ';';
        }
        s += format_real(box[k].lo()) + "," + format_real(box[k].hi());
    }
    return s;
}

BoxRegion parse_domain(std::string_view text) {
    std::vector<Interval> bounds;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(';', start), text.size());
        const std::string_view part = text.substr(start, end - start);
        const std::size_t comma = part.find(',');
        if (comma == std::string_view::npos || part.find(',', comma + 1) != std::string_view::npos) {
            throw std::invalid_argument("malformed box '" + std::string(text) + "': expected lo,hi;lo,hi;...");
        }
        const auto trim = [](std::string_view s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0) {
                s.remove_prefix(1);
            }
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0) {
                s.remove_suffix(1);
            }
            return s;
        };
        double lo = 0.0;
        double hi = 0.0;
        try {
            lo = parse_real(trim(part.substr(0, comma)));
            hi = parse_real(trim(part.substr(comma + 1)));
        } catch (const SchemaError&) {
            throw std::invalid_argument("malformed number in box '" + std::string(text) + "'");
        }
        if (lo > hi) {
            throw std::invalid_argument("box bound with lo > hi in '" + std::string(text) + "'");
        }
        bounds.emplace_back(lo, hi);
        start = end + 1;
    }
    return BoxRegion{std::move(bounds)};
}

} // namespace icnet
