// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include "icnet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "icnet/errors.hpp"
#include "icnet/simd/kernels.hpp"

namespace icnet {

Interval CertifiedBound::certified() const {
    return is_min ? Interval{sampled - margin, sampled} : Interval{sampled, sampled + margin};
}

namespace {

constexpr std::size_t kChunk = 4096;

struct Lattice {
    std::vector<std::size_t> intervals; // per axis; 0 means a single sample at lo
    double margin = 0.0;
    std::size_t points = 0; // SIZE_MAX on overflow
};

Lattice plan(const FuncExpr& f, const BoxRegion& box, double target_margin) {
    if (box.dim() != f.dim) {
        throw DimensionError("box has dimension " + std::to_string(box.dim()) + ", expected " + std::to_string(f.dim));
    }
    if (!(target_margin > 0.0)) {
        throw std::invalid_argument("oracle margin must be positive");
    }
    Lattice lat;
    lat.intervals.assign(box.dim(), 0);
    const double L = f.lipschitz;
    double points = 1.0;
    double h = 0.0;
    for (std::size_t k = 0; k < box.dim(); ++k) {
        const double w = box[k].width();
        if (L > 0.0 && w > 0.0) {
            const double n = std::ceil(w * L / (2.0 * target_margin));
            if (n > 1e15) {
                lat.points = std::numeric_limits<std::size_t>::max();
                return lat;
            }
            lat.intervals[k] = static_cast<std::size_t>(n);
            h = std::max(h, w / n);
        }
        points *= static_cast<double>(lat.intervals[k] + 1);
    }
    lat.margin = L * h / 2.0;
    lat.points = points > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(points);
    return lat;
}

double coordinate(const Interval& iv, std::size_t n, std::size_t i) {
    if (n == 0) {
        return iv.lo();
    }
    if (i == n) {
        return iv.hi();
    }
    return iv.lo() + iv.width() * (static_cast<double>(i) / static_cast<double>(n));
}

} // namespace

std::size_t oracle_sample_count(const FuncExpr& f, const BoxRegion& box, double target_margin) {
    return plan(f, box, target_margin).points;
}

BoxExtrema certified_box_extrema(const FuncExpr& f, const BoxRegion& box, double target_margin,
                                 std::size_t sample_budget) {
    const Lattice lat = plan(f, box, target_margin);
    if (lat.points > sample_budget) {
        throw BudgetExceeded("oracle needs " +
                             (lat.points == std::numeric_limits<std::size_t>::max() ? std::string("too many")
                                                                                   : std::to_string(lat.points)) +
                             " samples for margin " + format_real(target_margin) + ", budget is " +
                             std::to_string(sample_budget));
    }
    const std::size_t m = box.dim();
    const Program prog = compile(f.expr, m);
    const simd::KernelTable& kern = simd::active();

    // Points are enumerated with axis 0 slowest, which is lexicographic order
    // on coordinates because every axis is sampled in increasing order.
    std::vector<std::vector<double>> axis(m);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i <= lat.intervals[k]; ++i) {
            axis[k].push_back(coordinate(box[k], lat.intervals[k], i));
        }
    }
    std::vector<std::vector<double>> cols(m, std::vector<double>(kChunk));
    std::vector<const double*> vars(m);
    std::vector<double> values(kChunk);
    std::vector<std::size_t> idx(m, 0);

    BoxExtrema out;
    out.min.is_min = true;
    out.max.is_min = false;
    out.min.margin = out.max.margin = lat.margin;
    out.samples = lat.points;
    bool first = true;
    std::size_t done = 0;
    while (done < lat.points) {
        const std::size_t n = std::min(kChunk, lat.points - done);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < m; ++k) {
                cols[k][j] = axis[k][idx[k]];
            }
            for (std::size_t k = m; k-- > 0;) {
                if (++idx[k] < axis[k].size()) {
                    break;
                }
                idx[k] = 0;
            }
        }
        for (std::size_t k = 0; k < m; ++k) {
            vars[k] = cols[k].data();
        }
        kern.eval_program(prog.view(), vars.data(), n, values.data());
        const simd::MinMax mm = kern.min_max(values.data(), n);
        const auto take = [&](CertifiedBound& b, double v) {
            const std::size_t j =
                static_cast<std::size_t>(std::find(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n), v) -
                                         values.begin());
            b.sampled = v;
            b.argument.resize(m);
            for (std::size_t k = 0; k < m; ++k) {
                b.argument[k] = cols[k][j];
            }
        };
        if (first || mm.min < out.min.sampled) {
            take(out.min, mm.min);
        }
        if (first || mm.max > out.max.sampled) {
            take(out.max, mm.max);
        }
        first = false;
        done += n;
    }
    return out;
}

CertifiedBound certified_box_min(const FuncExpr& f, const BoxRegion& box, double target_margin,
                                 std::size_t sample_budget) {
    return certified_box_extrema(f, box, target_margin, sample_budget).min;
}

CertifiedBound certified_box_max(const FuncExpr& f, const BoxRegion& box, double target_margin,
                                 std::size_t sample_budget) {
    return certified_box_extrema(f, box, target_margin, sample_budget).max;
}

SliceSpec make_slice_spec(double xi_min, double xi_max, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("delta must be positive");
    }
    if (!(xi_max >= xi_min) || !std::isfinite(xi_min) || !std::isfinite(xi_max)) {
        throw std::invalid_argument("slice range must satisfy xi_min <= xi_max");
    }
    SliceSpec s;
    const double range = xi_max - xi_min;
    if (range == 0.0) {
        s.N = 1;
        s.xi = {xi_min, xi_max};
        s.delta = delta;
        s.half_delta = 0.0;
        return s;
    }
    // A quotient within a few ulps of an integer is that integer: the range
    // and delta are usually decimal inputs that do not divide exactly in
    // binary.
    const double q = 2.0 * range / delta;
    const double r = std::round(q);
    const double n = std::fabs(q - r) <= 4.0 * std::numeric_limits<double>::epsilon() * q ? r : std::ceil(q);
    s.N = static_cast<std::size_t>(std::max(1.0, n));
    s.delta = std::min(delta, 2.0 * range / static_cast<double>(s.N));
    s.half_delta = range / static_cast<double>(s.N);
    s.xi.resize(s.N + 1);
    for (std::size_t k = 0; k < s.N; ++k) {
        s.xi[k] = xi_min + (static_cast<double>(k) / static_cast<double>(s.N)) * range;
    }
    s.xi[s.N] = xi_max;
    return s;
}

double slice_value(const SliceSpec& spec, std::size_t k, double v) {
    if (k >= spec.N) {
        throw std::out_of_range("slice index " + std::to_string(k) + " out of range");
    }
    const double height = spec.xi[k + 1] - spec.xi[k];
    return std::clamp(v - spec.xi[k], 0.0, height);
}

double slice_eval(const FuncExpr& f, const SliceSpec& spec, std::size_t k, std::span<const double> x) {
    return slice_value(spec, k, eval(f, x));
}

} // namespace icnet
