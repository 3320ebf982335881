// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include "icnet/interval.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "icnet/errors.hpp"

namespace icnet {

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("interval endpoints must be finite");
    }
    if (lo > hi) {
        throw std::invalid_argument("interval lower endpoint " + std::to_string(lo) + " exceeds upper endpoint " +
                                    std::to_string(hi));
    }
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
    return os << '[' << x.lo() << ", " << x.hi() << ']';
}

Interval iv_add(const Interval& x, const Interval& y) { return Interval{x.lo() + y.lo(), x.hi() + y.hi()}; }

Interval iv_neg(const Interval& x) { return Interval{-x.hi(), -x.lo()}; }

Interval iv_scale(double lambda, const Interval& x) {
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("interval scaling needs a nonnegative factor");
    }
    return Interval{lambda * x.lo(), lambda * x.hi()};
}

Interval iv_relu(const Interval& x) { return Interval{relu(x.lo()), relu(x.hi())}; }

Interval iv_clip_above(double b, const Interval& x) {
    return Interval{b - relu(b - x.lo()), b - relu(b - x.hi())};
}

Interval iv_affine_row(std::span<const double> weights, double bias, std::span<const Interval> inputs) {
    if (weights.size() != inputs.size()) {
        throw DimensionError("affine row has " + std::to_string(weights.size()) + " weights but " +
                             std::to_string(inputs.size()) + " inputs");
    }
    double lo = bias;
    double hi = bias;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double w = weights[i];
        // -((-w) * t) == w * t bit-for-bit, so this is iv_neg(iv_scale(-w, x)).
        const Interval term = w >= 0.0 ? iv_scale(w, inputs[i]) : iv_neg(iv_scale(-w, inputs[i]));
        lo += term.lo();
        hi += term.hi();
    }
    return Interval{lo, hi};
}

Interval iv_affine_row_split(std::span<const double> weights, double bias, std::span<const Interval> inputs) {
    if (weights.size() != inputs.size()) {
        throw DimensionError("affine row has " + std::to_string(weights.size()) + " weights but " +
                             std::to_string(inputs.size()) + " inputs");
    }
    double pos_lo = 0.0, pos_hi = 0.0, neg_lo = 0.0, neg_hi = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double w = weights[i];
        if (w >= 0.0) {
            pos_lo += w * inputs[i].lo();
            pos_hi += w * inputs[i].hi();
        } else {
            neg_lo += -w * inputs[i].lo();
            neg_hi += -w * inputs[i].hi();
        }
    }
    return Interval{pos_lo - neg_hi + bias, pos_hi - neg_lo + bias};
}

Interval nmin2_closed_form(const Interval& x, const Interval& y) {
    const double a = x.lo(), b = x.hi(), c = y.lo(), d = y.hi();
    if (d <= a) {
        return Interval{c + (a - b) / 2, d + (b - a) / 2};
    }
    if (b <= c) {
        return Interval{a + (c - d) / 2, b + (d - c) / 2};
    }
    return Interval{a + c - (b + d) / 2, (b + d) / 2};
}

bool iv_subset(const Interval& x, const Interval& y, double tol) {
    return x.lo() >= y.lo() - tol && x.hi() <= y.hi() + tol;
}

bool iv_contains(const Interval& x, double p, double tol) { return p >= x.lo() - tol && p <= x.hi() + tol; }

BoxRegion::BoxRegion(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
    if (bounds_.empty()) {
        throw DimensionError("a box needs at least one dimension");
    }
}

BoxRegion BoxRegion::point(std::span<const double> x) {
    std::vector<Interval> b;
    b.reserve(x.size());
    for (double v : x) {
        b.push_back(Interval::point(v));
    }
    return BoxRegion{std::move(b)};
}

std::vector<double> BoxRegion::lower() const {
    std::vector<double> out;
    out.reserve(dim());
    for (const auto& b : bounds_) {
        out.push_back(b.lo());
    }
    return out;
}

std::vector<double> BoxRegion::upper() const {
    std::vector<double> out;
    out.reserve(dim());
    for (const auto& b : bounds_) {
        out.push_back(b.hi());
    }
    return out;
}

bool BoxRegion::is_point() const {
    for (const auto& b : bounds_) {
        if (!b.is_point()) {
            return false;
        }
    }
    return true;
}

std::ostream& operator<<(std::ostream& os, const BoxRegion& b) {
    os << '(';
    for (std::size_t k = 0; k < b.dim(); ++k) {
        os << (k ? ", " : "") << b[k];
    }
    return os << ')';
}

bool box_subset(const BoxRegion& x, const BoxRegion& y, double tol) {
    if (x.dim() != y.dim()) {
        throw DimensionError("box dimensions differ");
    }
    for (std::size_t k = 0; k < x.dim(); ++k) {
        if (!iv_subset(x[k], y[k], tol)) {
            return false;
        }
    }
    return true;
}

bool box_contains(const BoxRegion& x, std::span<const double> p, double tol) {
    if (x.dim() != p.size()) {
        throw DimensionError("point and box dimensions differ");
    }
    for (std::size_t k = 0; k < x.dim(); ++k) {
        if (!iv_contains(x[k], p[k], tol)) {
            return false;
        }
    }
    return true;
}

} // namespace icnet
