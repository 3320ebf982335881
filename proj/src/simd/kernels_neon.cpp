// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
// NEON variants for AArch64. vminq/vmaxq order signed zeros differently from
// the scalar reference, so min/max/relu are built from compare + select.
#include <arm_neon.h>

#include <vector>

#include "icnet/simd/kernels.hpp"
#include "icnet/simd/scalar_ops.hpp"

namespace icnet::simd {
namespace {

constexpr std::size_t kLanes = 2;

inline float64x2_t sel_min(float64x2_t a, float64x2_t b) { return vbslq_f64(vcltq_f64(a, b), a, b); }
inline float64x2_t sel_max(float64x2_t a, float64x2_t b) { return vbslq_f64(vcgtq_f64(a, b), a, b); }

void affine(const AffineView& a, const double* x, double* y) {
    std::size_t r = 0;
    for (; r + kLanes <= a.rows; r += kLanes) {
        float64x2_t acc = vld1q_f64(a.bias + r);
        for (std::size_t c = 0; c < a.cols; ++c) {
            const float64x2_t w = vld1q_f64(a.weights + c * a.rows + r);
            acc = vaddq_f64(acc, vmulq_f64(w, vdupq_n_f64(x[c])));
        }
        vst1q_f64(y + r, acc);
    }
    for (; r < a.rows; ++r) {
        double acc = a.bias[r];
        for (std::size_t c = 0; c < a.cols; ++c) {
            acc += a.weights[c * a.rows + r] * x[c];
        }
        y[r] = acc;
    }
}

void affine_interval(const AffineView& a, const double* xlo, const double* xhi, double* ylo, double* yhi) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    std::size_t r = 0;
    for (; r + kLanes <= a.rows; r += kLanes) {
        float64x2_t lo = vld1q_f64(a.bias + r);
        float64x2_t hi = lo;
        for (std::size_t c = 0; c < a.cols; ++c) {
            const float64x2_t w = vld1q_f64(a.weights + c * a.rows + r);
            const uint64x2_t nonneg = vcgeq_f64(w, zero);
            const float64x2_t pl = vmulq_f64(w, vdupq_n_f64(xlo[c]));
            const float64x2_t ph = vmulq_f64(w, vdupq_n_f64(xhi[c]));
            lo = vaddq_f64(lo, vbslq_f64(nonneg, pl, ph));
            hi = vaddq_f64(hi, vbslq_f64(nonneg, ph, pl));
        }
        vst1q_f64(ylo + r, lo);
        vst1q_f64(yhi + r, hi);
    }
    for (; r < a.rows; ++r) {
        double lo = a.bias[r];
        double hi = a.bias[r];
        for (std::size_t c = 0; c < a.cols; ++c) {
            const double w = a.weights[c * a.rows + r];
            if (w >= 0.0) {
                lo += w * xlo[c];
                hi += w * xhi[c];
            } else {
                lo += w * xhi[c];
                hi += w * xlo[c];
            }
        }
        ylo[r] = lo;
        yhi[r] = hi;
    }
}

void relu_array(const double* x, double* y, std::size_t n) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        vst1q_f64(y + i, sel_max(vld1q_f64(x + i), zero));
    }
    for (; i < n; ++i) {
        y[i] = relu(x[i]);
    }
}

void eval_program(const ProgramView& p, const double* const* vars, std::size_t n, double* out) {
    std::vector<float64x2_t> stack(p.max_stack);
    const float64x2_t zero = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        std::size_t top = 0;
        for (std::size_t k = 0; k < p.size; ++k) {
            const Op& op = p.ops[k];
            switch (op.code) {
            case OpCode::constant: stack[top++] = vdupq_n_f64(op.value); break;
            case OpCode::variable: stack[top++] = vld1q_f64(vars[op.index] + i); break;
            case OpCode::neg: stack[top - 1] = vnegq_f64(stack[top - 1]); break;
            case OpCode::relu: stack[top - 1] = sel_max(stack[top - 1], zero); break;
            case OpCode::abs: stack[top - 1] = vabsq_f64(stack[top - 1]); break;
            case OpCode::add: --top; stack[top - 1] = vaddq_f64(stack[top - 1], stack[top]); break;
            case OpCode::sub: --top; stack[top - 1] = vsubq_f64(stack[top - 1], stack[top]); break;
            case OpCode::mul: --top; stack[top - 1] = vmulq_f64(stack[top - 1], stack[top]); break;
            case OpCode::min: --top; stack[top - 1] = sel_min(stack[top - 1], stack[top]); break;
            case OpCode::max: --top; stack[top - 1] = sel_max(stack[top - 1], stack[top]); break;
            }
        }
        vst1q_f64(out + i, stack[0]);
    }
    if (i < n) {
        std::vector<const double*> shifted(p.num_vars);
        for (std::size_t v = 0; v < p.num_vars; ++v) {
            shifted[v] = vars[v] + i;
        }
        detail::scalar_table.eval_program(p, shifted.data(), n - i, out + i);
    }
}

MinMax min_max(const double* v, std::size_t n) {
    if (n < kLanes) {
        return detail::scalar_table.min_max(v, n);
    }
    float64x2_t lo = vld1q_f64(v);
    float64x2_t hi = lo;
    std::size_t i = kLanes;
    for (; i + kLanes <= n; i += kLanes) {
        const float64x2_t x = vld1q_f64(v + i);
        lo = sel_min(lo, x);
        hi = sel_max(hi, x);
    }
    MinMax m{select_min(vgetq_lane_f64(lo, 0), vgetq_lane_f64(lo, 1)),
             select_max(vgetq_lane_f64(hi, 0), vgetq_lane_f64(hi, 1))};
    for (; i < n; ++i) {
        m.min = select_min(m.min, v[i]);
        m.max = select_max(m.max, v[i]);
    }
    return m;
}

} // namespace

namespace detail {
const KernelTable neon_table{Isa::neon, affine, affine_interval, relu_array, eval_program, min_max};
} // namespace detail

} // namespace icnet::simd
