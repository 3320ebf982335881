// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
// AVX2 variants. This translation unit is the only one built with -mavx2 and
// is entered only after a runtime CPU check.
#include <immintrin.h>

#include <vector>

#include "icnet/simd/kernels.hpp"
#include "icnet/simd/scalar_ops.hpp"

namespace icnet::simd {
namespace {

constexpr std::size_t kLanes = 4;

void affine(const AffineView& a, const double* x, double* y) {
    std::size_t r = 0;
    for (; r + kLanes <= a.rows; r += kLanes) {
        __m256d acc = _mm256_loadu_pd(a.bias + r);
        for (std::size_t c = 0; c < a.cols; ++c) {
            const __m256d w = _mm256_loadu_pd(a.weights + c * a.rows + r);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(w, _mm256_set1_pd(x[c])));
        }
        _mm256_storeu_pd(y + r, acc);
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
    const __m256d zero = _mm256_setzero_pd();
    std::size_t r = 0;
    for (; r + kLanes <= a.rows; r += kLanes) {
        __m256d lo = _mm256_loadu_pd(a.bias + r);
        __m256d hi = lo;
        for (std::size_t c = 0; c < a.cols; ++c) {
            const __m256d w = _mm256_loadu_pd(a.weights + c * a.rows + r);
            const __m256d nonneg = _mm256_cmp_pd(w, zero, _CMP_GE_OQ);
            const __m256d pl = _mm256_mul_pd(w, _mm256_set1_pd(xlo[c]));
            const __m256d ph = _mm256_mul_pd(w, _mm256_set1_pd(xhi[c]));
            lo = _mm256_add_pd(lo, _mm256_blendv_pd(ph, pl, nonneg));
            hi = _mm256_add_pd(hi, _mm256_blendv_pd(pl, ph, nonneg));
        }
        _mm256_storeu_pd(ylo + r, lo);
        _mm256_storeu_pd(yhi + r, hi);
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
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        // max_pd(a, b) is (a > b) ? a : b, i.e. relu with a +0 result for -0.
        _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    }
    for (; i < n; ++i) {
        y[i] = relu(x[i]);
    }
}

void eval_program(const ProgramView& p, const double* const* vars, std::size_t n, double* out) {
    // Wrapped so the vector's element type keeps its alignment attribute.
    struct Reg {
        __m256d v;
    };
    std::vector<Reg> stack(p.max_stack);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d sign = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        std::size_t top = 0;
        for (std::size_t k = 0; k < p.size; ++k) {
            const Op& op = p.ops[k];
            switch (op.code) {
            case OpCode::constant: stack[top++].v = _mm256_set1_pd(op.value); break;
            case OpCode::variable: stack[top++].v = _mm256_loadu_pd(vars[op.index] + i); break;
            case OpCode::neg: stack[top - 1].v = _mm256_xor_pd(stack[top - 1].v, sign); break;
            case OpCode::relu: stack[top - 1].v = _mm256_max_pd(stack[top - 1].v, zero); break;
            case OpCode::abs: stack[top - 1].v = _mm256_andnot_pd(sign, stack[top - 1].v); break;
            case OpCode::add: --top; stack[top - 1].v = _mm256_add_pd(stack[top - 1].v, stack[top].v); break;
            case OpCode::sub: --top; stack[top - 1].v = _mm256_sub_pd(stack[top - 1].v, stack[top].v); break;
            case OpCode::mul: --top; stack[top - 1].v = _mm256_mul_pd(stack[top - 1].v, stack[top].v); break;
            case OpCode::min: --top; stack[top - 1].v = _mm256_min_pd(stack[top - 1].v, stack[top].v); break;
            case OpCode::max: --top; stack[top - 1].v = _mm256_max_pd(stack[top - 1].v, stack[top].v); break;
            }
        }
        _mm256_storeu_pd(out + i, stack[0].v);
    }
    if (i < n) {
        // The scalar table finishes the tail with identical semantics.
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
    __m256d lo = _mm256_loadu_pd(v);
    __m256d hi = lo;
    std::size_t i = kLanes;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d x = _mm256_loadu_pd(v + i);
        lo = _mm256_min_pd(lo, x);
        hi = _mm256_max_pd(hi, x);
    }
    alignas(32) double l[kLanes];
    alignas(32) double h[kLanes];
    _mm256_store_pd(l, lo);
    _mm256_store_pd(h, hi);
    MinMax m{l[0], h[0]};
    for (std::size_t k = 1; k < kLanes; ++k) {
        m.min = select_min(m.min, l[k]);
        m.max = select_max(m.max, h[k]);
    }
    for (; i < n; ++i) {
        m.min = select_min(m.min, v[i]);
        m.max = select_max(m.max, v[i]);
    }
    return m;
}

} // namespace

namespace detail {
const KernelTable avx2_table{Isa::avx2, affine, affine_interval, relu_array, eval_program, min_max};
} // namespace detail

} // namespace icnet::simd
