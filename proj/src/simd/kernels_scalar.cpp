// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include <vector>

#include "icnet/simd/kernels.hpp"
#include "icnet/simd/scalar_ops.hpp"

namespace icnet::simd {
namespace {

void affine(const AffineView& a, const double* x, double* y) {
    for (std::size_t r = 0; r < a.rows; ++r) {
        y[r] = a.bias[r];
    }
    for (std::size_t c = 0; c < a.cols; ++c) {
        const double* w = a.weights + c * a.rows;
        const double xc = x[c];
        for (std::size_t r = 0; r < a.rows; ++r) {
            y[r] += w[r] * xc;
        }
    }
}

void affine_interval(const AffineView& a, const double* xlo, const double* xhi, double* ylo, double* yhi) {
    for (std::size_t r = 0; r < a.rows; ++r) {
        ylo[r] = a.bias[r];
        yhi[r] = a.bias[r];
    }
    for (std::size_t c = 0; c < a.cols; ++c) {
        const double* w = a.weights + c * a.rows;
        const double l = xlo[c];
        const double h = xhi[c];
        for (std::size_t r = 0; r < a.rows; ++r) {
            const double wr = w[r];
            if (wr >= 0.0) {
                ylo[r] += wr * l;
                yhi[r] += wr * h;
            } else {
                ylo[r] += wr * h;
                yhi[r] += wr * l;
            }
        }
    }
}

void relu_array(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = relu(x[i]);
    }
}

void eval_program(const ProgramView& p, const double* const* vars, std::size_t n, double* out) {
    std::vector<double> stack(p.max_stack);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t top = 0;
        for (std::size_t k = 0; k < p.size; ++k) {
            const Op& op = p.ops[k];
            switch (op.code) {
            case OpCode::constant: stack[top++] = op.value; break;
            case OpCode::variable: stack[top++] = vars[op.index][i]; break;
            case OpCode::neg: stack[top - 1] = -stack[top - 1]; break;
            case OpCode::relu: stack[top - 1] = relu(stack[top - 1]); break;
            case OpCode::abs: stack[top - 1] = abs_value(stack[top - 1]); break;
            case OpCode::add: --top; stack[top - 1] = stack[top - 1] + stack[top]; break;
            case OpCode::sub: --top; stack[top - 1] = stack[top - 1] - stack[top]; break;
            case OpCode::mul: --top; stack[top - 1] = stack[top - 1] * stack[top]; break;
            case OpCode::min: --top; stack[top - 1] = select_min(stack[top - 1], stack[top]); break;
            case OpCode::max: --top; stack[top - 1] = select_max(stack[top - 1], stack[top]); break;
            }
        }
        out[i] = stack[0];
    }
}

MinMax min_max(const double* v, std::size_t n) {
    MinMax m{v[0], v[0]};
    for (std::size_t i = 1; i < n; ++i) {
        m.min = select_min(m.min, v[i]);
        m.max = select_max(m.max, v[i]);
    }
    return m;
}

} // namespace

namespace detail {
const KernelTable scalar_table{Isa::scalar, affine, affine_interval, relu_array, eval_program, min_max};
} // namespace detail

} // namespace icnet::simd
