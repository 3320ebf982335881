// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
/*******************************************************************************
 *
 * Data-parallel inner loops, in a scalar reference form and SIMD variants
 * (AVX2 on x86-64, NEON on AArch64). One variant is selected at runtime.
 *
 * Every variant must reproduce the scalar reference bit-for-bit: lanes run
 * across independent rows or sample points, never across a reduction, and
 * min/max/relu use compare-and-select semantics rather than IEEE minNum.
 *
 ******************************************************************************/
#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace icnet::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Weights are stored column-major (`weights[c * rows + r]`) so that a SIMD
/// lane owns one output row and accumulates its inputs in index order.
struct AffineView {
    std::size_t rows;
    std::size_t cols;
    const double* weights;
    const double* bias;
};

enum class OpCode : std::uint8_t { constant, variable, neg, add, sub, mul, min, max, relu, abs };

/// One instruction of a compiled expression (postfix order).
struct Op {
    OpCode code;
    std::uint32_t index = 0; // variable index
    double value = 0.0;      // constant value
};

struct ProgramView {
    const Op* ops;
    std::size_t size;
    std::size_t max_stack;
    std::size_t num_vars;
};

struct MinMax {
    double min;
    double max;
};

struct KernelTable {
    Isa isa;

    /// y[r] = bias[r] + sum_c w[r, c] * x[c], accumulated in c order.
    void (*affine)(const AffineView& a, const double* x, double* y);

    /// Interval image of the same row-wise accumulation.
    void (*affine_interval)(const AffineView& a, const double* xlo, const double* xhi, double* ylo, double* yhi);

    void (*relu)(const double* x, double* y, std::size_t n);

    /// Evaluates a compiled expression at n points; vars[k][i] is coordinate
    /// k of point i.
    void (*eval_program)(const ProgramView& p, const double* const* vars, std::size_t n, double* out);

    /// Smallest and largest value of a nonempty array. Equal as values to the
    /// scalar result; the sign of a zero extremum may differ.
    MinMax (*min_max)(const double* v, std::size_t n);
};

/// Variants compiled in and supported by the running CPU, scalar first.
std::vector<Isa> available_isas();

/// Kernel table for `isa`, or nullptr when it is not available.
const KernelTable* kernels_for(Isa isa);

/// The active table. Chosen on first use: the widest available variant,
/// unless the environment variable ICNET_SIMD names one (scalar/avx2/neon).
const KernelTable& active();

/// Overrides the active variant. Throws std::invalid_argument if unavailable.
void select(Isa isa);

namespace detail {
extern const KernelTable scalar_table;
#if defined(ICNET_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(ICNET_HAVE_NEON)
extern const KernelTable neon_table;
#endif
} // namespace detail

} // namespace icnet::simd
