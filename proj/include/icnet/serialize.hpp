// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
/*******************************************************************************
 *
 * Network documents. A network is stored as one JSON object:
 *
 *   {
 *     "format": "icnet-network",
 *     "version": 1,
 *     "input_dim": 1,
 *     "output_dim": 1,
 *     "output": 5,
 *     "order": [0, 1, 2, 3, 4, 5],
 *     "metadata": { "key": "value", ... },
 *     "nodes": [
 *       { "id": 0, "kind": "input", "index": 0 },
 *       { "id": 1, "kind": "affine", "preds": [0], "rows": 2, "cols": 1,
 *         "weights": ["0x1p-1", "0x1p-1"], "bias": ["0x0p+0", "0x0p+0"] },
 *       { "id": 2, "kind": "relu", "preds": [1] },
 *       { "id": 3, "kind": "sum", "preds": [2, 2] },
 *       { "id": 4, "kind": "concat", "preds": [3, 0] },
 *       ...
 *     ]
 *   }
 *
 * Weights are row-major. Reals are written as C99 hex-float strings, which
 * round-trip bit-exactly; readers also accept decimal strings and plain JSON
 * numbers. "order" lists every node id once, predecessors first, and fixes
 * the evaluation order. Node ids need not be contiguous.
 *
 ******************************************************************************/
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "icnet/network.hpp"

namespace icnet {

inline constexpr std::string_view kNetworkFormat = "icnet-network";
inline constexpr int kNetworkVersion = 1;

std::string serialize(const Network& net);

/// Throws SchemaError (malformed or missing fields, unknown ids, "no output
/// node"), CycleError ("cycle") or ArityError, carrying the node id.
Network deserialize(std::string_view document);

void save_network(const Network& net, const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path);

/// Bit-exact text form of a double ("%a").
std::string hex_real(double v);

/// Parses a decimal or hex-float literal; throws SchemaError on trailing
/// garbage or non-finite values.
double parse_real(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace icnet
