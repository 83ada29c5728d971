/*
 * Copyright 2026 The otafl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Server-side gradient transforms.
//
// Median anchored clipping (MAC) treats the scalar median of a gradient's
// entries as a datum point: every entry is centred on it, its deviation is
// clipped to [-C, C], and the median is added back. Because the median is
// insensitive to a few impulsive entries, the anchor survives heavy-tailed
// channel noise that would dominate a mean or a norm.
//
// Gradient norm clipping (GNC) is the classical baseline: g * min(1, C/|g|).
//
// Both are applied per parameter block (layer-wise) with one shared C.

#ifndef OTAFL_CLIPPING_HPP_
#define OTAFL_CLIPPING_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "otafl/types.hpp"

namespace otafl {

struct ClipMethod {
  enum class Kind { kMac, kGnc, kNone };

  Kind kind = Kind::kNone;
  double threshold = 0.0;  // C; ignored for kNone

  static ClipMethod mac(double c) { return {Kind::kMac, c}; }
  static ClipMethod gnc(double c) { return {Kind::kGnc, c}; }
  static ClipMethod none() { return {Kind::kNone, 0.0}; }

  /// Throws DomainError if a threshold is required and not > 0.
  void validate() const;
  std::string to_string() const;
};

/// Median of the entries. Even length: mean of the two middle order
/// statistics. Uses selection, not a full sort. Throws StructureError on an
/// empty vector and DomainError on non-finite entries.
double vector_median(std::span<const double> v);

/// Centralise on med(g), clip each deviation to C, recover. Entries whose
/// deviation is at most C are returned bit-for-bit unchanged; the others
/// become med(g) +/- C. The median is computed once, before clipping.
ParamVector mac_clip(std::span<const double> g, double threshold);

/// g * min(1, C / |g|_2). The zero vector is returned unchanged.
ParamVector gnc_clip(std::span<const double> g, double threshold);

BlockedGradient apply_blockwise(const BlockedGradient& g, const ClipMethod& method);

/// Same as apply_blockwise, also reporting per block the fraction of entries
/// the transform changed (MAC: clipped entries / block size; GNC: 1 when the
/// block was rescaled, else 0; None: 0).
BlockedGradient apply_blockwise(const BlockedGradient& g, const ClipMethod& method,
                                std::vector<double>& clipped_fraction);

struct ClipStatistics {
  std::size_t clipped_count = 0;
  double unclipped_fraction = 1.0;
};

/// Counts entries with |g_i - med(g)| > C.
ClipStatistics clip_statistics(std::span<const double> g_before, double threshold);

}  // namespace otafl

#endif  // OTAFL_CLIPPING_HPP_
