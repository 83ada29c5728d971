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

#ifndef OTAFL_TYPES_HPP_
#define OTAFL_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace otafl {

/// Flat model parameters or gradient. Every channel and clipping operation
/// acts on this representation.
using ParamVector = std::vector<double>;

/// Lengths of the contiguous parameter blocks (one per layer weight / bias).
using BlockLayout = std::vector<std::size_t>;

/// A gradient split along a BlockLayout.
struct BlockedGradient {
  std::vector<ParamVector> blocks;
};

using Rng = std::mt19937_64;

/// Independent random streams derived from one experiment seed. Changing
/// how one stream is consumed never perturbs the others.
enum class Stream : std::uint64_t {
  kChannel = 1,
  kBatch = 2,
  kInit = 3,
  kData = 4,
  kPartition = 5,
  kSplit = 6,
  kProbe = 7,
};

/// SplitMix64 finaliser over (seed, tag...). Used to derive sub-seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t seed, Stream stream);
std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t a,
                          std::uint64_t b = 0);

double dot(std::span<const double> a, std::span<const double> b);
double norm_sq(std::span<const double> v);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);
bool all_finite(std::span<const double> v);

/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

std::size_t layout_size(const BlockLayout& layout);

/// Throws StructureError if `v.size()` differs from the layout total.
BlockedGradient split_blocks(std::span<const double> v, const BlockLayout& layout);
ParamVector join_blocks(const BlockedGradient& g);

}  // namespace otafl

#endif  // OTAFL_TYPES_HPP_
