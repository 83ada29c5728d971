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

#include "otafl/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "otafl/errors.hpp"

namespace otafl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) ^ (tag * 0xd6e8feb86659fd93ULL));
}

std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
  return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t a,
                          std::uint64_t b) {
  return derive_seed(derive_seed(derive_seed(seed, stream), a + 1), b + 1);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw StructureError("dot: size mismatch " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm_sq(std::span<const double> v) { return dot(v, v); }

double norm2(std::span<const double> v) { return std::sqrt(norm_sq(v)); }

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw StructureError("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

std::size_t layout_size(const BlockLayout& layout) {
  return std::accumulate(layout.begin(), layout.end(), std::size_t{0});
}

BlockedGradient split_blocks(std::span<const double> v, const BlockLayout& layout) {
  if (layout_size(layout) != v.size()) {
    throw StructureError("block layout covers " + std::to_string(layout_size(layout)) +
                         " entries but vector has " + std::to_string(v.size()));
  }
  BlockedGradient out;
  out.blocks.reserve(layout.size());
  std::size_t offset = 0;
  for (std::size_t len : layout) {
    out.blocks.emplace_back(v.begin() + static_cast<std::ptrdiff_t>(offset),
                            v.begin() + static_cast<std::ptrdiff_t>(offset + len));
    offset += len;
  }
  return out;
}

ParamVector join_blocks(const BlockedGradient& g) {
  ParamVector out;
  for (const auto& b : g.blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace otafl
