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

#include "otafl/clipping.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "otafl/errors.hpp"

namespace otafl {

namespace {

void require_threshold(double threshold, const char* who) {
  if (!(threshold > 0.0)) {
    std::ostringstream os;
    os << who << ": clipping threshold must be > 0, got " << threshold;
    throw DomainError(os.str());
  }
}

// Euclidean norm without overflow for the very large entries heavy-tailed
// noise produces.
double scaled_norm(std::span<const double> v) {
  const double s = norm_inf(v);
  if (s == 0.0 || !std::isfinite(s)) return s;
  double acc = 0.0;
  for (double x : v) {
    const double r = x / s;
    acc += r * r;
  }
  return s * std::sqrt(acc);
}

}  // namespace

void ClipMethod::validate() const {
  if (kind == Kind::kNone) return;
  require_threshold(threshold, kind == Kind::kMac ? "MAC" : "GNC");
}

std::string ClipMethod::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kMac: os << "mac(C=" << threshold << ")"; break;
    case Kind::kGnc: os << "gnc(C=" << threshold << ")"; break;
    case Kind::kNone: os << "none"; break;
  }
  return os.str();
}

double vector_median(std::span<const double> v) {
  if (v.empty()) throw StructureError("vector_median: empty vector");
  if (!all_finite(v)) throw DomainError("vector_median: non-finite entry");
  std::vector<double> work(v.begin(), v.end());
  const std::size_t mid = work.size() / 2;
  auto mid_it = work.begin() + static_cast<std::ptrdiff_t>(mid);
  std::nth_element(work.begin(), mid_it, work.end());
  const double upper = *mid_it;
  if (work.size() % 2 == 1) return upper;
  // Lower middle is the largest element of the left partition.
  const double lower = *std::max_element(work.begin(), mid_it);
  return 0.5 * lower + 0.5 * upper;
}

ParamVector mac_clip(std::span<const double> g, double threshold) {
  require_threshold(threshold, "mac_clip");
  const double m = vector_median(g);
  ParamVector out(g.begin(), g.end());
  for (double& x : out) {
    const double centred = x - m;
    if (std::abs(centred) > threshold) x = m + std::copysign(threshold, centred);
  }
  return out;
}

ParamVector gnc_clip(std::span<const double> g, double threshold) {
  require_threshold(threshold, "gnc_clip");
  ParamVector out(g.begin(), g.end());
  const double norm = scaled_norm(g);
  if (norm > threshold) {
    const double scale = threshold / norm;
    for (double& x : out) x *= scale;
  }
  return out;
}

BlockedGradient apply_blockwise(const BlockedGradient& g, const ClipMethod& method,
                                std::vector<double>& clipped_fraction) {
  method.validate();
  clipped_fraction.assign(g.blocks.size(), 0.0);
  BlockedGradient out;
  out.blocks.reserve(g.blocks.size());
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const ParamVector& block = g.blocks[b];
    switch (method.kind) {
      case ClipMethod::Kind::kNone:
        out.blocks.push_back(block);
        break;
      case ClipMethod::Kind::kMac: {
        const auto stats = clip_statistics(block, method.threshold);
        clipped_fraction[b] = 1.0 - stats.unclipped_fraction;
        out.blocks.push_back(mac_clip(block, method.threshold));
        break;
      }
      case ClipMethod::Kind::kGnc:
        clipped_fraction[b] = scaled_norm(block) > method.threshold ? 1.0 : 0.0;
        out.blocks.push_back(gnc_clip(block, method.threshold));
        break;
    }
  }
  return out;
}

BlockedGradient apply_blockwise(const BlockedGradient& g, const ClipMethod& method) {
  std::vector<double> unused;
  return apply_blockwise(g, method, unused);
}

ClipStatistics clip_statistics(std::span<const double> g_before, double threshold) {
  const double m = vector_median(g_before);
  ClipStatistics s;
  for (double x : g_before) {
    if (std::abs(x - m) > threshold) ++s.clipped_count;
  }
  s.unclipped_fraction =
      1.0 - static_cast<double>(s.clipped_count) / static_cast<double>(g_before.size());
  return s;
}

}  // namespace otafl
