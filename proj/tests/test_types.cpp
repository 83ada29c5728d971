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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "otafl/errors.hpp"
#include "otafl/types.hpp"

using namespace otafl;

TEST_CASE("vector helpers") {
  const ParamVector a{3, 4}, b{1, -2};
  CHECK(dot(a, b) == -5.0);
  CHECK(norm_sq(a) == 25.0);
  CHECK(norm2(a) == 5.0);
  CHECK(norm_inf(b) == 2.0);
  CHECK(all_finite(a));
  CHECK_FALSE(all_finite(ParamVector{1, std::numeric_limits<double>::infinity()}));
  CHECK_FALSE(all_finite(ParamVector{std::nan("")}));
  ParamVector y{1, 1};
  axpy(2.0, a, y);
  CHECK(y == ParamVector{7, 9});
}

TEST_CASE("block layout round trip") {
  const BlockLayout layout{2, 3, 1};
  CHECK(layout_size(layout) == 6);
  const ParamVector v{1, 2, 3, 4, 5, 6};
  const BlockedGradient g = split_blocks(v, layout);
  REQUIRE(g.blocks.size() == 3);
  CHECK(g.blocks[0] == ParamVector{1, 2});
  CHECK(g.blocks[1] == ParamVector{3, 4, 5});
  CHECK(g.blocks[2] == ParamVector{6});
  CHECK(join_blocks(g) == v);
  CHECK_THROWS_AS(split_blocks(ParamVector{1, 2}, layout), StructureError);
}

TEST_CASE("derived seeds separate streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s) {
    for (auto st : {Stream::kChannel, Stream::kBatch, Stream::kInit, Stream::kData,
                    Stream::kPartition, Stream::kSplit, Stream::kProbe}) {
      seen.insert(derive_seed(s, st));
      for (std::uint64_t a = 0; a < 5; ++a) {
        for (std::uint64_t b = 0; b < 5; ++b) seen.insert(derive_seed(s, st, a, b));
      }
    }
  }
  CHECK(seen.size() == 4 * 7 * 26);
  CHECK(derive_seed(9, Stream::kBatch, 3, 4) == derive_seed(9, Stream::kBatch, 3, 4));
}
