// Copyright 2026 The gmmclass Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gmmclass/rng.hpp"

#include <set>

#include <gtest/gtest.h>

namespace gmmclass {
namespace {

// Known-answer vectors for Philox4x32-10.
TEST(PhiloxTest, KnownAnswerZero) {
  const auto out = detail::philox4x32_10({0u, 0u, 0u, 0u}, {0u, 0u});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(PhiloxTest, KnownAnswerOnes) {
  const auto out = detail::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(PhiloxTest, KnownAnswerPi) {
  const auto out = detail::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(PhiloxTest, StreamsAreReproducibleAndDistinct) {
  Philox a = make_stream(7, StreamTag::kDataset, 1, 2);
  Philox b = make_stream(7, StreamTag::kDataset, 1, 2);
  Philox c = make_stream(7, StreamTag::kDataset, 2, 1);
  Philox d = make_stream(7, StreamTag::kTheta, 1, 2);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    EXPECT_EQ(va, b());
    firsts.insert(va);
    firsts.insert(c());
    firsts.insert(d());
  }
  EXPECT_EQ(firsts.size(), 300u);
}

TEST(PhiloxTest, UniformIsOpenInterval) {
  Philox g(0);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) {
    const double u = g.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / m, 0.5, 0.005);
}

}  // namespace
}  // namespace gmmclass
