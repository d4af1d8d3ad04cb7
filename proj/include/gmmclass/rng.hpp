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

#ifndef GMMCLASS_RNG_HPP_
#define GMMCLASS_RNG_HPP_

#include <array>
#include <cstdint>
#include <limits>

namespace gmmclass {

// Purpose tags for sub-stream derivation. Values are part of the
// reproducibility contract: never renumber.
enum class StreamTag : std::uint64_t {
  kDataset = 1,
  kTheta = 2,
  kCorruption = 3,
  kCorruptionSet = 4,
  kTestSample = 5,
  kGeneric = 6,
};

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

constexpr Block philox4x32_10(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
  }
  return ctr;
}

}  // namespace detail

// Philox4x32-10 (Salmon et al., SC'11) behind a UniformRandomBitGenerator
// interface. The output sequence is a pure function of (key, counter), so
// streams with distinct keys never overlap and can be consumed in any order.
class Philox {
 public:
  using result_type = std::uint64_t;

  explicit Philox(std::uint64_t key) : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (lane_ == 2) refill();
    const std::uint64_t lo = block_[2 * lane_];
    const std::uint64_t hi = block_[2 * lane_ + 1];
    ++lane_;
    return lo | (hi << 32);
  }

  // Uniform in (0, 1), never exactly 0 or 1.
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  // +1 or -1 with probability 1/2 each.
  int rademacher() { return ((*this)() >> 63) ? 1 : -1; }

 private:
  void refill() {
    block_ = detail::philox4x32_10({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u}, key_);
    ++counter_;
    lane_ = 0;
  }

  detail::Key key_;
  std::uint64_t counter_ = 0;
  detail::Block block_{};
  int lane_ = 2;
};

// Derives an independent stream from (master seed, purpose, replicate indices).
inline Philox make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = detail::splitmix64(seed);
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(tag));
  h = detail::splitmix64(h ^ a);
  h = detail::splitmix64(h ^ b);
  h = detail::splitmix64(h ^ c);
  return Philox(h);
}

}  // namespace gmmclass

#endif  // GMMCLASS_RNG_HPP_
