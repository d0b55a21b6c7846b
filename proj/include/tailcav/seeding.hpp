// Copyright 2026 The tailcav Authors
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

#ifndef TAILCAV_SEEDING_HPP_
#define TAILCAV_SEEDING_HPP_

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

#include "tailcav/game_core.hpp"

namespace tailcav {

// BLAKE2b of (seed, index, tag), truncated to 64 bits. Independent of call
// order, so sub-seeds do not depend on how work is scheduled.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index,
                         std::string_view tag);

// BLAKE2b of (seed, index, every pair of h).
std::uint64_t HistorySeed(std::uint64_t seed, const PublicHistory& h,
                          std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Index drawn from a probability vector. Point masses consume no draw.
  int Sample(const Eigen::VectorXd& dist);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tailcav

#endif  // TAILCAV_SEEDING_HPP_
