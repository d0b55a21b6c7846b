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

#include "tailcav/seeding.hpp"

#include <sodium.h>

#include <array>
#include <cstring>
#include <vector>

namespace tailcav {
namespace {

void AppendU64(std::vector<unsigned char>& bytes, std::uint64_t x) {
  for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<unsigned char>(x >> (8 * b)));
}

std::uint64_t Digest(const std::vector<unsigned char>& bytes) {
  std::array<unsigned char, 8> out{};
  crypto_generichash(out.data(), out.size(), bytes.data(), bytes.size(),
                     nullptr, 0);
  std::uint64_t x = 0;
  for (int b = 0; b < 8; ++b) x |= static_cast<std::uint64_t>(out[b]) << (8 * b);
  return x;
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index,
                         std::string_view tag) {
  std::vector<unsigned char> bytes;
  bytes.reserve(16 + tag.size());
  AppendU64(bytes, seed);
  AppendU64(bytes, index);
  bytes.insert(bytes.end(), tag.begin(), tag.end());
  return Digest(bytes);
}

std::uint64_t HistorySeed(std::uint64_t seed, const PublicHistory& h,
                          std::uint64_t index) {
  std::vector<unsigned char> bytes;
  bytes.reserve(16 + 8 * h.size());
  AppendU64(bytes, seed);
  AppendU64(bytes, index);
  for (const auto& [i, j] : h) {
    AppendU64(bytes, (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
                         static_cast<std::uint32_t>(j));
  }
  return Digest(bytes);
}

int Rng::Sample(const Eigen::VectorXd& dist) {
  const Eigen::Index n = dist.size();
  for (Eigen::Index a = 0; a < n; ++a) {
    if (dist[a] == 1.0) return static_cast<int>(a);
  }
  const double u = Uniform();
  double acc = 0.0;
  Eigen::Index last = 0;
  for (Eigen::Index a = 0; a < n; ++a) {
    if (dist[a] <= 0.0) continue;
    acc += dist[a];
    last = a;
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(last);
}

}  // namespace tailcav
