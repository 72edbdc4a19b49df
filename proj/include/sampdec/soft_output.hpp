// Copyright 2026 The sampdec Authors
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

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "sampdec/decoders.hpp"
#include "sampdec/types.hpp"

namespace sampdec {

// Bit labeling of one real dimension (Q-PAM). A Q^2-QAM symbol is two
// independent Q-PAM coordinates of the real embedding.
//
// LLR vectors and bit streams are indexed coordinate-major over the real
// vector: bit b (0 = most significant) of coordinate k has index
// k * bits_per_level + b.
struct BitLabeling {
  int levels = 2;
  int bits_per_level = 1;
  std::vector<unsigned> patterns;  // level -> bit pattern
  // subsets[b][v]: levels whose bit b equals v.
  std::vector<std::array<std::vector<int>, 2>> subsets;

  // Builds a labeling from an arbitrary level -> pattern table. Throws
  // ConfigError unless the table is a bijection onto all bit patterns.
  static BitLabeling from_patterns(std::vector<unsigned> patterns);

  int bit(int level, int b) const {
    return static_cast<int>(
        (patterns[static_cast<size_t>(level)] >> (bits_per_level - 1 - b)) & 1u);
  }
  // Level carrying the given pattern.
  int level_of(unsigned pattern) const;
  // Total number of bits for a real vector of `dim` coordinates.
  int total_bits(int dim) const { return dim * bits_per_level; }
};

// Reflected-binary Gray labeling, level l -> l ^ (l >> 1).
BitLabeling gray_label(int q_levels);

constexpr double kDefaultLlrClamp = 50.0;

struct LlrVector {
  std::vector<double> values;
  std::vector<bool> clamped;  // a hypothesis set was empty

  size_t size() const { return values.size(); }
};

// Candidate-list LLRs with metric -||y - H z||^2 / (2 sigma^2). Distances are
// recomputed from (h, y); the list's own distances are ignored. Every z must
// lie in [0, levels)^n.
LlrVector list_llr(const CandidateList& candidates, const RealMatrix& h,
                   const RealVector& y, double sigma,
                   const BitLabeling& labeling,
                   double clamp = kDefaultLlrClamp);

// Same with a priori L-values (log P(b=1)/P(b=0)) for every bit.
LlrVector list_llr_with_prior(const CandidateList& candidates,
                              const RealMatrix& h, const RealVector& y,
                              double sigma, const BitLabeling& labeling,
                              std::span<const double> prior,
                              double clamp = kDefaultLlrClamp);

// |C1| and |C2|: list members inside and outside the given radius.
struct ListSplit {
  int inside = 0;
  int outside = 0;
};
ListSplit split_by_radius(const CandidateList& candidates, const RealMatrix& h,
                          const RealVector& y, double radius);

}  // namespace sampdec
