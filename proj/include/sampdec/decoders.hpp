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

#include <optional>
#include <vector>

#include "sampdec/discrete_gaussian.hpp"
#include "sampdec/lattice.hpp"
#include "sampdec/types.hpp"

namespace sampdec {

struct Candidate {
  IntVector z;
  double dist = 0.0;      // ||y' - R z||
  double log_prob = 0.0;  // ln P(z) under the sampler, 0 for SIC
  IntVector raw_z;        // before clamping to the constellation box
  int draws = 0;          // randomized decoder multiplicity
};

// Orders by distance, then lexicographically by z.
bool closer(const Candidate& a, const Candidate& b);

// Coarse operation counters.
struct DecodeStats {
  long table_evals = 0;
  long node_visits = 0;
  double pruned_mass = 0.0;
};

// Duplicate-free list, sorted so that items.front() is the best candidate.
struct CandidateList {
  std::vector<Candidate> items;
  double total_prob = 0.0;
  DecodeStats stats;

  bool empty() const { return items.empty(); }
  size_t size() const { return items.size(); }
  const Candidate& best() const;
  bool contains(const IntVector& z) const;
};

enum class DerandMode {
  kLiteral,  // E = round(K_{i+1} P), E == 1 completes by SIC
  kStrict,   // follow every branch with K_{i+1} P >= 1/2, no shortcut
};

struct DerandConfig {
  double nominal_k = 1.0;
  DerandMode mode = DerandMode::kLiteral;
  SamplerParams sampler;
  std::optional<ConstellationBox> box;

  void validate(int dim) const;
};

Candidate sic_decode(const QRFactors& qr, const RealVector& y_prime);

// Klein sampling: k independent root-to-leaf draws. Repeated draws are
// collapsed; Candidate::draws carries the multiplicity.
CandidateList randomized_decode(
    const QRFactors& qr, const RealVector& y_prime, int k,
    const SamplerParams& params, Rng& rng,
    const std::optional<ConstellationBox>& box = std::nullopt);

// Deterministic budget-splitting tree search. In both modes the branch equal
// to round(x~_i) is never pruned, so the SIC point is always in the list and
// K = 1 in literal mode reproduces SIC.
CandidateList derandomized_decode(const QRFactors& qr,
                                  const RealVector& y_prime,
                                  const DerandConfig& cfg);

// Column permutation perm (perm[pos] = original column) such that the last p
// positions, detected first, hold the columns with the largest
// post-processing noise amplification (chosen greedily), and the rest follow
// V-BLAST minimum-amplification order. Ties keep the identity order.
std::vector<int> fsd_order(const RealMatrix& h, int p);

// Derandomized sampling on the p first-detected levels of the FSD-ordered
// system, SIC below. sampler.a_param is recomputed from sampler.rho and the
// ordered system's smallest r_ii. Returned vectors are in the original column
// order.
CandidateList two_stage_decode(const RealMatrix& h, const RealVector& y, int p,
                               const DerandConfig& cfg);

}  // namespace sampdec
