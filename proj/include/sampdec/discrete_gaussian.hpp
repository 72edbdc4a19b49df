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

#include <cstdint>
#include <random>
#include <vector>

#include "sampdec/types.hpp"

namespace sampdec {

// Controls of the per-level discrete Gaussian: c_i = a_param * r_ii^2.
struct SamplerParams {
  double a_param = 1.0;
  int truncation_n = 2;  // candidate set has 2N integers
  double rho = 2.0;
  double nominal_k = 1.0;

  // a_param = ln(rho) / min_rii^2.
  static SamplerParams from_rho(double rho, double min_rii, int truncation_n,
                                double nominal_k);
  void validate() const;
};

constexpr int kDefaultTruncation = 2;

// Discrete Gaussian over the 2N integers {floor(center)-N+1, ...,
// floor(center)+N}, normalized over that set.
struct ProbTable {
  double center = 0.0;
  std::vector<int> candidates;
  std::vector<double> probs;
  std::vector<double> log_probs;

  // Index of round(center) in `candidates`: the SIC choice.
  size_t nearest_index() const;
};

ProbTable candidate_probabilities(double x_tilde, double c_i, int n_trunc);

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one engine output.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Klein random rounding: one draw from the table.
int random_round(const ProbTable& table, Rng& rng);

}  // namespace sampdec
