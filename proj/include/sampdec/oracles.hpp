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

#include "sampdec/decoders.hpp"
#include "sampdec/discrete_gaussian.hpp"
#include "sampdec/lattice.hpp"
#include "sampdec/soft_output.hpp"
#include "sampdec/types.hpp"

namespace sampdec {

// Exhaustive LLR oracles refuse boxes with more points than this.
constexpr double kExhaustiveGuard = 1 << 20;

// Exact ML point over the box: Schnorr-Euchner enumeration with a shrinking
// radius. Equal distances resolve to the lexicographically smallest vector.
// Candidate::dist is ||y - H z||.
Candidate ml_sphere_decode(const RealMatrix& h, const RealVector& y,
                           const ConstellationBox& box);

// All box points with ||y - H x|| <= radius, sorted by (dist, z). Throws
// NumericalError once more than `max_points` points qualify.
std::vector<Candidate> enumerate_radius(const RealMatrix& h,
                                        const RealVector& y, double radius,
                                        const ConstellationBox& box,
                                        size_t max_points = size_t{1} << 22);

// Full-sum MAP L-values over the box (default: every labeled level in every
// coordinate), evaluated in the log domain.
LlrVector exact_map_llr(const RealMatrix& h, const RealVector& y, double sigma,
                        const BitLabeling& labeling,
                        const std::optional<ConstellationBox>& box = std::nullopt,
                        double clamp = kDefaultLlrClamp);

// Max-log L-values: (min_{b=0} d^2 - min_{b=1} d^2) / (2 sigma^2).
LlrVector maxlog_llr(const RealMatrix& h, const RealVector& y, double sigma,
                     const BitLabeling& labeling,
                     const std::optional<ConstellationBox>& box = std::nullopt,
                     double clamp = kDefaultLlrClamp);

// Probability that one sampling pass emits z: the product over levels of the
// conditional discrete Gaussian probabilities. Zero when some entry leaves
// its level's 2N-set.
double exact_sampling_probability(const QRFactors& qr,
                                  const RealVector& y_prime, const IntVector& z,
                                  const SamplerParams& params);

}  // namespace sampdec
