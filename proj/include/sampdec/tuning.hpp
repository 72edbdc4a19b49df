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
#include <optional>
#include <string>

#include "sampdec/discrete_gaussian.hpp"
#include "sampdec/lattice.hpp"

namespace sampdec {

// Optimal rho for derandomized sampling: the root rho > 1 of
// K = 1/2 (e rho)^(2n/rho). Valid for 1/2 < k < e^(2n)/2.
double solve_rho_opt(double k, int n);

// Randomized-sampling rho: the root rho > 1 of K = (e rho)^(2n/rho).
double randomized_rho(double k, int n);

// A = ln(rho) / min_rii^2.
double compute_a(double rho, double min_rii);

// Bounded-distance decoding radius sqrt(2n / rho_o) * min_rii.
double decoding_radius(double k, int n, double min_rii);

// Smallest p with (p + 1)^2 >= n.
int fsd_depth(int n);

constexpr std::uint64_t kDefaultKCap = std::uint64_t{1} << 32;

// Smallest integer K with prod_{i=1..p} (1 - 2^(i-2) / K) >= eta.
std::uint64_t min_k_for_eta(double eta, int p,
                            std::uint64_t cap = kDefaultKCap);

// List sphere decoding radius bound sqrt(n) * sigma.
double lsd_radius(int n, double sigma);

// Upper bound on the sample size for near-MAP soft output:
// 1/2 (2e min_rii^2 / sigma^2)^(n sigma^2 / min_rii^2).
double near_map_sample_size(int n, double sigma, double min_rii);

// The rho bound neglects an O(rho^-3) term; below this rho it is loose.
constexpr double kRhoWarningThreshold = 3.0;
std::optional<std::string> rho_warning(double rho);

// Sampler parameters for a factorized system. Without an explicit rho,
// rho = solve_rho_opt(k, dim); when k is beyond the solvable range
// (k >= e^(2n)/2) rho falls back to 1 + 1e-9, the uniform limit.
SamplerParams auto_sampler_params(const QRFactors& qr, double k, int n_trunc,
                                  std::optional<double> rho = std::nullopt);

}  // namespace sampdec
