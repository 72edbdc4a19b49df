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

#include "sampdec/discrete_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sampdec {

SamplerParams SamplerParams::from_rho(double rho, double min_rii,
                                      int truncation_n, double nominal_k) {
  if (!(rho > 1.0)) throw ConfigError("sampler params: rho must be > 1");
  if (!(min_rii > 0.0)) throw ConfigError("sampler params: min r_ii must be > 0");
  SamplerParams p;
  p.rho = rho;
  p.a_param = std::log(rho) / (min_rii * min_rii);
  p.truncation_n = truncation_n;
  p.nominal_k = nominal_k;
  p.validate();
  return p;
}

void SamplerParams::validate() const {
  if (!(a_param > 0.0) || !std::isfinite(a_param)) {
    throw ConfigError("sampler params: A must be finite and > 0");
  }
  if (truncation_n < 1) throw ConfigError("sampler params: N must be >= 1");
  if (!(rho > 1.0)) throw ConfigError("sampler params: rho must be > 1");
  if (!(nominal_k >= 1.0)) throw ConfigError("sampler params: K must be >= 1");
}

size_t ProbTable::nearest_index() const {
  const int nearest = round_nearest(center);
  return static_cast<size_t>(nearest - candidates.front());
}

ProbTable candidate_probabilities(double x_tilde, double c_i, int n_trunc) {
  if (!(c_i > 0.0)) {
    throw ConfigError("candidate_probabilities: c_i must be > 0, got " +
                      std::to_string(c_i));
  }
  if (n_trunc < 1) throw ConfigError("candidate_probabilities: N must be >= 1");
  if (!std::isfinite(x_tilde)) {
    throw NumericalError("candidate_probabilities: non-finite center");
  }

  const int base = static_cast<int>(std::floor(x_tilde));
  const size_t count = 2 * static_cast<size_t>(n_trunc);
  ProbTable t;
  t.center = x_tilde;
  t.candidates.resize(count);
  t.log_probs.resize(count);
  t.probs.resize(count);

  double max_exponent = -INFINITY;
  for (size_t j = 0; j < count; ++j) {
    const int v = base - n_trunc + 1 + static_cast<int>(j);
    const double d = x_tilde - v;
    t.candidates[j] = v;
    t.log_probs[j] = -c_i * d * d;
    max_exponent = std::max(max_exponent, t.log_probs[j]);
  }
  double s = 0.0;
  for (size_t j = 0; j < count; ++j) {
    t.probs[j] = std::exp(t.log_probs[j] - max_exponent);
    s += t.probs[j];
  }
  const double log_s = std::log(s);
  for (size_t j = 0; j < count; ++j) {
    t.probs[j] /= s;
    t.log_probs[j] -= max_exponent + log_s;
  }
  return t;
}

int random_round(const ProbTable& table, Rng& rng) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (size_t j = 0; j < table.probs.size(); ++j) {
    cumulative += table.probs[j];
    if (u < cumulative) return table.candidates[j];
  }
  // u landed in the rounding gap above the last partial sum.
  for (size_t j = table.probs.size(); j-- > 0;) {
    if (table.probs[j] > 0.0) return table.candidates[j];
  }
  return table.candidates.back();
}

}  // namespace sampdec
