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

#include "sampdec/soft_output.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "llr_accumulator.hpp"

namespace sampdec {

namespace {

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

void check_llr_inputs(const CandidateList& candidates, const RealMatrix& h,
                      const RealVector& y, double sigma) {
  if (candidates.empty()) throw ConfigError("list_llr: candidate list is empty");
  if (!(sigma > 0.0)) throw ConfigError("list_llr: sigma must be > 0");
  if (y.size() != h.rows()) throw ConfigError("list_llr: y does not match h");
  if (!(h.cols() >= 1)) throw ConfigError("list_llr: h has no columns");
}

}  // namespace

BitLabeling BitLabeling::from_patterns(std::vector<unsigned> patterns) {
  const size_t q = patterns.size();
  int bits = 0;
  while ((size_t{1} << bits) < q) ++bits;
  if (q < 2 || (size_t{1} << bits) != q) {
    throw ConfigError("bit labeling: level count must be a power of two >= 2");
  }
  std::vector<bool> seen(q, false);
  for (unsigned p : patterns) {
    if (p >= q || seen[p]) {
      throw ConfigError("bit labeling: patterns must be a bijection");
    }
    seen[p] = true;
  }
  BitLabeling lab;
  lab.levels = static_cast<int>(q);
  lab.bits_per_level = bits;
  lab.patterns = std::move(patterns);
  lab.subsets.resize(static_cast<size_t>(bits));
  for (int level = 0; level < lab.levels; ++level) {
    for (int b = 0; b < bits; ++b) {
      lab.subsets[static_cast<size_t>(b)][static_cast<size_t>(lab.bit(level, b))]
          .push_back(level);
    }
  }
  return lab;
}

int BitLabeling::level_of(unsigned pattern) const {
  const auto it = std::find(patterns.begin(), patterns.end(), pattern);
  if (it == patterns.end()) throw ConfigError("bit labeling: unknown pattern");
  return static_cast<int>(it - patterns.begin());
}

BitLabeling gray_label(int q_levels) {
  if (q_levels < 2 || (q_levels & (q_levels - 1)) != 0) {
    throw ConfigError("gray_label: level count must be a power of two >= 2, got " +
                      std::to_string(q_levels));
  }
  std::vector<unsigned> patterns(static_cast<size_t>(q_levels));
  for (unsigned l = 0; l < patterns.size(); ++l) patterns[l] = l ^ (l >> 1);
  return BitLabeling::from_patterns(std::move(patterns));
}

LlrVector list_llr(const CandidateList& candidates, const RealMatrix& h,
                   const RealVector& y, double sigma,
                   const BitLabeling& labeling, double clamp) {
  check_llr_inputs(candidates, h, y, sigma);
  const int dim = static_cast<int>(h.cols());
  internal::BitAccumulator acc(labeling, dim);
  const double scale = 1.0 / (2.0 * sigma * sigma);
  for (const Candidate& c : candidates.items) {
    acc.check_point(c.z);
    const double metric = -(y - h * to_real(c.z)).squaredNorm() * scale;
    acc.add(c.z, [metric](size_t, int) { return metric; });
  }
  return acc.finish(false, clamp);
}

LlrVector list_llr_with_prior(const CandidateList& candidates,
                              const RealMatrix& h, const RealVector& y,
                              double sigma, const BitLabeling& labeling,
                              std::span<const double> prior, double clamp) {
  check_llr_inputs(candidates, h, y, sigma);
  const int dim = static_cast<int>(h.cols());
  const size_t bits = static_cast<size_t>(labeling.total_bits(dim));
  if (prior.size() != bits) {
    throw ConfigError("list_llr_with_prior: prior has " +
                      std::to_string(prior.size()) + " entries, expected " +
                      std::to_string(bits));
  }
  std::vector<double> norm(bits);
  for (size_t b = 0; b < bits; ++b) norm[b] = softplus(prior[b]);

  internal::BitAccumulator acc(labeling, dim);
  const double scale = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> own(bits);
  for (const Candidate& c : candidates.items) {
    acc.check_point(c.z);
    const double metric = -(y - h * to_real(c.z)).squaredNorm() * scale;
    // log prior weight of z over all bits, then each bit excludes its own term.
    double total = 0.0;
    for (size_t b = 0; b < bits; ++b) {
      own[b] = acc.bit_of(c.z, b) * prior[b] - norm[b];
      total += own[b];
    }
    acc.add(c.z, [&](size_t b, int) { return metric + total - own[b]; });
  }
  std::vector<double> offset(prior.begin(), prior.end());
  return acc.finish(false, clamp, &offset);
}

ListSplit split_by_radius(const CandidateList& candidates, const RealMatrix& h,
                          const RealVector& y, double radius) {
  ListSplit split;
  for (const Candidate& c : candidates.items) {
    const double d = (y - h * to_real(c.z)).norm();
    if (d <= radius) {
      ++split.inside;
    } else {
      ++split.outside;
    }
  }
  return split;
}

}  // namespace sampdec
