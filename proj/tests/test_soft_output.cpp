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

#include <algorithm>
#include <bitset>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sampdec/decoders.hpp"
#include "sampdec/lattice.hpp"
#include "sampdec/oracles.hpp"
#include "sampdec/soft_output.hpp"
#include "sampdec/tuning.hpp"
#include "test_util.hpp"

namespace sampdec {
namespace {

using testing::all_points;
using testing::gaussian_matrix;
using testing::gaussian_vector;

CandidateList list_of(const std::vector<IntVector>& points) {
  CandidateList list;
  for (const IntVector& z : points) {
    Candidate c;
    c.z = z;
    c.raw_z = z;
    list.items.push_back(c);
  }
  return list;
}

int popcount(unsigned v) { return static_cast<int>(std::bitset<32>(v).count()); }

TEST(GrayLabel, SmallTables) {
  EXPECT_EQ(gray_label(2).patterns, (std::vector<unsigned>{0, 1}));
  EXPECT_EQ(gray_label(4).patterns, (std::vector<unsigned>{0b00, 0b01, 0b11, 0b10}));
  const BitLabeling lab = gray_label(4);
  EXPECT_EQ(lab.bit(2, 0), 1);
  EXPECT_EQ(lab.bit(3, 1), 0);
  EXPECT_EQ(lab.subsets[0][1], (std::vector<int>{2, 3}));
  EXPECT_EQ(lab.subsets[1][1], (std::vector<int>{1, 2}));
}

TEST(GrayLabel, AdjacentLevelsDifferInOneBit) {
  for (int q : {2, 4, 8, 16, 64}) {
    const BitLabeling lab = gray_label(q);
    std::vector<unsigned> sorted = lab.patterns;
    std::sort(sorted.begin(), sorted.end());
    for (unsigned v = 0; v < sorted.size(); ++v) EXPECT_EQ(sorted[v], v);
    for (int l = 0; l + 1 < q; ++l) {
      EXPECT_EQ(popcount(lab.patterns[static_cast<size_t>(l)] ^
                         lab.patterns[static_cast<size_t>(l + 1)]), 1);
    }
    for (int l = 0; l < q; ++l) EXPECT_EQ(lab.level_of(lab.patterns[static_cast<size_t>(l)]), l);
  }
  EXPECT_THROW(gray_label(3), ConfigError);
  EXPECT_THROW(gray_label(1), ConfigError);
  EXPECT_THROW(BitLabeling::from_patterns({0, 0, 1, 2}), ConfigError);
}

TEST(ListLlr, FullBoxEqualsExactMap) {
  std::mt19937_64 rng(1);
  for (int q : {2, 4}) {
    const BitLabeling lab = gray_label(q);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = q == 2 ? 4 : 3;
      const RealMatrix h = gaussian_matrix(n, n, rng);
      const ConstellationBox box = ConstellationBox::uniform(n, 0, q - 1);
      const RealVector y = h * to_real(testing::random_int_vector(n, 0, q - 1, rng)) +
                           gaussian_vector(n, rng, 0.8);
      CandidateList full = list_of(all_points(box));
      std::shuffle(full.items.begin(), full.items.end(), rng);
      const LlrVector a = list_llr(full, h, y, 0.8, lab);
      const LlrVector b = exact_map_llr(h, y, 0.8, lab);
      ASSERT_EQ(a.size(), b.size());
      for (size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a.values[i], b.values[i], 1e-9);
        EXPECT_EQ(a.clamped[i], b.clamped[i]);
      }
    }
  }
}

TEST(ListLlr, EmptyHypothesisIsClampedAndFlagged) {
  const BitLabeling lab = gray_label(4);
  RealMatrix h = RealMatrix::Identity(2, 2);
  RealVector y(2);
  y << 2.2, 0.4;
  // Coordinate 1, bit 1 (index 3) is 1 for levels 1 and 2 only.
  const CandidateList list = list_of({{2, 1}, {3, 2}, {0, 1}});
  const LlrVector l = list_llr(list, h, y, 1.0, lab);
  EXPECT_EQ(l.values[3], kDefaultLlrClamp);
  EXPECT_TRUE(l.clamped[3]);
  EXPECT_FALSE(l.clamped[0]);
  EXPECT_LE(std::fabs(l.values[0]), kDefaultLlrClamp);
  const LlrVector tight = list_llr(list, h, y, 1.0, lab, 5.0);
  EXPECT_EQ(tight.values[3], 5.0);
}

TEST(ListLlr, LargeMetricGapsSaturateWithoutFlag) {
  const BitLabeling lab = gray_label(2);
  RealMatrix h = RealMatrix::Identity(1, 1);
  RealVector y(1);
  y << 0.0;
  const LlrVector l = list_llr(list_of({{0}, {1}}), h, y, 0.05, lab);
  EXPECT_EQ(l.values[0], -kDefaultLlrClamp);
  EXPECT_FALSE(l.clamped[0]);
}

TEST(ListLlr, OrderInvariantAndRejectsBadInput) {
  std::mt19937_64 rng(2);
  const BitLabeling lab = gray_label(4);
  const RealMatrix h = gaussian_matrix(3, 3, rng);
  const RealVector y = gaussian_vector(3, rng, 3.0);
  CandidateList list = list_of({{0, 1, 2}, {3, 3, 0}, {1, 1, 1}, {2, 0, 3}});
  const LlrVector a = list_llr(list, h, y, 1.1, lab);
  std::reverse(list.items.begin(), list.items.end());
  const LlrVector b = list_llr(list, h, y, 1.1, lab);
  for (size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(a.values[i], b.values[i]);
  EXPECT_THROW(list_llr(CandidateList{}, h, y, 1.0, lab), ConfigError);
  EXPECT_THROW(list_llr(list, h, y, 0.0, lab), ConfigError);
  EXPECT_THROW(list_llr(list_of({{0, 1, 4}}), h, y, 1.0, lab), ConfigError);
}

TEST(ListLlr, DerandomizedListApproachesMap) {
  const BitLabeling lab = gray_label(2);
  std::vector<double> mean_delta;
  std::vector<double> sign_agree;
  for (double k : {1.0, 10.0, 100.0}) {
    std::mt19937_64 rng(3);
    double sum = 0.0;
    long bits = 0;
    long agree = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const RealMatrix h = gaussian_matrix(4, 4, rng);
      const RealVector y = h * to_real(testing::random_int_vector(4, 0, 1, rng)) +
                           gaussian_vector(4, rng, 0.5);
      const QRFactors qr = qr_decompose(h);
      DerandConfig cfg;
      cfg.nominal_k = k;
      cfg.sampler = auto_sampler_params(qr, k, 2);
      cfg.box = ConstellationBox::uniform(4, 0, 1);
      const CandidateList list = derandomized_decode(qr, qr.rotate(y), cfg);
      const LlrVector approx = list_llr(list, h, y, 0.5, lab);
      const LlrVector exact = exact_map_llr(h, y, 0.5, lab);
      for (size_t i = 0; i < exact.size(); ++i) {
        agree += (approx.values[i] > 0.0) == (exact.values[i] > 0.0);
        sum += std::fabs(approx.values[i] - exact.values[i]);
        ++bits;
      }
    }
    mean_delta.push_back(sum / static_cast<double>(bits));
    sign_agree.push_back(static_cast<double>(agree) / static_cast<double>(bits));
  }
  EXPECT_LT(mean_delta[1], mean_delta[0]);
  EXPECT_LT(mean_delta[2], mean_delta[1]);
  EXPECT_GT(sign_agree[2], sign_agree[0]);
}

double softplus(double x) { return std::log1p(std::exp(x)); }

// Direct summation of the prior-weighted L-values over every box point.
std::vector<double> direct_prior_llr(const RealMatrix& h, const RealVector& y, double sigma,
                                     const BitLabeling& lab, const std::vector<IntVector>& points,
                                     const std::vector<double>& prior) {
  const int dim = static_cast<int>(h.cols());
  const int bpl = lab.bits_per_level;
  const size_t bits = static_cast<size_t>(dim * bpl);
  std::vector<double> num(bits, 0.0);
  std::vector<double> den(bits, 0.0);
  for (const IntVector& z : points) {
    std::vector<int> b(bits);
    for (int k = 0; k < dim; ++k) {
      for (int j = 0; j < bpl; ++j) b[static_cast<size_t>(k * bpl + j)] = lab.bit(z[static_cast<size_t>(k)], j);
    }
    const double metric = -(y - h * to_real(z)).squaredNorm() / (2 * sigma * sigma);
    for (size_t i = 0; i < bits; ++i) {
      double w = metric;
      for (size_t j = 0; j < bits; ++j) {
        if (j != i) w += b[j] * prior[j] - softplus(prior[j]);
      }
      (b[i] ? num : den)[i] += std::exp(w);
    }
  }
  std::vector<double> out(bits);
  for (size_t i = 0; i < bits; ++i) out[i] = prior[i] + std::log(num[i] / den[i]);
  return out;
}

TEST(ListLlrWithPrior, ZeroPriorReducesToListLlr) {
  std::mt19937_64 rng(4);
  const BitLabeling lab = gray_label(4);
  const RealMatrix h = gaussian_matrix(2, 2, rng);
  const RealVector y = gaussian_vector(2, rng, 2.0);
  const CandidateList list = list_of({{0, 1}, {1, 1}, {2, 3}, {3, 0}, {1, 2}});
  const std::vector<double> zero(4, 0.0);
  const LlrVector a = list_llr(list, h, y, 0.9, lab);
  const LlrVector b = list_llr_with_prior(list, h, y, 0.9, lab, zero);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a.values[i], b.values[i], 1e-12);
    EXPECT_EQ(a.clamped[i], b.clamped[i]);
  }
  EXPECT_THROW(list_llr_with_prior(list, h, y, 0.9, lab, std::vector<double>(3, 0.0)), ConfigError);
}

TEST(ListLlrWithPrior, FullBoxMatchesDirectSummation) {
  std::mt19937_64 rng(5);
  const BitLabeling lab = gray_label(4);
  std::uniform_real_distribution<double> small(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const RealMatrix h = gaussian_matrix(2, 2, rng);
    const RealVector y = h * to_real(testing::random_int_vector(2, 0, 3, rng)) + gaussian_vector(2, rng, 0.7);
    const auto points = all_points(ConstellationBox::uniform(2, 0, 3));
    std::vector<double> prior(4);
    for (auto& v : prior) v = small(rng);
    const LlrVector l = list_llr_with_prior(list_of(points), h, y, 0.7, lab, prior);
    const auto direct = direct_prior_llr(h, y, 0.7, lab, points, prior);
    for (size_t i = 0; i < 4; ++i) {
      if (std::fabs(direct[i]) < 45.0) EXPECT_NEAR(l.values[i], direct[i], 1e-9);
    }
  }
}

TEST(ListLlrWithPrior, StrongPriorConditionsOnBit) {
  std::mt19937_64 rng(6);
  const BitLabeling lab = gray_label(2);
  for (int trial = 0; trial < 30; ++trial) {
    const RealMatrix h = gaussian_matrix(4, 4, rng);
    const RealVector y = gaussian_vector(4, rng, 1.0) + h * RealVector::Constant(4, 0.5);
    const auto points = all_points(ConstellationBox::uniform(4, 0, 1));
    std::vector<double> prior(4, 0.0);
    prior[1] = kDefaultLlrClamp;
    const LlrVector l = list_llr_with_prior(list_of(points), h, y, 0.8, lab, prior);
    std::vector<IntVector> conditioned;
    for (const auto& z : points) {
      if (z[1] == 1) conditioned.push_back(z);
    }
    const LlrVector c = list_llr(list_of(conditioned), h, y, 0.8, lab);
    for (size_t i : {0u, 2u, 3u}) EXPECT_NEAR(l.values[i], c.values[i], 1e-9);
  }
}

TEST(ListLlrWithPrior, FlippingPriorAndLabelsNegates) {
  std::mt19937_64 rng(7);
  const BitLabeling lab = gray_label(4);
  std::vector<unsigned> flipped_patterns;
  for (unsigned p : lab.patterns) flipped_patterns.push_back(p ^ 0b11u);
  const BitLabeling flipped = BitLabeling::from_patterns(flipped_patterns);
  std::uniform_real_distribution<double> small(-3.0, 3.0);
  for (int trial = 0; trial < 30; ++trial) {
    const RealMatrix h = gaussian_matrix(2, 2, rng);
    const RealVector y = gaussian_vector(2, rng, 2.0);
    const CandidateList list = list_of(all_points(ConstellationBox::uniform(2, 0, 3)));
    std::vector<double> prior(4);
    for (auto& v : prior) v = small(rng);
    std::vector<double> neg(prior);
    for (auto& v : neg) v = -v;
    const LlrVector a = list_llr_with_prior(list, h, y, 1.0, lab, prior);
    const LlrVector b = list_llr_with_prior(list, h, y, 1.0, flipped, neg);
    for (size_t i = 0; i < 4; ++i) EXPECT_NEAR(a.values[i], -b.values[i], 1e-9);
  }
}

TEST(SplitByRadius, CountsBothSides) {
  const RealMatrix h = RealMatrix::Identity(2, 2);
  const RealVector y = RealVector::Zero(2);
  const ListSplit s = split_by_radius(list_of({{0, 0}, {1, 0}, {1, 1}, {2, 0}}), h, y, 1.0);
  EXPECT_EQ(s.inside, 2);
  EXPECT_EQ(s.outside, 2);
}

}  // namespace
}  // namespace sampdec
