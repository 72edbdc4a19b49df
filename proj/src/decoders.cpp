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

#include "sampdec/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace sampdec {

namespace {

struct Leaf {
  IntVector z;
  double log_prob = 0.0;
};

double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double residual_norm(const RealMatrix& r, const RealVector& y_prime,
                     const IntVector& z) {
  return (y_prime - r * to_real(z)).norm();
}

// Collapses repeated draws, clamps to the box, merges vectors that clamp to
// the same point and sorts by (dist, z).
CandidateList finalize(const std::vector<Leaf>& leaves, const RealMatrix& r,
                       const RealVector& y_prime,
                       const std::optional<ConstellationBox>& box,
                       const DecodeStats& stats) {
  struct Raw {
    double log_prob;
    int draws;
  };
  std::map<IntVector, Raw> raws;
  for (const Leaf& leaf : leaves) {
    auto [it, inserted] = raws.try_emplace(leaf.z, Raw{leaf.log_prob, 0});
    ++it->second.draws;
  }

  std::map<IntVector, Candidate> merged;
  for (const auto& [z, raw] : raws) {
    IntVector key = box ? box->clamp(z) : z;
    auto [it, inserted] = merged.try_emplace(key);
    Candidate& c = it->second;
    if (inserted) {
      c.z = key;
      c.raw_z = z;
      c.log_prob = raw.log_prob;
      c.draws = raw.draws;
      continue;
    }
    if (raw.log_prob > c.log_prob) c.raw_z = z;
    c.log_prob = log_add(c.log_prob, raw.log_prob);
    c.draws += raw.draws;
  }

  CandidateList out;
  out.stats = stats;
  out.items.reserve(merged.size());
  for (auto& [key, c] : merged) {
    c.dist = residual_norm(r, y_prime, c.z);
    c.log_prob = std::min(c.log_prob, 0.0);
    out.total_prob += std::exp(c.log_prob);
    out.items.push_back(std::move(c));
  }
  std::sort(out.items.begin(), out.items.end(), closer);
  return out;
}

// Depth-first traversal of the sampling tree. Levels are 0-based and visited
// from dim-1 down to 0; levels below `first_sic_level_` are completed by SIC.
class TreeSearch {
 public:
  TreeSearch(const QRFactors& qr, const RealVector& y_prime,
             const SamplerParams& params, DerandMode mode, int sampled_levels)
      : r_(qr.r),
        y_(y_prime),
        params_(params),
        mode_(mode),
        n_(qr.dim()),
        first_sampled_level_(n_ - sampled_levels),
        z_(static_cast<size_t>(n_), 0) {}

  void run(double k) {
    if (n_ == 0) return;
    visit(n_ - 1, k, 0.0);
  }

  const std::vector<Leaf>& leaves() const { return leaves_; }
  const DecodeStats& stats() const { return stats_; }

 private:
  double x_tilde(int i) const {
    double acc = y_[i];
    for (int l = i + 1; l < n_; ++l) acc -= r_(i, l) * z_[static_cast<size_t>(l)];
    return acc / r_(i, i);
  }

  ProbTable table_at(int i) {
    ++stats_.table_evals;
    const double rii = r_(i, i);
    return candidate_probabilities(x_tilde(i), params_.a_param * rii * rii,
                                   params_.truncation_n);
  }

  void emit(double log_prob) { leaves_.push_back({z_, log_prob}); }

  // SIC from level i downwards. The probabilities of the rounded choices are
  // still accumulated so log_prob stays the sampling probability of the leaf.
  void complete_sic(int i, double log_prob) {
    for (int l = i; l >= 0; --l) {
      ++stats_.node_visits;
      const ProbTable t = table_at(l);
      const size_t j = t.nearest_index();
      z_[static_cast<size_t>(l)] = t.candidates[j];
      log_prob += t.log_probs[j];
    }
    emit(log_prob);
  }

  void descend(int i, double budget, double log_prob, bool shortcut) {
    if (i == 0) {
      emit(log_prob);
    } else if (shortcut) {
      complete_sic(i - 1, log_prob);
    } else {
      visit(i - 1, budget, log_prob);
    }
  }

  void visit(int i, double budget, double log_prob) {
    if (i < first_sampled_level_) {
      complete_sic(i, log_prob);
      return;
    }
    ++stats_.node_visits;
    const ProbTable t = table_at(i);
    const size_t sic_index = t.nearest_index();
    for (size_t j = 0; j < t.candidates.size(); ++j) {
      const double share = budget * t.probs[j];
      const double child_log_prob = log_prob + t.log_probs[j];
      if (mode_ == DerandMode::kLiteral) {
        double expected = std::floor(share + 0.5);
        if (j == sic_index) expected = std::max(expected, 1.0);
        if (expected < 1.0) {
          stats_.pruned_mass += std::exp(child_log_prob);
          continue;
        }
        z_[static_cast<size_t>(i)] = t.candidates[j];
        descend(i, share, child_log_prob, expected == 1.0);
      } else {
        if (share < 0.5 && j != sic_index) {
          stats_.pruned_mass += std::exp(child_log_prob);
          continue;
        }
        z_[static_cast<size_t>(i)] = t.candidates[j];
        descend(i, share, child_log_prob, false);
      }
    }
  }

  const RealMatrix& r_;
  const RealVector& y_;
  const SamplerParams& params_;
  DerandMode mode_;
  int n_;
  int first_sampled_level_;
  IntVector z_;
  std::vector<Leaf> leaves_;
  DecodeStats stats_;
};

void check_system(const QRFactors& qr, const RealVector& y_prime,
                  const char* what) {
  if (y_prime.size() != qr.r.rows()) {
    throw ConfigError(std::string(what) + ": y' length " +
                      std::to_string(y_prime.size()) + " does not match R (" +
                      std::to_string(qr.r.rows()) + ")");
  }
}

double tie_tolerance(double a, double b) {
  return 1e-10 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

bool closer(const Candidate& a, const Candidate& b) {
  if (a.dist != b.dist) return a.dist < b.dist;
  return a.z < b.z;
}

const Candidate& CandidateList::best() const {
  if (items.empty()) throw ConfigError("candidate list is empty");
  return items.front();
}

bool CandidateList::contains(const IntVector& z) const {
  return std::any_of(items.begin(), items.end(),
                     [&](const Candidate& c) { return c.z == z; });
}

void DerandConfig::validate(int dim) const {
  if (!(nominal_k >= 1.0) || !std::isfinite(nominal_k)) {
    throw ConfigError("derandomized decoding: K must be finite and >= 1");
  }
  sampler.validate();
  if (box) {
    box->validate();
    if (box->dim() != dim) {
      throw ConfigError("derandomized decoding: box dimension mismatch");
    }
  }
}

Candidate sic_decode(const QRFactors& qr, const RealVector& y_prime) {
  check_system(qr, y_prime, "sic_decode");
  const int n = qr.dim();
  Candidate c;
  c.z.assign(static_cast<size_t>(n), 0);
  for (int i = n - 1; i >= 0; --i) {
    double acc = y_prime[i];
    for (int l = i + 1; l < n; ++l) acc -= qr.r(i, l) * c.z[static_cast<size_t>(l)];
    c.z[static_cast<size_t>(i)] = round_nearest(acc / qr.r(i, i));
  }
  c.raw_z = c.z;
  c.dist = residual_norm(qr.r, y_prime, c.z);
  return c;
}

CandidateList randomized_decode(const QRFactors& qr, const RealVector& y_prime,
                                int k, const SamplerParams& params, Rng& rng,
                                const std::optional<ConstellationBox>& box) {
  check_system(qr, y_prime, "randomized_decode");
  if (k < 1) throw ConfigError("randomized_decode: k must be >= 1");
  params.validate();
  if (box) box->validate();

  const int n = qr.dim();
  DecodeStats stats;
  std::vector<Leaf> leaves;
  leaves.reserve(static_cast<size_t>(k));
  IntVector z(static_cast<size_t>(n), 0);
  for (int draw = 0; draw < k; ++draw) {
    double log_prob = 0.0;
    for (int i = n - 1; i >= 0; --i) {
      double acc = y_prime[i];
      for (int l = i + 1; l < n; ++l) acc -= qr.r(i, l) * z[static_cast<size_t>(l)];
      const double rii = qr.r(i, i);
      const ProbTable t = candidate_probabilities(
          acc / rii, params.a_param * rii * rii, params.truncation_n);
      ++stats.table_evals;
      ++stats.node_visits;
      const int v = random_round(t, rng);
      z[static_cast<size_t>(i)] = v;
      log_prob += t.log_probs[static_cast<size_t>(v - t.candidates.front())];
    }
    leaves.push_back({z, log_prob});
  }
  return finalize(leaves, qr.r, y_prime, box, stats);
}

CandidateList derandomized_decode(const QRFactors& qr,
                                  const RealVector& y_prime,
                                  const DerandConfig& cfg) {
  check_system(qr, y_prime, "derandomized_decode");
  cfg.validate(qr.dim());
  TreeSearch search(qr, y_prime, cfg.sampler, cfg.mode, qr.dim());
  search.run(cfg.nominal_k);
  return finalize(search.leaves(), qr.r, y_prime, cfg.box, search.stats());
}

std::vector<int> fsd_order(const RealMatrix& h, int p) {
  const int n = static_cast<int>(h.cols());
  if (p < 0 || p > n) {
    throw ConfigError("fsd_order: p must lie in [0, " + std::to_string(n) + "]");
  }
  std::vector<int> remaining(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) remaining[static_cast<size_t>(i)] = i;
  std::vector<int> perm(static_cast<size_t>(n), 0);

  for (int step = 0; step < n; ++step) {
    RealMatrix sub(h.rows(), static_cast<Eigen::Index>(remaining.size()));
    for (size_t c = 0; c < remaining.size(); ++c) {
      sub.col(static_cast<Eigen::Index>(c)) = h.col(remaining[c]);
    }
    const RealMatrix pinv =
        Eigen::CompleteOrthogonalDecomposition<RealMatrix>(sub).pseudoInverse();
    const RealVector amplification = pinv.rowwise().squaredNorm();
    const bool want_largest = step < p;

    size_t chosen = 0;
    for (size_t c = 1; c < remaining.size(); ++c) {
      const double cand = amplification[static_cast<Eigen::Index>(c)];
      const double cur = amplification[static_cast<Eigen::Index>(chosen)];
      const bool tie = std::fabs(cand - cur) <= tie_tolerance(cand, cur);
      // Later columns win ties: they are detected first in identity order.
      if (tie || (want_largest ? cand > cur : cand < cur)) chosen = c;
    }
    perm[static_cast<size_t>(n - 1 - step)] = remaining[chosen];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return perm;
}

CandidateList two_stage_decode(const RealMatrix& h, const RealVector& y, int p,
                               const DerandConfig& cfg) {
  const int n = static_cast<int>(h.cols());
  if (y.size() != h.rows()) {
    throw ConfigError("two_stage_decode: y length does not match h rows");
  }
  cfg.validate(n);
  const std::vector<int> perm = fsd_order(h, p);

  RealMatrix ordered(h.rows(), h.cols());
  for (int k = 0; k < n; ++k) ordered.col(k) = h.col(perm[static_cast<size_t>(k)]);
  const QRFactors qr = qr_decompose(ordered);
  const RealVector y_prime = qr.rotate(y);

  const SamplerParams params = SamplerParams::from_rho(
      cfg.sampler.rho, qr.min_diag(), cfg.sampler.truncation_n,
      cfg.sampler.nominal_k);
  std::optional<ConstellationBox> box;
  if (cfg.box) {
    box = ConstellationBox{IntVector(static_cast<size_t>(n)),
                           IntVector(static_cast<size_t>(n))};
    for (int k = 0; k < n; ++k) {
      box->lower[static_cast<size_t>(k)] = cfg.box->lower[static_cast<size_t>(perm[static_cast<size_t>(k)])];
      box->upper[static_cast<size_t>(k)] = cfg.box->upper[static_cast<size_t>(perm[static_cast<size_t>(k)])];
    }
  }

  TreeSearch search(qr, y_prime, params, cfg.mode, p);
  search.run(cfg.nominal_k);
  CandidateList list = finalize(search.leaves(), qr.r, y_prime, box, search.stats());

  auto unpermute = [&](const IntVector& v) {
    IntVector out(v.size());
    for (size_t k = 0; k < v.size(); ++k) out[static_cast<size_t>(perm[k])] = v[k];
    return out;
  };
  for (Candidate& c : list.items) {
    c.z = unpermute(c.z);
    c.raw_z = unpermute(c.raw_z);
  }
  std::sort(list.items.begin(), list.items.end(), closer);
  return list;
}

}  // namespace sampdec
