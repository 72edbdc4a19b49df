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

#include "sampdec/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "llr_accumulator.hpp"

namespace sampdec {

namespace {

void check_box_system(const RealMatrix& h, const RealVector& y,
                      const ConstellationBox& box, const char* what) {
  box.validate();
  if (box.dim() != h.cols()) {
    throw ConfigError(std::string(what) + ": box dimension does not match h");
  }
  if (y.size() != h.rows()) {
    throw ConfigError(std::string(what) + ": y length does not match h rows");
  }
}

// Depth-first enumeration over the box in Schnorr-Euchner order. At each
// level values are visited in order of increasing distance from the
// projected center, so the first value over the bound ends the level.
// `Leaf` is called with the completed z and its squared distance in the
// rotated system and returns the (possibly shrunk) bound.
template <typename Leaf>
class BoxTreeSearch {
 public:
  BoxTreeSearch(const QRFactors& qr, const RealVector& y_prime,
                const ConstellationBox& box, Leaf leaf)
      : r_(qr.r),
        y_(y_prime),
        box_(box),
        leaf_(std::move(leaf)),
        n_(qr.dim()),
        z_(static_cast<size_t>(n_), 0) {}

  void run(double bound) {
    bound_ = bound;
    search(n_ - 1, 0.0);
  }

 private:
  void search(int i, double partial) {
    double acc = y_[i];
    for (int l = i + 1; l < n_; ++l) acc -= r_(i, l) * z_[static_cast<size_t>(l)];
    const double rii = r_(i, i);
    const double center = acc / rii;
    const int lo = box_.lower[static_cast<size_t>(i)];
    const int hi = box_.upper[static_cast<size_t>(i)];
    const double rounded = std::clamp(std::round(center), static_cast<double>(lo),
                                      static_cast<double>(hi));
    const int start = static_cast<int>(rounded);
    int down = start - 1;
    int up = start + 1;
    int v = start;
    while (true) {
      const double d = rii * (center - v);
      const double p = partial + d * d;
      if (p > bound_) break;
      z_[static_cast<size_t>(i)] = v;
      if (i == 0) {
        bound_ = leaf_(z_, p);
      } else {
        search(i - 1, p);
      }
      const bool can_down = down >= lo;
      const bool can_up = up <= hi;
      if (!can_down && !can_up) break;
      if (can_down && (!can_up || center - down <= up - center)) {
        v = down--;
      } else {
        v = up++;
      }
    }
  }

  const RealMatrix& r_;
  const RealVector& y_;
  const ConstellationBox& box_;
  Leaf leaf_;
  int n_;
  IntVector z_;
  double bound_ = INFINITY;
};

double tie_slack(double d2) { return 1e-12 * (1.0 + d2); }

// Visits every point of the box in odometer order.
template <typename Visit>
void for_each_box_point(const ConstellationBox& box, Visit&& visit) {
  IntVector z = box.lower;
  const size_t n = z.size();
  while (true) {
    visit(z);
    size_t k = 0;
    while (k < n) {
      if (z[k] < box.upper[k]) {
        ++z[k];
        break;
      }
      z[k] = box.lower[k];
      ++k;
    }
    if (k == n) return;
  }
}

LlrVector box_llr(const RealMatrix& h, const RealVector& y, double sigma,
                  const BitLabeling& labeling,
                  const std::optional<ConstellationBox>& box_opt, double clamp,
                  bool max_log, const char* what) {
  if (!(sigma > 0.0)) throw ConfigError(std::string(what) + ": sigma must be > 0");
  const int dim = static_cast<int>(h.cols());
  const ConstellationBox box =
      box_opt ? *box_opt : ConstellationBox::uniform(dim, 0, labeling.levels - 1);
  check_box_system(h, y, box, what);
  if (box.size(kExhaustiveGuard) > kExhaustiveGuard) {
    throw NumericalError(std::string(what) + ": box exceeds the exhaustive guard of " +
                         std::to_string(static_cast<long>(kExhaustiveGuard)) +
                         " points");
  }
  internal::BitAccumulator acc(labeling, dim);
  acc.check_point(box.lower);
  acc.check_point(box.upper);
  const double scale = 1.0 / (2.0 * sigma * sigma);
  for_each_box_point(box, [&](const IntVector& z) {
    const double metric = -(y - h * to_real(z)).squaredNorm() * scale;
    acc.add(z, [metric](size_t, int) { return metric; });
  });
  return acc.finish(max_log, clamp);
}

}  // namespace

Candidate ml_sphere_decode(const RealMatrix& h, const RealVector& y,
                           const ConstellationBox& box) {
  check_box_system(h, y, box, "ml_sphere_decode");
  const QRFactors qr = qr_decompose(h);
  const RealVector y_prime = qr.rotate(y);

  IntVector best;
  double best_d2 = INFINITY;
  auto leaf = [&](const IntVector& z, double d2) {
    if (best.empty() || d2 < best_d2 - tie_slack(best_d2)) {
      best = z;
      best_d2 = d2;
    } else if (d2 <= best_d2 + tie_slack(best_d2) && z < best) {
      best = z;
      best_d2 = std::min(best_d2, d2);
    }
    return best_d2 + tie_slack(best_d2);
  };
  BoxTreeSearch<decltype(leaf)> search(qr, y_prime, box, leaf);
  search.run(INFINITY);

  Candidate c;
  c.z = best;
  c.raw_z = best;
  c.dist = (y - h * to_real(best)).norm();
  return c;
}

std::vector<Candidate> enumerate_radius(const RealMatrix& h,
                                        const RealVector& y, double radius,
                                        const ConstellationBox& box,
                                        size_t max_points) {
  check_box_system(h, y, box, "enumerate_radius");
  if (!(radius >= 0.0)) throw ConfigError("enumerate_radius: radius must be >= 0");
  const QRFactors qr = qr_decompose(h);
  const RealVector y_prime = qr.rotate(y);
  const double r2 = radius * radius;
  // Part of ||y||^2 orthogonal to the column space; zero for square h.
  const double outside = std::max(0.0, y.squaredNorm() - y_prime.squaredNorm());
  const double bound = std::isinf(r2) ? INFINITY
                                      : r2 - outside + 1e-9 * (1.0 + r2);

  std::vector<Candidate> found;
  auto leaf = [&](const IntVector& z, double) {
    const double d2 = (y - h * to_real(z)).squaredNorm();
    if (d2 <= r2) {
      if (found.size() >= max_points) {
        throw NumericalError("enumerate_radius: more than " +
                             std::to_string(max_points) + " points in radius");
      }
      Candidate c;
      c.z = z;
      c.raw_z = z;
      c.dist = std::sqrt(d2);
      found.push_back(std::move(c));
    }
    return bound;
  };
  BoxTreeSearch<decltype(leaf)> search(qr, y_prime, box, leaf);
  search.run(bound);
  std::sort(found.begin(), found.end(), closer);
  return found;
}

LlrVector exact_map_llr(const RealMatrix& h, const RealVector& y, double sigma,
                        const BitLabeling& labeling,
                        const std::optional<ConstellationBox>& box,
                        double clamp) {
  return box_llr(h, y, sigma, labeling, box, clamp, false, "exact_map_llr");
}

LlrVector maxlog_llr(const RealMatrix& h, const RealVector& y, double sigma,
                     const BitLabeling& labeling,
                     const std::optional<ConstellationBox>& box, double clamp) {
  return box_llr(h, y, sigma, labeling, box, clamp, true, "maxlog_llr");
}

double exact_sampling_probability(const QRFactors& qr,
                                  const RealVector& y_prime, const IntVector& z,
                                  const SamplerParams& params) {
  const int n = qr.dim();
  if (static_cast<int>(z.size()) != n || y_prime.size() != n) {
    throw ConfigError("exact_sampling_probability: dimension mismatch");
  }
  params.validate();
  double prob = 1.0;
  for (int i = n - 1; i >= 0; --i) {
    double acc = y_prime[i];
    for (int l = i + 1; l < n; ++l) acc -= qr.r(i, l) * z[static_cast<size_t>(l)];
    const double rii = qr.r(i, i);
    const ProbTable t = candidate_probabilities(acc / rii, params.a_param * rii * rii,
                                                params.truncation_n);
    const int v = z[static_cast<size_t>(i)];
    if (v < t.candidates.front() || v > t.candidates.back()) return 0.0;
    prob *= t.probs[static_cast<size_t>(v - t.candidates.front())];
  }
  return prob;
}

}  // namespace sampdec
