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

#include "sampdec/tuning.hpp"

#include <cmath>

namespace sampdec {

namespace {

// Solves 2n (1 + ln rho) / rho = target for rho > 1 by bisection. The left
// side decreases strictly from 2n (rho = 1) towards 0.
double solve_rho(double target, int n, const char* what) {
  if (n < 1) throw ConfigError(std::string(what) + ": n must be >= 1");
  const double two_n = 2.0 * n;
  if (!(target > 0.0) || !(target < two_n)) {
    throw ConfigError(std::string(what) +
                      ": sample size outside the range of the rho relation");
  }
  auto g = [two_n](double rho) { return two_n * (1.0 + std::log(rho)) / rho; };

  double lo = 1.0;
  double hi = 2.0;
  while (g(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError(std::string(what) + ": no bracket");
  }
  for (int iter = 0; iter < 2000 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double solve_rho_opt(double k, int n) {
  if (!(k > 0.5)) throw ConfigError("solve_rho_opt: k must be > 1/2");
  return solve_rho(std::log(2.0 * k), n, "solve_rho_opt");
}

double randomized_rho(double k, int n) {
  if (!(k > 1.0)) throw ConfigError("randomized_rho: k must be > 1");
  return solve_rho(std::log(k), n, "randomized_rho");
}

double compute_a(double rho, double min_rii) {
  if (!(rho > 1.0)) throw ConfigError("compute_a: rho must be > 1");
  if (!(min_rii > 0.0)) throw ConfigError("compute_a: min r_ii must be > 0");
  return std::log(rho) / (min_rii * min_rii);
}

double decoding_radius(double k, int n, double min_rii) {
  if (!(min_rii > 0.0)) throw ConfigError("decoding_radius: min r_ii must be > 0");
  const double rho = solve_rho_opt(k, n);
  return std::sqrt(2.0 * n / rho) * min_rii;
}

int fsd_depth(int n) {
  if (n < 1) throw ConfigError("fsd_depth: n must be >= 1");
  int p = 0;
  while ((p + 1) * (p + 1) < n) ++p;
  return p;
}

std::uint64_t min_k_for_eta(double eta, int p, std::uint64_t cap) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw ConfigError("min_k_for_eta: eta must lie in (0, 1)");
  }
  if (p < 1) throw ConfigError("min_k_for_eta: p must be >= 1");

  auto eta_of = [p](std::uint64_t k) {
    const double kk = static_cast<double>(k);
    double prod = 1.0;
    for (int i = 1; i <= p; ++i) prod *= 1.0 - std::ldexp(1.0, i - 2) / kk;
    return prod;
  };

  // Every factor must be positive: K > 2^(p-2).
  const double floor_term = std::floor(std::ldexp(1.0, p - 2));
  if (floor_term + 1.0 > static_cast<double>(cap)) {
    throw NumericalError("min_k_for_eta: K exceeds cap");
  }
  const auto start = static_cast<std::uint64_t>(floor_term) + 1;
  if (eta_of(start) >= eta) return start;

  // eta_of is increasing in K: gallop to a bracket, then bisect.
  std::uint64_t lo = start;
  std::uint64_t hi = start;
  while (eta_of(hi) < eta) {
    lo = hi;
    if (hi >= cap) throw NumericalError("min_k_for_eta: K exceeds cap");
    hi = (hi > cap / 2) ? cap : 2 * hi;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (eta_of(mid) >= eta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double lsd_radius(int n, double sigma) {
  if (n < 1) throw ConfigError("lsd_radius: n must be >= 1");
  if (!(sigma >= 0.0)) throw ConfigError("lsd_radius: sigma must be >= 0");
  return std::sqrt(static_cast<double>(n)) * sigma;
}

double near_map_sample_size(int n, double sigma, double min_rii) {
  if (n < 1) throw ConfigError("near_map_sample_size: n must be >= 1");
  if (!(sigma > 0.0)) throw ConfigError("near_map_sample_size: sigma must be > 0");
  if (!(min_rii > 0.0)) {
    throw ConfigError("near_map_sample_size: min r_ii must be > 0");
  }
  const double ratio = (min_rii * min_rii) / (sigma * sigma);
  const double exponent = n / ratio;
  return 0.5 * std::exp(exponent * std::log(2.0 * M_E * ratio));
}

std::optional<std::string> rho_warning(double rho) {
  if (rho < kRhoWarningThreshold) {
    return "rho < 3: the neglected O(rho^-3) term makes the bound loose";
  }
  return std::nullopt;
}

SamplerParams auto_sampler_params(const QRFactors& qr, double k, int n_trunc,
                                  std::optional<double> rho) {
  double chosen = 0.0;
  if (rho) {
    chosen = *rho;
  } else {
    const int n = qr.dim();
    const double upper = 0.5 * std::exp(2.0 * n);
    chosen = (k < upper) ? solve_rho_opt(k, n) : 1.0 + 1e-9;
  }
  return SamplerParams::from_rho(chosen, qr.min_diag(), n_trunc, k);
}

}  // namespace sampdec
