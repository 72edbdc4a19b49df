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

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sampdec {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Integer coordinate vector of a lattice point (coefficients w.r.t. the basis).
using IntVector = std::vector<int>;

// Bad arguments or configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Singular input, exhausted guards, overflowed searches. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Round half away from zero.
inline int round_nearest(double x) { return static_cast<int>(std::lround(x)); }

inline RealVector to_real(const IntVector& z) {
  RealVector v(static_cast<Eigen::Index>(z.size()));
  for (size_t i = 0; i < z.size(); ++i) v[static_cast<Eigen::Index>(i)] = z[i];
  return v;
}

// Per-coordinate integer bounds of a finite constellation after integer
// mapping. Bounds are inclusive.
struct ConstellationBox {
  IntVector lower;
  IntVector upper;

  static ConstellationBox uniform(int dim, int lo, int hi) {
    return {IntVector(static_cast<size_t>(dim), lo),
            IntVector(static_cast<size_t>(dim), hi)};
  }

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const IntVector& z) const;
  IntVector clamp(const IntVector& z) const;
  // Number of points, saturating at `cap` + 1.
  double size(double cap = 1e300) const;
  void validate() const;
};

inline bool ConstellationBox::contains(const IntVector& z) const {
  if (z.size() != lower.size()) return false;
  for (size_t i = 0; i < z.size(); ++i) {
    if (z[i] < lower[i] || z[i] > upper[i]) return false;
  }
  return true;
}

inline IntVector ConstellationBox::clamp(const IntVector& z) const {
  IntVector out(z);
  for (size_t i = 0; i < z.size(); ++i) {
    if (out[i] < lower[i]) out[i] = lower[i];
    if (out[i] > upper[i]) out[i] = upper[i];
  }
  return out;
}

inline double ConstellationBox::size(double cap) const {
  double total = 1.0;
  for (size_t i = 0; i < lower.size(); ++i) {
    total *= static_cast<double>(upper[i]) - lower[i] + 1.0;
    if (total > cap) return cap + 1.0;
  }
  return total;
}

inline void ConstellationBox::validate() const {
  if (lower.size() != upper.size()) {
    throw ConfigError("constellation box: bound vectors differ in length");
  }
  if (lower.empty()) throw ConfigError("constellation box: empty box");
  for (size_t i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) {
      throw ConfigError("constellation box: lower > upper at coordinate " +
                        std::to_string(i));
    }
  }
}

}  // namespace sampdec
