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

#include <utility>

#include "sampdec/types.hpp"

namespace sampdec {

// Thin QR factorization h = q * r with q (m x n, orthonormal columns) and
// r (n x n) upper-triangular with a strictly positive diagonal. For square h
// q is orthogonal.
struct QRFactors {
  RealMatrix q;
  RealMatrix r;

  int dim() const { return static_cast<int>(r.rows()); }
  double min_diag() const { return r.diagonal().minCoeff(); }
  // y' = q^T y.
  RealVector rotate(const RealVector& y) const { return q.transpose() * y; }
};

// Householder QR with the sign of each column of q flipped so that
// diag(r) > 0. Requires rows >= cols and full column rank (smallest singular
// value above 1e-12 times the largest); throws NumericalError otherwise.
QRFactors qr_decompose(const RealMatrix& h);

// LLL-reduced basis together with the unimodular transform that produced it:
// basis == original * transform.
struct ReducedBasis {
  RealMatrix basis;
  Eigen::MatrixXi transform;
};

constexpr double kDefaultLllDelta = 0.99;

ReducedBasis lll_reduce(const RealMatrix& h, double delta = kDefaultLllDelta);

// Real embedding of a complex model: h -> [[Re, -Im], [Im, Re]],
// y -> [Re y; Im y]. The unknown becomes [Re x; Im x].
std::pair<RealMatrix, RealVector> complex_to_real(const ComplexMatrix& h_c,
                                                  const ComplexVector& y_c);
RealMatrix complex_to_real(const ComplexMatrix& h_c);
RealVector complex_to_real(const ComplexVector& v_c);

// MMSE-extended model [h; sigma*I], [y; 0]. SIC on the extended model
// realizes MMSE-SIC with regularization sigma.
struct ExtendedSystem {
  RealMatrix h_ext;
  RealVector y_ext;
  double sigma = 0.0;
};

ExtendedSystem mmse_extend(const RealMatrix& h, const RealVector& y,
                           double sigma);

}  // namespace sampdec
