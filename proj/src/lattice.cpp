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

#include "sampdec/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sampdec {

namespace {

constexpr double kRankTolerance = 1e-12;
constexpr long kMaxLllIterations = 1'000'000;

void check_finite(const RealMatrix& h, const char* what) {
  if (!h.allFinite()) {
    throw ConfigError(std::string(what) + ": matrix has non-finite entries");
  }
}

void check_full_column_rank(const RealMatrix& h, const char* what) {
  if (h.rows() < h.cols() || h.cols() == 0) {
    throw NumericalError(std::string(what) + ": matrix is " +
                         std::to_string(h.rows()) + "x" +
                         std::to_string(h.cols()) +
                         ", need rows >= cols >= 1");
  }
  Eigen::JacobiSVD<RealMatrix> svd(h);
  const auto& s = svd.singularValues();
  const double largest = s[0];
  const double smallest = s[s.size() - 1];
  if (!(largest > 0.0) || smallest <= kRankTolerance * largest) {
    throw NumericalError(std::string(what) +
                         ": matrix is singular (rank deficient)");
  }
}

// Gram-Schmidt data of the columns of b: squared norms of b* and the mu
// coefficients (lower-triangular, unit diagonal implied).
struct Gso {
  RealVector norms;
  RealMatrix mu;
};

Gso gram_schmidt(const RealMatrix& b) {
  const Eigen::Index n = b.cols();
  RealMatrix star = b;
  Gso g{RealVector::Zero(n), RealMatrix::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      g.mu(i, j) = b.col(i).dot(star.col(j)) / g.norms[j];
      star.col(i) -= g.mu(i, j) * star.col(j);
    }
    g.norms[i] = star.col(i).squaredNorm();
  }
  return g;
}

}  // namespace

QRFactors qr_decompose(const RealMatrix& h) {
  check_finite(h, "qr_decompose");
  check_full_column_rank(h, "qr_decompose");
  const Eigen::Index m = h.rows();
  const Eigen::Index n = h.cols();

  Eigen::HouseholderQR<RealMatrix> hqr(h);
  QRFactors f;
  f.q = hqr.householderQ() * RealMatrix::Identity(m, n);
  f.r = RealMatrix::Zero(n, n);
  f.r.triangularView<Eigen::Upper>() =
      hqr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (f.r(i, i) < 0.0) {
      f.r.row(i) *= -1.0;
      f.q.col(i) *= -1.0;
    }
  }
  return f;
}

ReducedBasis lll_reduce(const RealMatrix& h, double delta) {
  if (!(delta > 0.25 && delta < 1.0)) {
    throw ConfigError("lll_reduce: delta must lie in (1/4, 1)");
  }
  check_finite(h, "lll_reduce");
  check_full_column_rank(h, "lll_reduce");

  const Eigen::Index n = h.cols();
  ReducedBasis out{h, Eigen::MatrixXi::Identity(n, n)};
  RealMatrix& b = out.basis;
  Eigen::MatrixXi& t = out.transform;

  Eigen::Index k = 1;
  long iterations = 0;
  while (k < n) {
    if (++iterations > kMaxLllIterations) {
      throw NumericalError("lll_reduce: iteration limit exceeded");
    }
    Gso g = gram_schmidt(b);
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const double q = std::round(g.mu(k, j));
      if (q == 0.0) continue;
      b.col(k) -= q * b.col(j);
      t.col(k) -= static_cast<int>(q) * t.col(j);
      for (Eigen::Index l = 0; l < j; ++l) g.mu(k, l) -= q * g.mu(j, l);
      g.mu(k, j) -= q;
    }
    const double mu = g.mu(k, k - 1);
    if (g.norms[k] >= (delta - mu * mu) * g.norms[k - 1]) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      t.col(k).swap(t.col(k - 1));
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
  // Final size-reduction pass against freshly computed GSO coefficients.
  for (Eigen::Index i = 1; i < n; ++i) {
    Gso g = gram_schmidt(b);
    for (Eigen::Index j = i - 1; j >= 0; --j) {
      const double q = std::round(g.mu(i, j));
      if (q == 0.0) continue;
      b.col(i) -= q * b.col(j);
      t.col(i) -= static_cast<int>(q) * t.col(j);
      for (Eigen::Index l = 0; l < j; ++l) g.mu(i, l) -= q * g.mu(j, l);
      g.mu(i, j) -= q;
    }
  }
  return out;
}

RealMatrix complex_to_real(const ComplexMatrix& h_c) {
  const Eigen::Index r = h_c.rows();
  const Eigen::Index c = h_c.cols();
  RealMatrix h(2 * r, 2 * c);
  h.topLeftCorner(r, c) = h_c.real();
  h.topRightCorner(r, c) = -h_c.imag();
  h.bottomLeftCorner(r, c) = h_c.imag();
  h.bottomRightCorner(r, c) = h_c.real();
  return h;
}

RealVector complex_to_real(const ComplexVector& v_c) {
  RealVector v(2 * v_c.size());
  v << v_c.real(), v_c.imag();
  return v;
}

std::pair<RealMatrix, RealVector> complex_to_real(const ComplexMatrix& h_c,
                                                  const ComplexVector& y_c) {
  if (h_c.rows() != y_c.size()) {
    throw ConfigError("complex_to_real: y length does not match h rows");
  }
  return {complex_to_real(h_c), complex_to_real(y_c)};
}

ExtendedSystem mmse_extend(const RealMatrix& h, const RealVector& y,
                           double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("mmse_extend: sigma must be finite and >= 0");
  }
  if (h.rows() != y.size()) {
    throw ConfigError("mmse_extend: y length does not match h rows");
  }
  const Eigen::Index m = h.rows();
  const Eigen::Index n = h.cols();
  ExtendedSystem ext;
  ext.sigma = sigma;
  ext.h_ext = RealMatrix::Zero(m + n, n);
  ext.h_ext.topRows(m) = h;
  ext.h_ext.bottomRows(n).diagonal().setConstant(sigma);
  ext.y_ext = RealVector::Zero(m + n);
  ext.y_ext.head(m) = y;
  return ext;
}

}  // namespace sampdec
