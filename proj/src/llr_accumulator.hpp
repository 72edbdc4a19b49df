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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sampdec/soft_output.hpp"

namespace sampdec::internal {

// Streaming log-sum-exp.
class LogSumExp {
 public:
  void add(double v) {
    if (v == -INFINITY) return;
    if (v <= max_) {
      sum_ += std::exp(v - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    }
    any_ = true;
  }
  bool empty() const { return !any_; }
  double value() const { return any_ ? max_ + std::log(sum_) : -INFINITY; }

 private:
  double max_ = -INFINITY;
  double sum_ = 0.0;
  bool any_ = false;
};

// Per-bit accumulation of hypothesis sums (soft) or best metrics (max-log).
class BitAccumulator {
 public:
  BitAccumulator(const BitLabeling& labeling, int dim)
      : labeling_(labeling),
        dim_(dim),
        bits_(static_cast<size_t>(labeling.total_bits(dim))),
        sums_(bits_),
        maxima_(bits_, {-INFINITY, -INFINITY}) {}

  void check_point(const IntVector& z) const {
    if (static_cast<int>(z.size()) != dim_) {
      throw ConfigError("llr: candidate dimension does not match h");
    }
    for (int v : z) {
      if (v < 0 || v >= labeling_.levels) {
        throw ConfigError("llr: candidate coordinate " + std::to_string(v) +
                          " is outside the labeled levels");
      }
    }
  }

  int bit_of(const IntVector& z, size_t bit) const {
    const int bpl = labeling_.bits_per_level;
    const size_t coord = bit / static_cast<size_t>(bpl);
    return labeling_.bit(z[coord], static_cast<int>(bit % static_cast<size_t>(bpl)));
  }

  // `metric(bit, value)` is the log-domain weight of z in the sums of `bit`.
  template <typename Metric>
  void add(const IntVector& z, Metric&& metric) {
    for (size_t b = 0; b < bits_; ++b) {
      const int v = bit_of(z, b);
      const double m = metric(b, v);
      sums_[b][static_cast<size_t>(v)].add(m);
      maxima_[b][static_cast<size_t>(v)] = std::max(maxima_[b][static_cast<size_t>(v)], m);
    }
  }

  // offset[b] is added to bit b's value before clamping.
  LlrVector finish(bool max_log, double clamp,
                   const std::vector<double>* offset = nullptr) const {
    LlrVector out;
    out.values.resize(bits_);
    out.clamped.resize(bits_);
    for (size_t b = 0; b < bits_; ++b) {
      const bool has0 = !sums_[b][0].empty();
      const bool has1 = !sums_[b][1].empty();
      if (!has0 || !has1) {
        out.values[b] = has1 ? clamp : -clamp;
        out.clamped[b] = true;
        continue;
      }
      double v = max_log ? maxima_[b][1] - maxima_[b][0]
                         : sums_[b][1].value() - sums_[b][0].value();
      if (offset) v += (*offset)[b];
      out.values[b] = std::clamp(v, -clamp, clamp);
      out.clamped[b] = false;
    }
    return out;
  }

 private:
  const BitLabeling& labeling_;
  int dim_;
  size_t bits_;
  std::vector<std::array<LogSumExp, 2>> sums_;
  std::vector<std::array<double, 2>> maxima_;
};

}  // namespace sampdec::internal
