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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sampdec/decoders.hpp"
#include "sampdec/discrete_gaussian.hpp"
#include "sampdec/soft_output.hpp"
#include "sampdec/types.hpp"

namespace sampdec {

enum class DecoderKind { kSic, kRandomized, kDerandomized, kTwoStage, kMl };
enum class Preprocessing { kNone, kLll, kMmse, kLllMmse };

DecoderKind parse_decoder_kind(const std::string& name);
std::string to_string(DecoderKind kind);
Preprocessing parse_preprocessing(const std::string& name);
std::string to_string(Preprocessing pre);
DerandMode parse_mode(const std::string& name);
std::string to_string(DerandMode mode);

struct DecoderSpec {
  DecoderKind kind = DecoderKind::kDerandomized;
  double k = 15.0;
  DerandMode mode = DerandMode::kLiteral;
  int truncation_n = kDefaultTruncation;
  int p = -1;                 // two-stage depth; negative selects fsd_depth(n)
  std::optional<double> rho;  // unset: tuned from K and n
  Preprocessing preproc = Preprocessing::kNone;
};

struct ExperimentConfig {
  int n_c = 4;      // complex antennas (square channel)
  int qam = 16;     // M of the Q^2-QAM constellation
  std::vector<double> snr_db{12.0};  // Eb/N0 grid
  DecoderSpec decoder;
  long trials = 1000;
  std::uint64_t seed = 1;
  bool oracle_ml = false;
  std::vector<double> k_sweep;  // LLR fidelity runs only
  int workers = 1;
  bool timing = false;  // wall_ms is written as 0 unless set

  int q_levels() const;
  int bits_per_level() const;
  int real_dim() const { return 2 * n_c; }
  void validate() const;
};

struct SerPoint {
  double snr_db = 0.0;
  long trials = 0;
  long bit_errors = 0;
  long sym_errors = 0;
  long frame_errors = 0;
  long ml_agree = -1;  // -1 when the ML oracle was not run
  double mean_list_size = 0.0;
  long wall_ms = 0;

  bool operator==(const SerPoint&) const = default;
};

struct LlrPoint {
  double snr_db = 0.0;
  double k = 0.0;
  long trials = 0;
  long bits = 0;                // bits with an unclamped exact MAP value
  double mean_abs_delta = 0.0;  // over those bits, list clamps included
  double max_abs_delta = 0.0;
  double sign_agree = 0.0;
  double clamp_rate = 0.0;
  double mean_list_size = 0.0;
  double mean_c1 = 0.0;  // list members inside the decoding radius
  double mean_c2 = 0.0;  // and outside it
  long wall_ms = 0;

  bool operator==(const LlrPoint&) const = default;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SerPoint> ser;
  std::vector<LlrPoint> llr;
};

// Per-trial random streams: a SplitMix64 chain over (seed, keys...).
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c);

// i.i.d. CN(0, 1) entries.
ComplexMatrix gen_channel(int n_c, Rng& rng);

// sigma of Eb/N0 = n_c / (log2(M) sigma^2), for unit-energy symbols.
double ebn0_to_sigma(double ebn0_db, int n_c, int m_level);

// Average energy of a Q^2-QAM symbol on the odd grid {+-1, +-3, ...}.
double qam_symbol_energy(int q_levels);

struct Modulated {
  IntVector levels;      // 2 n_c coordinates in {0..Q-1}: real parts, then imaginary
  ComplexVector signal;  // odd-grid symbols 2 level - (Q - 1)
};

// `bits` is coordinate-major (see BitLabeling) and holds n_c * 2 log2(Q) bits.
Modulated modulate_bits(std::span<const std::uint8_t> bits,
                        const BitLabeling& labeling, int n_c);
std::vector<std::uint8_t> demodulate_levels(const IntVector& levels,
                                            const BitLabeling& labeling);

// Real model over the integer box: h_int = 2 h_r, y_int = y_r + (Q-1) h_r 1,
// so ||y_r - h_r s|| = ||y_int - h_int z|| for s = 2z - (Q-1).
struct IntegerSystem {
  RealMatrix h;
  RealVector y;
  ConstellationBox box;
};
IntegerSystem integer_system(const ComplexMatrix& h_c, const ComplexVector& y_c,
                             int q_levels);

// Noise std dev per real dimension at the given Eb/N0: ebn0_to_sigma scaled
// by the symbol energy of the odd grid, split evenly over real and imaginary
// parts.
double real_noise_sigma(const ExperimentConfig& config, double snr_db);

// One channel use: transmitted bits and levels plus the received integer
// system. Drawn from the stream (seed, snr_index, trial, 0).
struct TrialData {
  std::vector<std::uint8_t> bits;
  Modulated tx;
  IntegerSystem sys;
};
TrialData draw_trial(const ExperimentConfig& config, size_t snr_index, long trial);

// Runs the configured decoder with its preprocessing on an integer system.
// `sigma_real` is the per-real-dimension noise std dev (used by MMSE).
// Returned candidates are in the box, ranked by distance in the original
// system.
CandidateList detect(const DecoderSpec& spec, const IntegerSystem& sys,
                     double sigma_real, Rng& rng);

ExperimentResult run_ser_experiment(const ExperimentConfig& config);
ExperimentResult run_llr_fidelity(const ExperimentConfig& config);

extern const char* const kSerCsvHeader;
extern const char* const kLlrCsvHeader;

// Writes `path` (CSV) and `path + ".json"` (config, seed and rows).
void persist_results(const ExperimentResult& result, const std::string& path);
std::string results_csv(const ExperimentResult& result);
ExperimentResult load_results(const std::string& path);

}  // namespace sampdec
