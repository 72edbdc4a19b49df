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

#include "sampdec/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sampdec/oracles.hpp"
#include "sampdec/tuning.hpp"

namespace sampdec {

namespace {

// ML agreement uses Schnorr-Euchner, not exhaustive summation, so its guard is
// looser than kExhaustiveGuard.
constexpr double kMlOracleGuard = 1 << 24;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Runs body(i) for i in [0, count) on `workers` threads. Results must be
// written to slots indexed by i; the caller reduces them in index order.
template <typename Body>
void parallel_for(long count, int workers, Body&& body) {
  const int threads =
      static_cast<int>(std::max<long>(1, std::min<long>(workers, count)));
  if (threads <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        for (long i = next++; i < count; i = next++) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double rho_for_derand(double k, int n, const std::optional<double>& rho) {
  if (rho) return *rho;
  return (k < 0.5 * std::exp(2.0 * n)) ? solve_rho_opt(k, n) : 1.0 + 1e-9;
}

double rho_for_randomized(double k, int n, const std::optional<double>& rho) {
  if (rho) return *rho;
  if (k > 1.0 && k < std::exp(2.0 * n)) return randomized_rho(k, n);
  return rho_for_derand(k, n, rho);
}

// Maps reduced-basis candidates back, clamps to the box, merges duplicates
// and ranks by distance in the original integer system.
CandidateList rerank(const CandidateList& list, const Eigen::MatrixXi* transform,
                     const IntegerSystem& sys) {
  std::map<IntVector, Candidate> merged;
  for (const Candidate& c : list.items) {
    IntVector z = c.z;
    if (transform) {
      const Eigen::VectorXi mapped =
          (*transform) * Eigen::Map<const Eigen::VectorXi>(c.z.data(),
                                                           static_cast<Eigen::Index>(c.z.size()));
      z.assign(mapped.data(), mapped.data() + mapped.size());
    }
    const IntVector raw = z;
    z = sys.box.clamp(z);
    auto [it, inserted] = merged.try_emplace(z, c);
    if (inserted) {
      it->second.z = z;
      it->second.raw_z = raw;
      continue;
    }
    Candidate& m = it->second;
    const double hi = std::max(m.log_prob, c.log_prob);
    const double lo = std::min(m.log_prob, c.log_prob);
    m.log_prob = std::min(0.0, hi + std::log1p(std::exp(lo - hi)));
    m.draws += c.draws;
  }
  CandidateList out;
  out.stats = list.stats;
  for (auto& [z, c] : merged) {
    c.dist = (sys.y - sys.h * to_real(c.z)).norm();
    out.total_prob += std::exp(c.log_prob);
    out.items.push_back(std::move(c));
  }
  std::sort(out.items.begin(), out.items.end(), closer);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct SerTrial {
  long bit_errors = 0;
  long sym_errors = 0;
  long frame_errors = 0;
  long ml_agree = 0;
  long list_size = 0;
};

struct LlrTrial {
  double sum_abs_delta = 0.0;
  double max_abs_delta = 0.0;
  long bits = 0;
  long total_bits = 0;
  long sign_agree = 0;
  long clamped = 0;
  long list_size = 0;
  long c1 = 0;
  long c2 = 0;
};

long elapsed_ms(std::chrono::steady_clock::time_point start) {
  return static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count());
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json d;
  d["kind"] = to_string(c.decoder.kind);
  d["K"] = c.decoder.k;
  d["mode"] = to_string(c.decoder.mode);
  d["N"] = c.decoder.truncation_n;
  d["p"] = c.decoder.p;
  d["rho"] = c.decoder.rho ? nlohmann::json(*c.decoder.rho) : nlohmann::json("auto");
  d["preproc"] = to_string(c.decoder.preproc);
  nlohmann::json j;
  j["n_c"] = c.n_c;
  j["qam"] = c.qam;
  j["snr_db"] = c.snr_db;
  j["decoder"] = d;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["oracle_ml"] = c.oracle_ml;
  j["k_sweep"] = c.k_sweep;
  j["timing"] = c.timing;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.n_c = j.at("n_c").get<int>();
  c.qam = j.at("qam").get<int>();
  c.snr_db = j.at("snr_db").get<std::vector<double>>();
  const auto& d = j.at("decoder");
  c.decoder.kind = parse_decoder_kind(d.at("kind").get<std::string>());
  c.decoder.k = d.at("K").get<double>();
  c.decoder.mode = parse_mode(d.at("mode").get<std::string>());
  c.decoder.truncation_n = d.at("N").get<int>();
  c.decoder.p = d.at("p").get<int>();
  if (d.at("rho").is_number()) c.decoder.rho = d.at("rho").get<double>();
  c.decoder.preproc = parse_preprocessing(d.at("preproc").get<std::string>());
  c.trials = j.at("trials").get<long>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.oracle_ml = j.at("oracle_ml").get<bool>();
  c.k_sweep = j.at("k_sweep").get<std::vector<double>>();
  c.timing = j.at("timing").get<bool>();
  return c;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

}  // namespace

DecoderKind parse_decoder_kind(const std::string& name) {
  if (name == "sic") return DecoderKind::kSic;
  if (name == "rand") return DecoderKind::kRandomized;
  if (name == "derand") return DecoderKind::kDerandomized;
  if (name == "two-stage") return DecoderKind::kTwoStage;
  if (name == "ml") return DecoderKind::kMl;
  throw ConfigError("unknown decoder '" + name + "'");
}

std::string to_string(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::kSic: return "sic";
    case DecoderKind::kRandomized: return "rand";
    case DecoderKind::kDerandomized: return "derand";
    case DecoderKind::kTwoStage: return "two-stage";
    case DecoderKind::kMl: return "ml";
  }
  return "?";
}

Preprocessing parse_preprocessing(const std::string& name) {
  if (name == "none") return Preprocessing::kNone;
  if (name == "lll") return Preprocessing::kLll;
  if (name == "mmse") return Preprocessing::kMmse;
  if (name == "lll+mmse") return Preprocessing::kLllMmse;
  throw ConfigError("unknown preprocessing '" + name + "'");
}

std::string to_string(Preprocessing pre) {
  switch (pre) {
    case Preprocessing::kNone: return "none";
    case Preprocessing::kLll: return "lll";
    case Preprocessing::kMmse: return "mmse";
    case Preprocessing::kLllMmse: return "lll+mmse";
  }
  return "?";
}

DerandMode parse_mode(const std::string& name) {
  if (name == "literal") return DerandMode::kLiteral;
  if (name == "strict") return DerandMode::kStrict;
  throw ConfigError("unknown mode '" + name + "'");
}

std::string to_string(DerandMode mode) {
  return mode == DerandMode::kLiteral ? "literal" : "strict";
}

int ExperimentConfig::q_levels() const {
  const int q = static_cast<int>(std::lround(std::sqrt(static_cast<double>(qam))));
  if (q < 2 || q * q != qam || (q & (q - 1)) != 0) {
    throw ConfigError("constellation must be Q^2-QAM with Q a power of two, got " +
                      std::to_string(qam));
  }
  return q;
}

int ExperimentConfig::bits_per_level() const {
  int b = 0;
  while ((1 << b) < q_levels()) ++b;
  return b;
}

void ExperimentConfig::validate() const {
  if (n_c < 1) throw ConfigError("config: antennas must be >= 1");
  q_levels();
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (snr_db.empty()) throw ConfigError("config: SNR grid is empty");
  for (double s : snr_db) {
    if (!std::isfinite(s)) throw ConfigError("config: SNR values must be finite");
  }
  if (!(decoder.k >= 1.0)) throw ConfigError("config: K must be >= 1");
  for (double k : k_sweep) {
    if (!(k >= 1.0)) throw ConfigError("config: K sweep values must be >= 1");
  }
  if (decoder.truncation_n < 1) throw ConfigError("config: N must be >= 1");
  if (decoder.rho && !(*decoder.rho > 1.0)) throw ConfigError("config: rho must be > 1");
  if (decoder.p > real_dim()) throw ConfigError("config: p exceeds the real dimension");
  if (workers < 1) throw ConfigError("config: workers must be >= 1");
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ (b + 0x632be59bd9b4e019ULL));
  return splitmix64(s ^ (c + 0x8cb92ba72f3d8dd7ULL));
}

ComplexMatrix gen_channel(int n_c, Rng& rng) {
  if (n_c < 1) throw ConfigError("gen_channel: antennas must be >= 1");
  std::normal_distribution<double> part(0.0, std::sqrt(0.5));
  ComplexMatrix h(n_c, n_c);
  for (int i = 0; i < n_c; ++i) {
    for (int j = 0; j < n_c; ++j) {
      const double re = part(rng);
      const double im = part(rng);
      h(i, j) = {re, im};
    }
  }
  return h;
}

double ebn0_to_sigma(double ebn0_db, int n_c, int m_level) {
  if (m_level < 2) throw ConfigError("ebn0_to_sigma: modulation level must be >= 2");
  if (n_c < 1) throw ConfigError("ebn0_to_sigma: antennas must be >= 1");
  const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
  return std::sqrt(n_c / (std::log2(static_cast<double>(m_level)) * ebn0));
}

double qam_symbol_energy(int q_levels) {
  return 2.0 * (static_cast<double>(q_levels) * q_levels - 1.0) / 3.0;
}

Modulated modulate_bits(std::span<const std::uint8_t> bits,
                        const BitLabeling& labeling, int n_c) {
  const int bpl = labeling.bits_per_level;
  const int dim = 2 * n_c;
  if (static_cast<int>(bits.size()) != dim * bpl) {
    throw ConfigError("modulate_bits: expected " + std::to_string(dim * bpl) +
                      " bits, got " + std::to_string(bits.size()));
  }
  Modulated m;
  m.levels.resize(static_cast<size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    unsigned pattern = 0;
    for (int b = 0; b < bpl; ++b) {
      pattern = (pattern << 1) | (bits[static_cast<size_t>(k * bpl + b)] & 1u);
    }
    m.levels[static_cast<size_t>(k)] = labeling.level_of(pattern);
  }
  const int offset = labeling.levels - 1;
  m.signal.resize(n_c);
  for (int k = 0; k < n_c; ++k) {
    m.signal[k] = {2.0 * m.levels[static_cast<size_t>(k)] - offset,
                   2.0 * m.levels[static_cast<size_t>(k + n_c)] - offset};
  }
  return m;
}

std::vector<std::uint8_t> demodulate_levels(const IntVector& levels,
                                            const BitLabeling& labeling) {
  const int bpl = labeling.bits_per_level;
  std::vector<std::uint8_t> bits;
  bits.reserve(levels.size() * static_cast<size_t>(bpl));
  for (int level : levels) {
    if (level < 0 || level >= labeling.levels) {
      throw ConfigError("demodulate_levels: level out of range");
    }
    for (int b = 0; b < bpl; ++b) {
      bits.push_back(static_cast<std::uint8_t>(labeling.bit(level, b)));
    }
  }
  return bits;
}

IntegerSystem integer_system(const ComplexMatrix& h_c, const ComplexVector& y_c,
                             int q_levels) {
  auto [h_r, y_r] = complex_to_real(h_c, y_c);
  IntegerSystem sys;
  sys.h = 2.0 * h_r;
  sys.y = y_r + (q_levels - 1.0) * h_r.rowwise().sum();
  sys.box = ConstellationBox::uniform(static_cast<int>(h_r.cols()), 0, q_levels - 1);
  return sys;
}

double real_noise_sigma(const ExperimentConfig& config, double snr_db) {
  const double sigma_c = ebn0_to_sigma(snr_db, config.n_c, config.qam) *
                         std::sqrt(qam_symbol_energy(config.q_levels()));
  return sigma_c / std::sqrt(2.0);
}

TrialData draw_trial(const ExperimentConfig& config, size_t snr_index, long trial) {
  if (snr_index >= config.snr_db.size()) throw ConfigError("draw_trial: SNR index out of range");
  const BitLabeling labeling = gray_label(config.q_levels());
  const double sigma_r = real_noise_sigma(config, config.snr_db[snr_index]);
  Rng rng(stream_seed(config.seed, snr_index, static_cast<std::uint64_t>(trial), 0));
  TrialData d;
  const ComplexMatrix h = gen_channel(config.n_c, rng);
  d.bits.resize(static_cast<size_t>(labeling.total_bits(config.real_dim())));
  for (auto& b : d.bits) b = static_cast<std::uint8_t>(rng() >> 63);
  d.tx = modulate_bits(d.bits, labeling, config.n_c);
  std::normal_distribution<double> noise(0.0, sigma_r);
  ComplexVector y = h * d.tx.signal;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double re = noise(rng);
    const double im = noise(rng);
    y[i] += std::complex<double>(re, im);
  }
  d.sys = integer_system(h, y, config.q_levels());
  return d;
}

CandidateList detect(const DecoderSpec& spec, const IntegerSystem& sys,
                     double sigma_real, Rng& rng) {
  const int n = static_cast<int>(sys.h.cols());
  if (spec.kind == DecoderKind::kMl) {
    CandidateList list;
    list.items.push_back(ml_sphere_decode(sys.h, sys.y, sys.box));
    list.total_prob = 1.0;
    return list;
  }

  RealMatrix h = sys.h;
  RealVector y = sys.y;
  if (spec.preproc == Preprocessing::kMmse || spec.preproc == Preprocessing::kLllMmse) {
    // Regularize around the constellation center (Q-1)/2 with the
    // noise-to-symbol amplitude ratio of the odd-grid model.
    const int q = sys.box.upper.front() + 1;
    const double alpha = sigma_real / std::sqrt(qam_symbol_energy(q) / 2.0);
    ExtendedSystem ext = mmse_extend(h, y, 2.0 * alpha);
    ext.y_ext.tail(n).setConstant((q - 1.0) * alpha);
    h = std::move(ext.h_ext);
    y = std::move(ext.y_ext);
  }
  std::optional<ReducedBasis> reduced;
  if (spec.preproc == Preprocessing::kLll || spec.preproc == Preprocessing::kLllMmse) {
    reduced = lll_reduce(h);
    h = reduced->basis;
  }
  const std::optional<ConstellationBox> box =
      reduced ? std::nullopt : std::optional<ConstellationBox>(sys.box);

  CandidateList list;
  switch (spec.kind) {
    case DecoderKind::kSic: {
      const QRFactors qr = qr_decompose(h);
      Candidate c = sic_decode(qr, qr.rotate(y));
      list.items.push_back(std::move(c));
      list.total_prob = 1.0;
      break;
    }
    case DecoderKind::kRandomized: {
      const QRFactors qr = qr_decompose(h);
      const SamplerParams params = SamplerParams::from_rho(
          rho_for_randomized(spec.k, n, spec.rho), qr.min_diag(),
          spec.truncation_n, spec.k);
      list = randomized_decode(qr, qr.rotate(y), static_cast<int>(std::lround(spec.k)),
                               params, rng, box);
      break;
    }
    case DecoderKind::kDerandomized: {
      const QRFactors qr = qr_decompose(h);
      DerandConfig cfg;
      cfg.nominal_k = spec.k;
      cfg.mode = spec.mode;
      cfg.sampler = SamplerParams::from_rho(rho_for_derand(spec.k, n, spec.rho),
                                            qr.min_diag(), spec.truncation_n, spec.k);
      cfg.box = box;
      list = derandomized_decode(qr, qr.rotate(y), cfg);
      break;
    }
    case DecoderKind::kTwoStage: {
      DerandConfig cfg;
      cfg.nominal_k = spec.k;
      cfg.mode = spec.mode;
      // a_param is recomputed by two_stage_decode from rho.
      cfg.sampler = SamplerParams::from_rho(rho_for_derand(spec.k, n, spec.rho), 1.0,
                                            spec.truncation_n, spec.k);
      cfg.box = box;
      const int p = spec.p >= 0 ? spec.p : fsd_depth(n);
      list = two_stage_decode(h, y, p, cfg);
      break;
    }
    case DecoderKind::kMl:
      break;
  }
  return rerank(list, reduced ? &reduced->transform : nullptr, sys);
}

ExperimentResult run_ser_experiment(const ExperimentConfig& config) {
  config.validate();
  const BitLabeling labeling = gray_label(config.q_levels());
  const int dim = config.real_dim();
  const ConstellationBox full = ConstellationBox::uniform(dim, 0, config.q_levels() - 1);
  if (config.oracle_ml && full.size(kMlOracleGuard) > kMlOracleGuard) {
    throw NumericalError("ML oracle requested for a box above the guard of " +
                         std::to_string(static_cast<long>(kMlOracleGuard)) + " points");
  }

  ExperimentResult result;
  result.config = config;
  for (size_t s = 0; s < config.snr_db.size(); ++s) {
    const auto start = std::chrono::steady_clock::now();
    const double sigma_r = real_noise_sigma(config, config.snr_db[s]);
    std::vector<SerTrial> trials(static_cast<size_t>(config.trials));

    parallel_for(config.trials, config.workers, [&](long t) {
      const TrialData d = draw_trial(config, s, t);
      Rng decoder_rng(stream_seed(config.seed, s, t, 1));
      const CandidateList list = detect(config.decoder, d.sys, sigma_r, decoder_rng);
      const IntVector& z = list.best().z;

      SerTrial& out = trials[static_cast<size_t>(t)];
      const auto bits = demodulate_levels(z, labeling);
      for (size_t b = 0; b < bits.size(); ++b) out.bit_errors += bits[b] != d.bits[b];
      for (int k = 0; k < config.n_c; ++k) {
        const size_t re = static_cast<size_t>(k);
        const size_t im = static_cast<size_t>(k + config.n_c);
        out.sym_errors += (z[re] != d.tx.levels[re] || z[im] != d.tx.levels[im]);
      }
      out.frame_errors = out.sym_errors > 0;
      out.list_size = static_cast<long>(list.size());
      if (config.oracle_ml) {
        out.ml_agree = ml_sphere_decode(d.sys.h, d.sys.y, d.sys.box).z == z;
      }
    });

    SerPoint p;
    p.snr_db = config.snr_db[s];
    p.trials = config.trials;
    long list_total = 0;
    long agree = 0;
    for (const SerTrial& t : trials) {
      p.bit_errors += t.bit_errors;
      p.sym_errors += t.sym_errors;
      p.frame_errors += t.frame_errors;
      agree += t.ml_agree;
      list_total += t.list_size;
    }
    p.ml_agree = config.oracle_ml ? agree : -1;
    p.mean_list_size = static_cast<double>(list_total) / static_cast<double>(config.trials);
    p.wall_ms = config.timing ? elapsed_ms(start) : 0;
    result.ser.push_back(p);
  }
  return result;
}

ExperimentResult run_llr_fidelity(const ExperimentConfig& config) {
  config.validate();
  const BitLabeling labeling = gray_label(config.q_levels());
  const int dim = config.real_dim();
  const ConstellationBox full = ConstellationBox::uniform(dim, 0, config.q_levels() - 1);
  if (full.size(kExhaustiveGuard) > kExhaustiveGuard) {
    throw NumericalError("LLR fidelity needs exact MAP; box exceeds the exhaustive guard");
  }
  const std::vector<double> sweep =
      config.k_sweep.empty() ? std::vector<double>{config.decoder.k} : config.k_sweep;

  ExperimentResult result;
  result.config = config;
  for (size_t s = 0; s < config.snr_db.size(); ++s) {
    const double sigma_r = real_noise_sigma(config, config.snr_db[s]);
    for (size_t ki = 0; ki < sweep.size(); ++ki) {
      const auto start = std::chrono::steady_clock::now();
      DecoderSpec spec = config.decoder;
      spec.k = sweep[ki];
      std::vector<LlrTrial> trials(static_cast<size_t>(config.trials));

      parallel_for(config.trials, config.workers, [&](long t) {
        // Same channel and noise for every K of the sweep.
        const TrialData d = draw_trial(config, s, t);
        Rng decoder_rng(stream_seed(config.seed, s, t, 1 + ki));
        const CandidateList list = detect(spec, d.sys, sigma_r, decoder_rng);
        const LlrVector exact = exact_map_llr(d.sys.h, d.sys.y, sigma_r, labeling);
        const LlrVector approx = list_llr(list, d.sys.h, d.sys.y, sigma_r, labeling);

        LlrTrial& out = trials[static_cast<size_t>(t)];
        for (size_t b = 0; b < exact.size(); ++b) {
          ++out.total_bits;
          out.clamped += approx.clamped[b];
          out.sign_agree += (approx.values[b] > 0.0) == (exact.values[b] > 0.0);
          if (exact.clamped[b]) continue;
          const double delta = std::fabs(approx.values[b] - exact.values[b]);
          out.sum_abs_delta += delta;
          out.max_abs_delta = std::max(out.max_abs_delta, delta);
          ++out.bits;
        }
        out.list_size = static_cast<long>(list.size());
        const QRFactors qr = qr_decompose(d.sys.h);
        const double rho = rho_for_derand(spec.k, dim, spec.rho);
        const double radius = std::sqrt(2.0 * dim / rho) * qr.min_diag();
        const ListSplit split = split_by_radius(list, d.sys.h, d.sys.y, radius);
        out.c1 = split.inside;
        out.c2 = split.outside;
      });

      LlrPoint p;
      p.snr_db = config.snr_db[s];
      p.k = spec.k;
      p.trials = config.trials;
      double sum_delta = 0.0;
      long total_bits = 0, sign = 0, clamped = 0, list_total = 0, c1 = 0, c2 = 0;
      for (const LlrTrial& t : trials) {
        sum_delta += t.sum_abs_delta;
        p.max_abs_delta = std::max(p.max_abs_delta, t.max_abs_delta);
        p.bits += t.bits;
        total_bits += t.total_bits;
        sign += t.sign_agree;
        clamped += t.clamped;
        list_total += t.list_size;
        c1 += t.c1;
        c2 += t.c2;
      }
      const double n_trials = static_cast<double>(config.trials);
      p.mean_abs_delta = p.bits > 0 ? sum_delta / static_cast<double>(p.bits) : 0.0;
      p.sign_agree = static_cast<double>(sign) / static_cast<double>(total_bits);
      p.clamp_rate = static_cast<double>(clamped) / static_cast<double>(total_bits);
      p.mean_list_size = static_cast<double>(list_total) / n_trials;
      p.mean_c1 = static_cast<double>(c1) / n_trials;
      p.mean_c2 = static_cast<double>(c2) / n_trials;
      p.wall_ms = config.timing ? elapsed_ms(start) : 0;
      result.llr.push_back(p);
    }
  }
  return result;
}

const char* const kSerCsvHeader =
    "snr_db,trials,bit_errors,sym_errors,frame_errors,ml_agree,mean_list_size,wall_ms";
const char* const kLlrCsvHeader =
    "snr_db,K,trials,bits,mean_abs_delta,max_abs_delta,sign_agree,clamp_rate,"
    "mean_list_size,mean_c1,mean_c2,wall_ms";

std::string results_csv(const ExperimentResult& result) {
  std::ostringstream out;
  if (!result.llr.empty()) {
    out << kLlrCsvHeader << '\n';
    for (const LlrPoint& p : result.llr) {
      out << format_double(p.snr_db) << ',' << format_double(p.k) << ',' << p.trials
          << ',' << p.bits << ',' << format_double(p.mean_abs_delta) << ','
          << format_double(p.max_abs_delta) << ',' << format_double(p.sign_agree)
          << ',' << format_double(p.clamp_rate) << ','
          << format_double(p.mean_list_size) << ',' << format_double(p.mean_c1)
          << ',' << format_double(p.mean_c2) << ',' << p.wall_ms << '\n';
    }
    return out.str();
  }
  out << kSerCsvHeader << '\n';
  for (const SerPoint& p : result.ser) {
    out << format_double(p.snr_db) << ',' << p.trials << ',' << p.bit_errors << ','
        << p.sym_errors << ',' << p.frame_errors << ',' << p.ml_agree << ','
        << format_double(p.mean_list_size) << ',' << p.wall_ms << '\n';
  }
  return out.str();
}

void persist_results(const ExperimentResult& result, const std::string& path) {
  auto write = [](const std::string& file, const std::string& body) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + file + "' for writing");
    out << body;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + file + "' failed");
  };
  write(path, results_csv(result));

  nlohmann::json j;
  j["config"] = config_to_json(result.config);
  j["seed"] = result.config.seed;
  j["kind"] = result.llr.empty() ? "ser" : "llr";
  j["rows"] = result.llr.empty() ? result.ser.size() : result.llr.size();
  write(path + ".json", j.dump(2) + "\n");
}

ExperimentResult load_results(const std::string& path) {
  auto read = [](const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + file + "' for reading");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  ExperimentResult result;
  const nlohmann::json j = nlohmann::json::parse(read(path + ".json"));
  result.config = config_from_json(j.at("config"));
  const bool llr = j.at("kind").get<std::string>() == "llr";

  std::stringstream csv(read(path));
  std::string line;
  std::getline(csv, line);
  if (line != (llr ? kLlrCsvHeader : kSerCsvHeader)) {
    throw std::runtime_error("'" + path + "': unexpected CSV header");
  }
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (llr) {
      if (f.size() != 12) throw std::runtime_error("'" + path + "': bad LLR row");
      LlrPoint p;
      p.snr_db = std::stod(f[0]);
      p.k = std::stod(f[1]);
      p.trials = std::stol(f[2]);
      p.bits = std::stol(f[3]);
      p.mean_abs_delta = std::stod(f[4]);
      p.max_abs_delta = std::stod(f[5]);
      p.sign_agree = std::stod(f[6]);
      p.clamp_rate = std::stod(f[7]);
      p.mean_list_size = std::stod(f[8]);
      p.mean_c1 = std::stod(f[9]);
      p.mean_c2 = std::stod(f[10]);
      p.wall_ms = std::stol(f[11]);
      result.llr.push_back(p);
    } else {
      if (f.size() != 8) throw std::runtime_error("'" + path + "': bad SER row");
      SerPoint p;
      p.snr_db = std::stod(f[0]);
      p.trials = std::stol(f[1]);
      p.bit_errors = std::stol(f[2]);
      p.sym_errors = std::stol(f[3]);
      p.frame_errors = std::stol(f[4]);
      p.ml_agree = std::stol(f[5]);
      p.mean_list_size = std::stod(f[6]);
      p.wall_ms = std::stol(f[7]);
      result.ser.push_back(p);
    }
  }
  return result;
}

}  // namespace sampdec
