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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "sampdec/oracles.hpp"
#include "sampdec/sim.hpp"

namespace sampdec {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("sampdec_" + name)).string();
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n_c = 2;
  c.qam = 16;
  c.snr_db = {8.0, 14.0};
  c.trials = 200;
  c.seed = 77;
  return c;
}

TEST(GenChannel, DeterministicAndUnitVariance) {
  Rng a(5);
  Rng b(5);
  EXPECT_EQ(gen_channel(4, a), gen_channel(4, b));

  Rng rng(6);
  double power = 0.0;
  double cross = 0.0;
  const int blocks = 1000;
  for (int i = 0; i < blocks; ++i) {
    const ComplexMatrix h = gen_channel(10, rng);
    for (const auto& v : h.reshaped()) {
      power += std::norm(v);
      cross += v.real() * v.imag();
    }
  }
  const double count = blocks * 100.0;
  // |h|^2 is exponential with unit mean and variance; Re*Im has variance 1/4.
  EXPECT_NEAR(power / count, 1.0, 3.0 / std::sqrt(count));
  EXPECT_NEAR(cross / count, 0.0, 3.0 * 0.5 / std::sqrt(count));
  EXPECT_THROW(gen_channel(0, rng), ConfigError);
}

TEST(EbN0ToSigma, Values) {
  const double s0 = ebn0_to_sigma(0.0, 10, 64);
  EXPECT_NEAR(s0 * s0, 10.0 / 6.0, 1e-12);
  const double s3 = ebn0_to_sigma(10.0 * std::log10(2.0), 10, 64);
  EXPECT_NEAR(s3 * s3, 0.5 * s0 * s0, 1e-12);
  const double s10 = ebn0_to_sigma(10.0, 4, 16);
  EXPECT_NEAR(s10 * s10, 0.1, 1e-12);
  EXPECT_THROW(ebn0_to_sigma(0.0, 4, 1), ConfigError);
}

TEST(Modulation, CornerConventionAndRoundTrip) {
  const BitLabeling lab4 = gray_label(2);
  const std::vector<std::uint8_t> zeros{0, 0};
  const Modulated m = modulate_bits(zeros, lab4, 1);
  EXPECT_EQ(m.signal[0], std::complex<double>(-1.0, -1.0));
  EXPECT_EQ(m.levels, (IntVector{0, 0}));

  const BitLabeling lab = gray_label(4);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint8_t> bits(3 * 2 * 2);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1);
    const Modulated t = modulate_bits(bits, lab, 3);
    EXPECT_EQ(demodulate_levels(t.levels, lab), bits);
  }
  EXPECT_THROW(modulate_bits(std::vector<std::uint8_t>(5), lab, 1), ConfigError);
}

TEST(Modulation, SixteenQamIsGrayBijection) {
  const BitLabeling lab = gray_label(4);
  std::set<std::pair<double, double>> symbols;
  std::map<std::pair<double, double>, unsigned> word_of;
  for (unsigned w = 0; w < 16; ++w) {
    const std::vector<std::uint8_t> bits{static_cast<std::uint8_t>((w >> 3) & 1),
                                         static_cast<std::uint8_t>((w >> 2) & 1),
                                         static_cast<std::uint8_t>((w >> 1) & 1),
                                         static_cast<std::uint8_t>(w & 1)};
    const auto s = modulate_bits(bits, lab, 1).signal[0];
    EXPECT_TRUE(symbols.insert({s.real(), s.imag()}).second);
    word_of[{s.real(), s.imag()}] = w;
  }
  EXPECT_EQ(symbols.size(), 16u);
  for (const auto& [s, w] : word_of) {
    for (const auto& [t, v] : word_of) {
      const double d = std::fabs(s.first - t.first) + std::fabs(s.second - t.second);
      if (d == 2.0) EXPECT_EQ(__builtin_popcount(w ^ v), 1);
    }
  }
}

TEST(IntegerSystem, PreservesDistances) {
  Rng rng(2);
  for (int q : {2, 4, 8}) {
    const ComplexMatrix h = gen_channel(3, rng);
    const ComplexVector y = ComplexVector::Random(3) * 5.0;
    const IntegerSystem sys = integer_system(h, y, q);
    auto [hr, yr] = complex_to_real(h, y);
    for (int trial = 0; trial < 20; ++trial) {
      IntVector z(6);
      RealVector s(6);
      for (int k = 0; k < 6; ++k) {
        z[static_cast<size_t>(k)] = static_cast<int>(rng() % static_cast<unsigned>(q));
        s[k] = 2.0 * z[static_cast<size_t>(k)] - (q - 1);
      }
      EXPECT_NEAR((yr - hr * s).norm(), (sys.y - sys.h * to_real(z)).norm(), 1e-10);
    }
    EXPECT_EQ(sys.box.upper, IntVector(6, q - 1));
  }
}

TEST(DrawTrial, NoiseMatchesCalibration) {
  ExperimentConfig c = small_config();
  c.snr_db = {5.0};
  const double sigma = real_noise_sigma(c, 5.0);
  double sum = 0.0;
  double sum2 = 0.0;
  long count = 0;
  for (long t = 0; count < 100000; ++t) {
    const TrialData d = draw_trial(c, 0, t);
    const RealVector noise = d.sys.y - d.sys.h * to_real(d.tx.levels);
    for (Eigen::Index i = 0; i < noise.size(); ++i) {
      sum += noise[i];
      sum2 += noise[i] * noise[i];
      ++count;
    }
  }
  const double var = sum2 / static_cast<double>(count);
  // The sample variance of Gaussian noise has relative std dev sqrt(2 / count).
  EXPECT_NEAR(var / (sigma * sigma), 1.0, 3.0 * std::sqrt(2.0 / static_cast<double>(count)));
  EXPECT_NEAR(sum / static_cast<double>(count), 0.0, 3.0 * sigma / std::sqrt(static_cast<double>(count)));
  // Total complex noise power: sigma_c^2 = ebn0 sigma^2 times the symbol energy.
  const double sc = ebn0_to_sigma(5.0, c.n_c, c.qam);
  EXPECT_NEAR(2.0 * sigma * sigma, sc * sc * qam_symbol_energy(4), 1e-12);
}

TEST(DrawTrial, IsDeterministic) {
  const ExperimentConfig c = small_config();
  const TrialData a = draw_trial(c, 1, 17);
  const TrialData b = draw_trial(c, 1, 17);
  EXPECT_EQ(a.bits, b.bits);
  EXPECT_EQ(a.sys.y, b.sys.y);
  EXPECT_NE(draw_trial(c, 1, 18).sys.y, a.sys.y);
}

TEST(Config, Validation) {
  ExperimentConfig c = small_config();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.q_levels(), 4);
  EXPECT_EQ(c.bits_per_level(), 2);
  auto bad = [&](auto mutate) {
    ExperimentConfig d = small_config();
    mutate(d);
    EXPECT_THROW(d.validate(), ConfigError);
  };
  bad([](ExperimentConfig& d) { d.trials = 0; });
  bad([](ExperimentConfig& d) { d.snr_db = {1.0, NAN}; });
  bad([](ExperimentConfig& d) { d.snr_db.clear(); });
  bad([](ExperimentConfig& d) { d.qam = 32; });
  bad([](ExperimentConfig& d) { d.qam = 36; });
  bad([](ExperimentConfig& d) { d.decoder.k = 0.5; });
  bad([](ExperimentConfig& d) { d.decoder.rho = 1.0; });
  bad([](ExperimentConfig& d) { d.decoder.p = 9; });
  bad([](ExperimentConfig& d) { d.workers = 0; });
  EXPECT_THROW(parse_decoder_kind("viterbi"), ConfigError);
  EXPECT_THROW(parse_preprocessing("zf"), ConfigError);
  EXPECT_THROW(parse_mode("loose"), ConfigError);
  for (auto k : {DecoderKind::kSic, DecoderKind::kRandomized, DecoderKind::kDerandomized,
                 DecoderKind::kTwoStage, DecoderKind::kMl}) {
    EXPECT_EQ(parse_decoder_kind(to_string(k)), k);
  }
  for (auto p : {Preprocessing::kNone, Preprocessing::kLll, Preprocessing::kMmse,
                 Preprocessing::kLllMmse}) {
    EXPECT_EQ(parse_preprocessing(to_string(p)), p);
  }
}

TEST(Detect, AllPipelinesRecoverNoiselessSymbols) {
  ExperimentConfig c = small_config();
  c.snr_db = {80.0};
  for (auto kind : {DecoderKind::kSic, DecoderKind::kRandomized, DecoderKind::kDerandomized,
                    DecoderKind::kTwoStage, DecoderKind::kMl}) {
    for (auto pre : {Preprocessing::kNone, Preprocessing::kLll, Preprocessing::kMmse,
                     Preprocessing::kLllMmse}) {
      DecoderSpec spec;
      spec.kind = kind;
      spec.preproc = pre;
      for (long t = 0; t < 20; ++t) {
        const TrialData d = draw_trial(c, 0, t);
        Rng rng(t);
        const CandidateList list = detect(spec, d.sys, real_noise_sigma(c, 80.0), rng);
        EXPECT_EQ(list.best().z, d.tx.levels) << to_string(kind) << " " << to_string(pre);
        std::set<IntVector> seen;
        for (const auto& cand : list.items) {
          EXPECT_TRUE(d.sys.box.contains(cand.z));
          EXPECT_TRUE(seen.insert(cand.z).second);
          EXPECT_NEAR(cand.dist, (d.sys.y - d.sys.h * to_real(cand.z)).norm(), 1e-9);
        }
      }
    }
  }
}

TEST(RunSerExperiment, HighSnrHasNoErrors) {
  ExperimentConfig c = small_config();
  c.snr_db = {60.0};
  c.trials = 100;
  for (auto kind : {DecoderKind::kSic, DecoderKind::kRandomized, DecoderKind::kDerandomized,
                    DecoderKind::kTwoStage}) {
    c.decoder.kind = kind;
    const ExperimentResult r = run_ser_experiment(c);
    ASSERT_EQ(r.ser.size(), 1u);
    EXPECT_EQ(r.ser[0].bit_errors, 0);
    EXPECT_EQ(r.ser[0].sym_errors, 0);
    EXPECT_EQ(r.ser[0].frame_errors, 0);
    EXPECT_EQ(r.ser[0].ml_agree, -1);
  }
}

TEST(RunSerExperiment, UnitBudgetMatchesSic) {
  for (auto pre : {Preprocessing::kNone, Preprocessing::kMmse, Preprocessing::kLllMmse}) {
    ExperimentConfig c = small_config();
    c.decoder.preproc = pre;
    c.decoder.kind = DecoderKind::kSic;
    const ExperimentResult sic = run_ser_experiment(c);
    c.decoder.kind = DecoderKind::kDerandomized;
    c.decoder.k = 1.0;
    const ExperimentResult derand = run_ser_experiment(c);
    ASSERT_EQ(sic.ser.size(), derand.ser.size());
    for (size_t i = 0; i < sic.ser.size(); ++i) {
      EXPECT_EQ(sic.ser[i].bit_errors, derand.ser[i].bit_errors);
      EXPECT_EQ(sic.ser[i].sym_errors, derand.ser[i].sym_errors);
      EXPECT_EQ(sic.ser[i].frame_errors, derand.ser[i].frame_errors);
      EXPECT_GT(sic.ser[i].sym_errors, 0);
    }
  }
}

TEST(RunSerExperiment, CountsAreBounded) {
  ExperimentConfig c = small_config();
  c.oracle_ml = true;
  c.decoder.kind = DecoderKind::kTwoStage;
  const ExperimentResult r = run_ser_experiment(c);
  for (const SerPoint& p : r.ser) {
    EXPECT_LE(p.bit_errors, p.trials * 2 * c.n_c * c.bits_per_level());
    EXPECT_LE(p.sym_errors, p.trials * c.n_c);
    EXPECT_LE(p.frame_errors, p.trials);
    EXPECT_LE(p.sym_errors, p.bit_errors);
    EXPECT_GE(p.ml_agree, 0);
    EXPECT_LE(p.ml_agree, p.trials);
    EXPECT_GE(p.mean_list_size, 1.0);
    EXPECT_EQ(p.wall_ms, 0);
  }
  EXPECT_LE(r.ser[1].sym_errors, r.ser[0].sym_errors);
}

TEST(RunSerExperiment, MlDecoderAgreesWithOracle) {
  ExperimentConfig c = small_config();
  c.oracle_ml = true;
  c.decoder.kind = DecoderKind::kMl;
  for (const SerPoint& p : run_ser_experiment(c).ser) EXPECT_EQ(p.ml_agree, p.trials);
}

TEST(RunSerExperiment, OracleGuard) {
  ExperimentConfig c;
  c.n_c = 8;
  c.qam = 64;
  c.trials = 1;
  c.oracle_ml = true;
  EXPECT_THROW(run_ser_experiment(c), NumericalError);
}

TEST(RunSerExperiment, IndependentOfWorkerCount) {
  ExperimentConfig c = small_config();
  c.decoder.kind = DecoderKind::kRandomized;
  c.oracle_ml = true;
  const std::string one = results_csv(run_ser_experiment(c));
  c.workers = 4;
  EXPECT_EQ(results_csv(run_ser_experiment(c)), one);
}

TEST(RunSerExperiment, DerandomizedListsAreLargerThanRandomized) {
  ExperimentConfig c;
  c.n_c = 4;
  c.qam = 16;
  c.trials = 300;
  c.decoder.kind = DecoderKind::kDerandomized;
  const double derand = run_ser_experiment(c).ser[0].mean_list_size;
  c.decoder.kind = DecoderKind::kRandomized;
  const double rand = run_ser_experiment(c).ser[0].mean_list_size;
  EXPECT_GE(derand, rand);
}

ExperimentConfig llr_config() {
  ExperimentConfig c;
  c.n_c = 2;
  c.qam = 4;
  c.snr_db = {6.0};
  c.trials = 300;
  c.seed = 3;
  c.k_sweep = {1, 5, 25, 100};
  return c;
}

TEST(RunLlrFidelity, FullListIsExact) {
  ExperimentConfig c = llr_config();
  c.trials = 60;
  c.k_sweep = {1e9};
  // MMSE keeps the centers near the box; the window then reaches every level.
  c.decoder.preproc = Preprocessing::kMmse;
  c.decoder.truncation_n = 4;
  const ExperimentResult r = run_llr_fidelity(c);
  ASSERT_EQ(r.llr.size(), 1u);
  EXPECT_EQ(r.llr[0].mean_list_size, 16.0);
  EXPECT_LT(r.llr[0].mean_abs_delta, 1e-9);
  EXPECT_LT(r.llr[0].max_abs_delta, 1e-9);
  EXPECT_EQ(r.llr[0].sign_agree, 1.0);
}

TEST(RunLlrFidelity, ErrorShrinksWithBudget) {
  ExperimentConfig c = llr_config();
  const ExperimentResult r = run_llr_fidelity(c);
  ASSERT_EQ(r.llr.size(), 4u);
  EXPECT_EQ(r.llr[0].mean_list_size, 1.0);
  EXPECT_EQ(r.llr[0].clamp_rate, 1.0);
  for (size_t i = 1; i < r.llr.size(); ++i) {
    EXPECT_LE(r.llr[i].mean_abs_delta, r.llr[i - 1].mean_abs_delta);
    EXPECT_GE(r.llr[i].mean_list_size, r.llr[i - 1].mean_list_size);
  }
  for (const LlrPoint& p : r.llr) {
    EXPECT_NEAR(p.mean_c1 + p.mean_c2, p.mean_list_size, 1e-12);
  }
  c.workers = 3;
  EXPECT_EQ(results_csv(run_llr_fidelity(c)), results_csv(r));
}

TEST(RunLlrFidelity, Guard) {
  ExperimentConfig c = llr_config();
  c.n_c = 4;
  c.qam = 64;
  EXPECT_THROW(run_llr_fidelity(c), NumericalError);
}

TEST(Persistence, EmptyResultIsHeaderOnly) {
  ExperimentResult r;
  EXPECT_EQ(results_csv(r), std::string(kSerCsvHeader) + "\n");
}

ExperimentResult toy_result() {
  ExperimentResult r;
  r.config = small_config();
  r.config.decoder.rho = 4.5;
  r.config.oracle_ml = true;
  SerPoint a;
  a.snr_db = 8;
  a.trials = 200;
  a.bit_errors = 31;
  a.sym_errors = 20;
  a.frame_errors = 17;
  a.ml_agree = 190;
  a.mean_list_size = 3.25;
  SerPoint b = a;
  b.snr_db = 14;
  b.bit_errors = 2;
  b.sym_errors = 1;
  b.frame_errors = 1;
  b.ml_agree = 200;
  b.mean_list_size = 0.1;
  r.ser = {a, b};
  return r;
}

TEST(Persistence, GoldenCsv) {
  const std::string expected =
      "snr_db,trials,bit_errors,sym_errors,frame_errors,ml_agree,mean_list_size,wall_ms\n"
      "8,200,31,20,17,190,3.25,0\n"
      "14,200,2,1,1,200,0.10000000000000001,0\n";
  EXPECT_EQ(results_csv(toy_result()), expected);
}

TEST(Persistence, RoundTripAndByteIdenticalRewrite) {
  const std::string path = temp_path("roundtrip.csv");
  const ExperimentResult r = toy_result();
  persist_results(r, path);
  const std::string csv = read_file(path);
  const std::string json = read_file(path + ".json");
  persist_results(r, path);
  EXPECT_EQ(read_file(path), csv);
  EXPECT_EQ(read_file(path + ".json"), json);
  EXPECT_NE(json.find("\"seed\": 77"), std::string::npos);

  const ExperimentResult back = load_results(path);
  EXPECT_EQ(back.ser, r.ser);
  EXPECT_EQ(back.config.seed, r.config.seed);
  EXPECT_EQ(back.config.snr_db, r.config.snr_db);
  EXPECT_EQ(back.config.decoder.rho, r.config.decoder.rho);
  EXPECT_EQ(back.config.oracle_ml, true);

  ExperimentConfig lc = llr_config();
  lc.trials = 20;
  const ExperimentResult llr = run_llr_fidelity(lc);
  persist_results(llr, path);
  const ExperimentResult llr_back = load_results(path);
  EXPECT_EQ(llr_back.llr, llr.llr);
  EXPECT_EQ(llr_back.config.k_sweep, lc.k_sweep);
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".json");
}

TEST(Persistence, ErrorsNameThePath) {
  const std::string path = "/nonexistent_dir_for_sampdec/out.csv";
  try {
    persist_results(toy_result(), path);
    FAIL() << "expected an I/O error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(path), std::string::npos);
  }
  EXPECT_THROW(load_results(path), std::runtime_error);
}

}  // namespace
}  // namespace sampdec
