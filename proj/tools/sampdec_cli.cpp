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

// Command-line front end: single-vector decoding, SER/BER and LLR-fidelity
// experiments, and the tuning formulas.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sampdec/decoders.hpp"
#include "sampdec/lattice.hpp"
#include "sampdec/oracles.hpp"
#include "sampdec/sim.hpp"
#include "sampdec/tuning.hpp"

namespace {

using sampdec::ConfigError;
using sampdec::NumericalError;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct TextMatrix {
  long rows = 0;
  long cols = 0;
  std::vector<double> values;
};

TextMatrix read_text_matrix(const std::string& path, bool complex_entries) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  TextMatrix m;
  if (!(in >> m.rows >> m.cols) || m.rows < 1 || m.cols < 1) {
    throw ConfigError("'" + path + "': first line must be 'rows cols'");
  }
  const long count = m.rows * m.cols * (complex_entries ? 2 : 1);
  m.values.reserve(static_cast<size_t>(count));
  double v = 0.0;
  while (in >> v) m.values.push_back(v);
  if (!in.eof()) throw ConfigError("'" + path + "': non-numeric entry");
  if (static_cast<long>(m.values.size()) != count) {
    throw ConfigError("'" + path + "': expected " + std::to_string(count) +
                      " values, found " + std::to_string(m.values.size()));
  }
  return m;
}

sampdec::RealMatrix to_real_matrix(const TextMatrix& m) {
  sampdec::RealMatrix out(m.rows, m.cols);
  for (long i = 0; i < m.rows; ++i) {
    for (long j = 0; j < m.cols; ++j) out(i, j) = m.values[static_cast<size_t>(i * m.cols + j)];
  }
  return out;
}

sampdec::ComplexMatrix to_complex_matrix(const TextMatrix& m) {
  sampdec::ComplexMatrix out(m.rows, m.cols);
  for (long i = 0; i < m.rows; ++i) {
    for (long j = 0; j < m.cols; ++j) {
      const size_t k = static_cast<size_t>(2 * (i * m.cols + j));
      out(i, j) = {m.values[k], m.values[k + 1]};
    }
  }
  return out;
}

// "start:step:stop" (inclusive) or a single value.
std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad SNR range '" + text + "'");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) {
    throw ConfigError("SNR range must be start:step:stop with step > 0, got '" + text + "'");
  }
  std::vector<double> grid;
  const long steps = std::lround(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
  for (long i = 0; i <= steps; ++i) grid.push_back(parts[0] + static_cast<double>(i) * parts[1]);
  return grid;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad list entry '" + item + "'");
    }
  }
  if (values.empty()) throw ConfigError("empty list");
  return values;
}

int parse_qam(const std::string& text) {
  if (text.size() < 4 || text.substr(text.size() - 3) != "qam") {
    throw ConfigError("modulation must look like 16qam, got '" + text + "'");
  }
  try {
    return std::stoi(text.substr(0, text.size() - 3));
  } catch (const std::exception&) {
    throw ConfigError("bad modulation '" + text + "'");
  }
}

std::optional<double> parse_rho(const std::string& text) {
  if (text == "auto") return std::nullopt;
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw ConfigError("rho must be a number or 'auto', got '" + text + "'");
  }
}

bool parse_on_off(const std::string& text) {
  if (text == "on") return true;
  if (text == "off") return false;
  throw ConfigError("expected on|off, got '" + text + "'");
}

nlohmann::json candidate_json(const sampdec::Candidate& c) {
  return {{"z", c.z}, {"dist", c.dist}, {"log_prob", c.log_prob}, {"draws", c.draws}};
}

struct DecodeArgs {
  std::string matrix;
  std::string y;
  bool complex_input = false;
  std::string decoder = "derand";
  double k = 15.0;
  std::string mode = "literal";
  int n_trunc = sampdec::kDefaultTruncation;
  int p = -1;
  std::string rho = "auto";
  std::string box;
  std::uint64_t seed = 1;
  std::string out;
};

int run_decode(const DecodeArgs& a) {
  sampdec::RealMatrix h;
  sampdec::RealVector y;
  const TextMatrix hm = read_text_matrix(a.matrix, a.complex_input);
  const TextMatrix ym = read_text_matrix(a.y, a.complex_input);
  if (ym.cols != 1) throw ConfigError("y must be a single column");
  if (a.complex_input) {
    std::tie(h, y) = sampdec::complex_to_real(to_complex_matrix(hm),
                                              to_complex_matrix(ym).col(0));
  } else {
    h = to_real_matrix(hm);
    y = to_real_matrix(ym).col(0);
  }
  if (y.size() != h.rows()) throw ConfigError("y length does not match matrix rows");
  const int n = static_cast<int>(h.cols());

  std::optional<sampdec::ConstellationBox> box;
  if (!a.box.empty()) {
    const auto colon = a.box.find(':');
    if (colon == std::string::npos) throw ConfigError("--box must be lo:hi");
    try {
      box = sampdec::ConstellationBox::uniform(n, std::stoi(a.box.substr(0, colon)),
                                               std::stoi(a.box.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw ConfigError("--box must be lo:hi, got '" + a.box + "'");
    }
    box->validate();
  }

  const sampdec::DecoderKind kind = sampdec::parse_decoder_kind(a.decoder);
  const std::optional<double> rho = parse_rho(a.rho);
  sampdec::DerandConfig cfg;
  cfg.nominal_k = a.k;
  cfg.mode = sampdec::parse_mode(a.mode);
  cfg.box = box;

  sampdec::CandidateList list;
  double rho_used = 0.0;
  switch (kind) {
    case sampdec::DecoderKind::kSic: {
      const auto qr = sampdec::qr_decompose(h);
      list.items.push_back(sampdec::sic_decode(qr, qr.rotate(y)));
      if (box) list.items.front().z = box->clamp(list.items.front().z);
      list.total_prob = 1.0;
      break;
    }
    case sampdec::DecoderKind::kRandomized: {
      const auto qr = sampdec::qr_decompose(h);
      rho_used = rho ? *rho : sampdec::randomized_rho(a.k, n);
      const auto params =
          sampdec::SamplerParams::from_rho(rho_used, qr.min_diag(), a.n_trunc, a.k);
      sampdec::Rng rng(a.seed);
      list = sampdec::randomized_decode(qr, qr.rotate(y),
                                        static_cast<int>(std::lround(a.k)), params, rng, box);
      break;
    }
    case sampdec::DecoderKind::kDerandomized: {
      const auto qr = sampdec::qr_decompose(h);
      cfg.sampler = sampdec::auto_sampler_params(qr, a.k, a.n_trunc, rho);
      rho_used = cfg.sampler.rho;
      list = sampdec::derandomized_decode(qr, qr.rotate(y), cfg);
      break;
    }
    case sampdec::DecoderKind::kTwoStage: {
      rho_used = rho ? *rho : sampdec::solve_rho_opt(a.k, n);
      cfg.sampler = sampdec::SamplerParams::from_rho(rho_used, 1.0, a.n_trunc, a.k);
      list = sampdec::two_stage_decode(h, y, a.p >= 0 ? a.p : sampdec::fsd_depth(n), cfg);
      break;
    }
    case sampdec::DecoderKind::kMl: {
      if (!box) throw ConfigError("decoder 'ml' needs --box");
      list.items.push_back(sampdec::ml_sphere_decode(h, y, *box));
      list.total_prob = 1.0;
      break;
    }
  }
  if (rho_used > 0.0) {
    if (auto warn = sampdec::rho_warning(rho_used)) std::cerr << "warning: " << *warn << '\n';
  }

  nlohmann::json j;
  j["decoder"] = a.decoder;
  j["K"] = a.k;
  if (rho_used > 0.0) j["rho"] = rho_used;
  j["best"] = list.best().z;
  j["list_size"] = list.size();
  j["total_prob"] = list.total_prob;
  j["stats"] = {{"table_evals", list.stats.table_evals},
                {"node_visits", list.stats.node_visits},
                {"pruned_mass", list.stats.pruned_mass}};
  nlohmann::json items = nlohmann::json::array();
  for (const auto& c : list.items) items.push_back(candidate_json(c));
  j["candidates"] = items;

  const std::string body = j.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(a.out);
    if (!out || !(out << body)) throw ConfigError("cannot write '" + a.out + "'");
  }
  return 0;
}

struct ExperimentArgs {
  int n_c = 4;
  std::string mod = "16qam";
  std::string snr = "12";
  std::string decoder = "derand";
  double k = 15.0;
  std::string k_sweep;
  std::string mode = "literal";
  int n_trunc = sampdec::kDefaultTruncation;
  int p = -1;
  std::string rho = "auto";
  std::string preproc = "none";
  long trials = 1000;
  std::uint64_t seed = 1;
  std::string oracle_ml = "off";
  int workers = 1;
  bool timing = false;
  std::string out;
};

sampdec::ExperimentConfig make_config(const ExperimentArgs& a) {
  sampdec::ExperimentConfig c;
  c.n_c = a.n_c;
  c.qam = parse_qam(a.mod);
  c.snr_db = parse_range(a.snr);
  c.decoder.kind = sampdec::parse_decoder_kind(a.decoder);
  c.decoder.k = a.k;
  c.decoder.mode = sampdec::parse_mode(a.mode);
  c.decoder.truncation_n = a.n_trunc;
  c.decoder.p = a.p;
  c.decoder.rho = parse_rho(a.rho);
  c.decoder.preproc = sampdec::parse_preprocessing(a.preproc);
  c.trials = a.trials;
  c.seed = a.seed;
  c.oracle_ml = parse_on_off(a.oracle_ml);
  if (!a.k_sweep.empty()) c.k_sweep = parse_list(a.k_sweep);
  c.workers = a.workers;
  c.timing = a.timing;
  c.validate();
  return c;
}

int emit_result(const sampdec::ExperimentResult& r, const std::string& out) {
  if (out.empty()) {
    std::cout << sampdec::results_csv(r);
  } else {
    try {
      sampdec::persist_results(r, out);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
  }
  return 0;
}

void add_experiment_options(CLI::App* cmd, ExperimentArgs& a) {
  cmd->add_option("--nc", a.n_c, "Complex antennas");
  cmd->add_option("--mod", a.mod, "Constellation, e.g. 16qam");
  cmd->add_option("--snr", a.snr, "Eb/N0 grid in dB, start:step:stop");
  cmd->add_option("--decoder", a.decoder, "sic|rand|derand|two-stage|ml");
  cmd->add_option("--mode", a.mode, "literal|strict");
  cmd->add_option("--N", a.n_trunc, "Truncation half-width");
  cmd->add_option("--p", a.p, "Two-stage depth (default: fsd_depth)");
  cmd->add_option("--rho", a.rho, "rho or 'auto'");
  cmd->add_option("--preproc", a.preproc, "none|lll|mmse|lll+mmse");
  cmd->add_option("--trials", a.trials, "Trials per point");
  cmd->add_option("--seed", a.seed, "Master seed");
  cmd->add_option("--workers", a.workers, "Worker threads");
  cmd->add_flag("--timing", a.timing, "Record wall_ms");
  cmd->add_option("--out", a.out, "CSV path (JSON sidecar at <path>.json)");
}

void print_tune(const char* what, double value, nlohmann::json record) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  std::cout << buf << '\n';
  record["quantity"] = what;
  record["value"] = value;
  std::cout << record.dump() << '\n';
}

int run_tune(const std::string& what, const std::vector<double>& args) {
  auto need = [&](size_t count, const char* usage) {
    if (args.size() != count) throw ConfigError(std::string("usage: tune ") + usage);
  };
  auto as_int = [](double v, const char* name) {
    if (v != std::floor(v)) throw ConfigError(std::string(name) + " must be an integer");
    return static_cast<int>(v);
  };
  if (what == "rho") {
    need(2, "rho <K> <n>");
    const double rho = sampdec::solve_rho_opt(args[0], as_int(args[1], "n"));
    if (auto warn = sampdec::rho_warning(rho)) std::cerr << "warning: " << *warn << '\n';
    print_tune("rho", rho, {{"K", args[0]}, {"n", args[1]}});
  } else if (what == "radius") {
    need(3, "radius <K> <n> <min_rii>");
    print_tune("radius",
               sampdec::decoding_radius(args[0], as_int(args[1], "n"), args[2]),
               {{"K", args[0]}, {"n", args[1]}, {"min_rii", args[2]}});
  } else if (what == "eta-k") {
    need(2, "eta-k <eta> <p>");
    const auto k = sampdec::min_k_for_eta(args[0], as_int(args[1], "p"));
    print_tune("K", static_cast<double>(k), {{"eta", args[0]}, {"p", args[1]}});
  } else if (what == "lsd-radius") {
    need(2, "lsd-radius <n> <sigma>");
    print_tune("radius", sampdec::lsd_radius(as_int(args[0], "n"), args[1]),
               {{"n", args[0]}, {"sigma", args[1]}});
  } else if (what == "map-k") {
    need(3, "map-k <n> <sigma> <min_rii>");
    print_tune("K",
               sampdec::near_map_sample_size(as_int(args[0], "n"), args[1], args[2]),
               {{"n", args[0]}, {"sigma", args[1]}, {"min_rii", args[2]}});
  } else {
    throw ConfigError("unknown tune quantity '" + what + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling decoders for MIMO lattice detection"};
  app.require_subcommand(1);

  DecodeArgs dec;
  auto* decode = app.add_subcommand("decode", "Decode one received vector");
  decode->add_option("--matrix", dec.matrix, "Channel matrix file")->required();
  decode->add_option("--y", dec.y, "Received vector file (rows x 1)")->required();
  decode->add_flag("--complex", dec.complex_input, "Files hold interleaved re,im");
  decode->add_option("--decoder", dec.decoder, "sic|rand|derand|two-stage|ml");
  decode->add_option("--K", dec.k, "Nominal sample size");
  decode->add_option("--mode", dec.mode, "literal|strict");
  decode->add_option("--N", dec.n_trunc, "Truncation half-width");
  decode->add_option("--p", dec.p, "Two-stage depth");
  decode->add_option("--rho", dec.rho, "rho or 'auto'");
  decode->add_option("--box", dec.box, "Constellation bounds lo:hi");
  decode->add_option("--seed", dec.seed, "Seed for the randomized decoder");
  decode->add_option("--out", dec.out, "Output JSON path");

  ExperimentArgs ber;
  auto* ber_cmd = app.add_subcommand("ber", "Error-rate experiment");
  add_experiment_options(ber_cmd, ber);
  ber_cmd->add_option("--K", ber.k, "Nominal sample size");
  ber_cmd->add_option("--oracle-ml", ber.oracle_ml, "on|off");

  ExperimentArgs llr;
  llr.n_c = 2;
  llr.mod = "4qam";
  llr.snr = "6";
  llr.trials = 200;
  auto* llr_cmd = app.add_subcommand("llr", "LLR fidelity against exact MAP");
  add_experiment_options(llr_cmd, llr);
  llr_cmd->add_option("--K", llr.k, "Nominal sample size");
  llr_cmd->add_option("--K-sweep", llr.k_sweep, "Comma-separated K values");

  std::string tune_what;
  std::vector<double> tune_args;
  auto* tune = app.add_subcommand("tune", "Evaluate a tuning formula");
  tune->add_option("quantity", tune_what, "rho|radius|eta-k|lsd-radius|map-k")->required();
  tune->add_option("args", tune_args, "Numeric arguments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*decode) return run_decode(dec);
    if (*ber_cmd) return emit_result(sampdec::run_ser_experiment(make_config(ber)), ber.out);
    if (*llr_cmd) return emit_result(sampdec::run_llr_fidelity(make_config(llr)), llr.out);
    if (*tune) return run_tune(tune_what, tune_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
