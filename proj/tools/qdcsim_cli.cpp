// Copyright 2026 The qdcsim Authors
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

// qdcsim command-line runner.
//
// Subcommands: cost, rcnot-sweep, ghz, tomography, dump-circuit. Each accepts
// zero or more --config files plus inline flags; inline flags override config
// values. Progress goes to standard error; data goes to standard output (a
// fixed-width table, or CSV with --csv) and, with --out, to a JSONL file.
// Exact-backend runs are byte-identical across invocations.
//
// Exit codes: 0 success, 1 usage/configuration error, 2 internal invariant
// violation.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdcsim/qdcsim.hpp"

namespace {

struct Flags {
  std::vector<std::string> configs;
  std::optional<std::string> kind;
  std::optional<int> n;
  std::optional<int> hops;
  std::optional<double> kappa_t;
  std::optional<double> kappa_f;
  std::optional<double> delta_t;
  std::optional<int> n_coll_t;
  std::optional<int> n_coll_f;
  std::optional<double> fiber_km;
  std::optional<double> alpha;
  std::optional<double> idle_theta;
  std::optional<std::string> backend;
  std::optional<int> shots;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool csv = false;
  bool timings = false;
  int jobs = 1;
};

void add_common_options(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.configs,
                  "JSON config file; repeatable, one run per file");
  cmd->add_option("--kind", f.kind, "topology kind: line, ring, star, custom");
  cmd->add_option("--n", f.n, "number of QPUs");
  cmd->add_option("--hops", f.hops, "hop count limit (sweep/tomography)");
  cmd->add_option("--kappa-t", f.kappa_t, "transducer coupling");
  cmd->add_option("--kappa-f", f.kappa_f,
                  "fiber coupling override (default: calibrated from --alpha)");
  cmd->add_option("--delta-t", f.delta_t, "collision duration");
  cmd->add_option("--n-coll-t", f.n_coll_t, "collisions per transducer");
  cmd->add_option("--n-coll-f", f.n_coll_f, "collisions per fiber segment");
  cmd->add_option("--fiber-km", f.fiber_km, "fiber length in km");
  cmd->add_option("--alpha", f.alpha, "fiber attenuation per km");
  cmd->add_option("--idle-theta", f.idle_theta,
                  "idle collision angle for uninvolved processing qubits");
  cmd->add_option("--backend", f.backend, "exact or trajectories");
  cmd->add_option("--shots", f.shots, "trajectory count");
  cmd->add_option("--seed", f.seed, "base RNG seed (required for trajectories)");
  cmd->add_option("--out", f.out, "write JSONL records to this path");
  cmd->add_flag("--csv", f.csv, "print CSV instead of the table");
  cmd->add_flag("--timings", f.timings, "include wall_time_ms in JSONL output");
  cmd->add_option("--jobs", f.jobs, "worker threads across --config files")
      ->check(CLI::PositiveNumber);
}

void apply_overrides(qdcsim::ExperimentConfig& cfg, const Flags& f) {
  if (f.kind) cfg.topology_kind = qdcsim::topology_kind_from_name(*f.kind);
  if (f.n) cfg.n_qpus = *f.n;
  if (f.hops) cfg.max_hops = *f.hops;
  if (f.kappa_t) cfg.noise.kappa_T = *f.kappa_t;
  if (f.kappa_f) cfg.noise.kappa_F = *f.kappa_f;
  if (f.delta_t) cfg.noise.delta_t = *f.delta_t;
  if (f.n_coll_t) cfg.noise.n_coll_T = *f.n_coll_t;
  if (f.n_coll_f) cfg.noise.n_coll_F = *f.n_coll_f;
  if (f.fiber_km) cfg.noise.fiber_length_km = *f.fiber_km;
  if (f.alpha) cfg.noise.attenuation_per_km = *f.alpha;
  if (f.idle_theta) cfg.noise.idle_damping_theta = *f.idle_theta;
  if (f.backend) cfg.backend = *f.backend;
  if (f.shots) cfg.shots = *f.shots;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.output_path = *f.out;
}

std::string cost_table(const std::vector<qdcsim::CostRow>& rows) {
  std::string out = "kind    n  counted  formula\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-6s %2d %8lld %8lld\n", r.kind.c_str(),
                  r.n, r.counted, r.formula);
    out += buf;
  }
  return out;
}

std::string fidelity_table(const std::vector<qdcsim::FidelityResult>& rs) {
  std::string out =
      "experiment   kind    n  hops  input  fidelity  stderr    shots\n";
  char buf[160];
  for (const auto& r : rs) {
    char hops[16] = "-";
    if (r.hops >= 0) std::snprintf(hops, sizeof(hops), "%d", r.hops);
    std::snprintf(buf, sizeof(buf), "%-12s %-6s %2d %5s  %-5s %9.6f %9.6f %7d\n",
                  r.experiment.c_str(), r.kind.c_str(), r.n, hops,
                  r.input.c_str(), r.fidelity, r.stderr_of_mean, r.shots);
    out += buf;
  }
  return out;
}

std::string csv_text(const std::vector<qdcsim::FidelityResult>& rs) {
  std::ostringstream os;
  qdcsim::write_csv(rs, os);
  return os.str();
}

// Runs one experiment config to completion; returns the stdout payload.
std::string run_one(const qdcsim::ExperimentConfig& cfg, const Flags& f) {
  cfg.validate();
  std::vector<qdcsim::FidelityResult> results;
  std::string payload;
  if (cfg.experiment == "cost") {
    std::vector<qdcsim::CostRow> rows = qdcsim::run_cost(cfg);
    payload = cost_table(rows);
    if (!cfg.output_path.empty()) {
      std::ofstream os(cfg.output_path);
      if (!os) {
        throw std::invalid_argument("cannot open '" + cfg.output_path +
                                    "' for write");
      }
      for (const auto& r : rows) {
        nlohmann::json j{{"experiment", "cost"},
                         {"kind", r.kind},
                         {"n", r.n},
                         {"counted", r.counted},
                         {"formula", r.formula}};
        os << j.dump() << "\n";
      }
    }
    return payload;
  }
  if (cfg.experiment == "rcnot_sweep") {
    results = qdcsim::run_rcnot_sweep(cfg);
  } else if (cfg.experiment == "ghz") {
    results = qdcsim::run_ghz(cfg);
  } else if (cfg.experiment == "tomography") {
    results = {qdcsim::run_tomography(cfg).record};
  } else {
    throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");
  }
  payload = f.csv ? csv_text(results) : fidelity_table(results);
  if (!cfg.output_path.empty()) {
    qdcsim::write_results(results, cfg.output_path, f.timings);
  }
  return payload;
}

std::string run_dump_circuit(const qdcsim::ExperimentConfig& cfg) {
  cfg.noise.validate();
  qdcsim::Topology t =
      qdcsim::topology_from_config(cfg, cfg.topology_kind, cfg.n_qpus);
  qdcsim::GhzCompilation comp = qdcsim::compile_ghz(t, cfg.noise);
  return comp.circuit.dump();
}

// Loads configs (or a default one), applies flag overrides, pins the
// experiment to the subcommand, and fans out across --jobs workers. Payloads
// print in config order regardless of completion order.
int run_subcommand(const std::string& experiment, const Flags& f,
                   int default_hops) {
  std::vector<qdcsim::ExperimentConfig> cfgs;
  if (f.configs.empty()) {
    cfgs.emplace_back();
    cfgs.back().max_hops = default_hops;
  } else {
    for (const auto& path : f.configs) {
      cfgs.push_back(qdcsim::read_config(path));
    }
  }
  for (auto& cfg : cfgs) {
    apply_overrides(cfg, f);
    if (experiment != "dump_circuit") cfg.experiment = experiment;
    if (cfgs.size() > 1 && !cfg.output_path.empty() && f.out) {
      throw std::invalid_argument(
          "--out with multiple --config files would overwrite; set per-config "
          "output paths instead");
    }
  }

  std::vector<std::string> payloads(cfgs.size());
  std::vector<std::exception_ptr> failures(cfgs.size());
  auto work = [&](std::size_t i) {
    try {
      std::ostringstream progress;
      progress << "running " << experiment << " [" << i + 1 << "/"
               << cfgs.size() << "]\n";
      std::cerr << progress.str();
      payloads[i] = experiment == "dump_circuit" ? run_dump_circuit(cfgs[i])
                                                 : run_one(cfgs[i], f);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  int jobs = std::min<int>(f.jobs, static_cast<int>(cfgs.size()));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < cfgs.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < cfgs.size();
             i = next.fetch_add(1)) {
          work(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
    std::cout << payloads[i];
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qdcsim: collisional-noise emulation of optically interconnected "
      "quantum data centers"};
  app.require_subcommand(1);

  Flags f;
  CLI::App* cost =
      app.add_subcommand("cost", "entanglement-link cost table per topology");
  CLI::App* sweep = app.add_subcommand(
      "rcnot-sweep", "remote-CNOT fidelity over hop counts and inputs");
  CLI::App* ghz =
      app.add_subcommand("ghz", "GHZ fidelity per topology kind");
  CLI::App* tomo = app.add_subcommand(
      "tomography", "remote-CNOT process fidelity via the Choi state");
  CLI::App* dump = app.add_subcommand(
      "dump-circuit", "print the compiled GHZ circuit for inspection");
  for (CLI::App* cmd : {cost, sweep, ghz, tomo, dump}) {
    add_common_options(cmd, f);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // 0 covers --help/--version
  }

  try {
    // Tomography defaults to one hop: its Choi state needs two extra
    // reference qubits, so the dense backend caps the path length.
    if (cost->parsed()) return run_subcommand("cost", f, 4);
    if (sweep->parsed()) return run_subcommand("rcnot_sweep", f, 4);
    if (ghz->parsed()) return run_subcommand("ghz", f, 4);
    if (tomo->parsed()) return run_subcommand("tomography", f, 1);
    if (dump->parsed()) return run_subcommand("dump_circuit", f, 4);
    std::cerr << "error: no subcommand selected\n";
    return 1;
  } catch (const qdcsim::internal_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
