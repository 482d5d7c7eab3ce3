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

#ifndef QDCSIM_BENCHMARK_HPP_
#define QDCSIM_BENCHMARK_HPP_

// Experiment harness: the communication-cost table, the remote-CNOT hop
// sweep, per-topology GHZ fidelity, and remote-CNOT process tomography,
// plus config/result serialization.
//
// Config files are JSON with a schema_version field (currently 1). Results
// are line-delimited JSON records with alphabetically ordered keys, so
// exact-backend runs are byte-identical across invocations; wall-clock
// timings are kept out of the data stream unless explicitly requested.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qdcsim/catcomm.hpp"
#include "qdcsim/circuit.hpp"
#include "qdcsim/execute.hpp"
#include "qdcsim/ghz.hpp"
#include "qdcsim/noise.hpp"
#include "qdcsim/topology.hpp"

namespace qdcsim {

// ---------------------------------------------------------------------------
// Config and result records

struct ExperimentConfig {
  std::string experiment = "ghz";  // cost | rcnot_sweep | ghz | tomography
  TopologyKind topology_kind = TopologyKind::kLine;  // dump/custom selection;
                                                     // run_ghz covers all
                                                     // canonical kinds
  int n_qpus = 4;
  int comm_per_qpu = 1;
  std::vector<std::pair<int, int>> custom_edges;  // custom topologies only
  int custom_root = 1;
  int max_hops = 4;  // rcnot_sweep sweep limit; tomography path length
  NoiseParams noise;
  std::string backend = "exact";  // exact | trajectories
  int shots = 10000;
  std::optional<std::uint64_t> seed;
  std::string output_path;

  void validate() const {
    if (experiment != "cost" && experiment != "rcnot_sweep" &&
        experiment != "ghz" && experiment != "tomography") {
      throw std::invalid_argument(
          "unknown experiment '" + experiment +
          "' (options: cost, rcnot_sweep, ghz, tomography)");
    }
    if (backend != "exact" && backend != "trajectories") {
      throw std::invalid_argument("unknown backend '" + backend +
                                  "' (options: exact, trajectories)");
    }
    if (backend == "trajectories") {
      if (!seed.has_value()) {
        throw std::invalid_argument(
            "the trajectories backend requires an explicit seed");
      }
      if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    }
    if (n_qpus < 2) throw std::invalid_argument("n_qpus must be >= 2");
    if (max_hops < 1) throw std::invalid_argument("max_hops must be >= 1");
    noise.validate();
  }
};

struct FidelityResult {
  std::string experiment;
  std::string kind;   // topology kind
  int n = 0;          // QPU count
  int hops = -1;      // -1 when not applicable
  std::string input;  // "00" | "10" | "+0" | "ghz" | "choi"
  double fidelity = 0.0;
  double stderr_of_mean = 0.0;  // 0 for the exact backend
  std::string backend = "exact";
  int shots = 0;               // 0 for the exact backend
  std::uint64_t seed = 0;      // meaningful for trajectories only
  NoiseParams params;          // echo of the noise configuration
  double wall_time_ms = 0.0;   // excluded from output unless requested
};

struct CostRow {
  std::string kind;
  int n = 0;
  long long counted = 0;
  long long formula = 0;
};

// ---------------------------------------------------------------------------
// JSON (de)serialization; keys are alphabetical in output by construction

inline nlohmann::json to_json(const NoiseParams& p) {
  nlohmann::json j{{"kappa_t", p.kappa_T},
                   {"delta_t", p.delta_t},
                   {"n_coll_t", p.n_coll_T},
                   {"n_coll_f", p.n_coll_F},
                   {"fiber_length_km", p.fiber_length_km},
                   {"attenuation_per_km", p.attenuation_per_km},
                   {"idle_damping_theta", p.idle_damping_theta}};
  if (p.kappa_F.has_value()) j["kappa_f"] = *p.kappa_F;
  return j;
}

inline NoiseParams noise_from_json(const nlohmann::json& j) {
  NoiseParams p;
  p.kappa_T = j.value("kappa_t", p.kappa_T);
  if (j.contains("kappa_f")) p.kappa_F = j.at("kappa_f").get<double>();
  p.delta_t = j.value("delta_t", p.delta_t);
  p.n_coll_T = j.value("n_coll_t", p.n_coll_T);
  p.n_coll_F = j.value("n_coll_f", p.n_coll_F);
  p.fiber_length_km = j.value("fiber_length_km", p.fiber_length_km);
  p.attenuation_per_km = j.value("attenuation_per_km", p.attenuation_per_km);
  p.idle_damping_theta = j.value("idle_damping_theta", p.idle_damping_theta);
  p.validate();
  return p;
}

inline nlohmann::json to_json(const FidelityResult& r,
                              bool include_timings = false) {
  nlohmann::json j{{"experiment", r.experiment},
                   {"kind", r.kind},
                   {"n", r.n},
                   {"hops", r.hops},
                   {"input", r.input},
                   {"fidelity", r.fidelity},
                   {"stderr", r.stderr_of_mean},
                   {"backend", r.backend},
                   {"shots", r.shots},
                   {"seed", r.seed},
                   {"params", to_json(r.params)}};
  if (include_timings) j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

inline FidelityResult result_from_json(const nlohmann::json& j) {
  FidelityResult r;
  r.experiment = j.at("experiment").get<std::string>();
  r.kind = j.at("kind").get<std::string>();
  r.n = j.at("n").get<int>();
  r.hops = j.at("hops").get<int>();
  r.input = j.at("input").get<std::string>();
  r.fidelity = j.at("fidelity").get<double>();
  r.stderr_of_mean = j.at("stderr").get<double>();
  r.backend = j.at("backend").get<std::string>();
  r.shots = j.at("shots").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.params = noise_from_json(j.at("params"));
  r.wall_time_ms = j.value("wall_time_ms", 0.0);
  return r;
}

/// One compact JSON record per line.
inline void write_results(const std::vector<FidelityResult>& results,
                          std::ostream& os, bool include_timings = false) {
  for (const auto& r : results) {
    os << to_json(r, include_timings).dump() << "\n";
  }
}

inline void write_results(const std::vector<FidelityResult>& results,
                          const std::string& path,
                          bool include_timings = false) {
  std::ofstream os(path);
  if (!os) throw std::invalid_argument("cannot open '" + path + "' for write");
  write_results(results, os, include_timings);
}

inline std::vector<FidelityResult> read_results(std::istream& is) {
  std::vector<FidelityResult> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(result_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("result line " + std::to_string(line_no) +
                                  ": " + e.what());
    }
  }
  return out;
}

/// CSV projection with the fixed header row
/// `experiment,kind,n,hops,input,fidelity,stderr`; hops empty when absent.
inline void write_csv(const std::vector<FidelityResult>& results,
                      std::ostream& os) {
  os << "experiment,kind,n,hops,input,fidelity,stderr\n";
  char buf[64];
  for (const auto& r : results) {
    os << r.experiment << ',' << r.kind << ',' << r.n << ',';
    if (r.hops >= 0) os << r.hops;
    os << ',' << r.input << ',';
    std::snprintf(buf, sizeof(buf), "%.12g", r.fidelity);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.12g", r.stderr_of_mean);
    os << buf << '\n';
  }
}

namespace detail {

// Line/column diagnostics for a byte offset into a text buffer.
inline std::string at_line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <class T>
T require_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    throw std::invalid_argument(std::string("missing required field '") + key +
                                "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("field '") + key + "': " +
                                e.what());
  }
}

}  // namespace detail

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json topo{{"kind", topology_kind_name(c.topology_kind)},
                      {"n_qpus", c.n_qpus},
                      {"comm_per_qpu", c.comm_per_qpu}};
  if (c.topology_kind == TopologyKind::kCustom) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [a, b] : c.custom_edges) edges.push_back({a, b});
    topo["edges"] = std::move(edges);
    topo["root"] = c.custom_root;
  }
  nlohmann::json j{{"schema_version", 1},
                   {"experiment", c.experiment},
                   {"topology", std::move(topo)},
                   {"max_hops", c.max_hops},
                   {"noise", to_json(c.noise)},
                   {"backend", c.backend},
                   {"shots", c.shots}};
  if (c.seed.has_value()) j["seed"] = *c.seed;
  if (!c.output_path.empty()) j["out"] = c.output_path;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  int version = detail::require_field<int>(j, "schema_version");
  if (version != 1) {
    throw std::invalid_argument("unsupported schema_version " +
                                std::to_string(version) + " (supported: 1)");
  }
  ExperimentConfig c;
  c.experiment = detail::require_field<std::string>(j, "experiment");
  if (j.contains("topology")) {
    const auto& topo = j.at("topology");
    c.topology_kind = topology_kind_from_name(
        topo.value("kind", std::string(topology_kind_name(c.topology_kind))));
    c.n_qpus = topo.value("n_qpus", c.n_qpus);
    c.comm_per_qpu = topo.value("comm_per_qpu", c.comm_per_qpu);
    if (c.topology_kind == TopologyKind::kCustom) {
      if (!topo.contains("edges")) {
        throw std::invalid_argument(
            "missing required field 'topology.edges' for custom topology");
      }
      for (const auto& e : topo.at("edges")) {
        c.custom_edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      }
      c.custom_root = topo.value("root", 1);
    }
  }
  c.max_hops = j.value("max_hops", c.max_hops);
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"));
  c.backend = j.value("backend", c.backend);
  c.shots = j.value("shots", c.shots);
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  c.output_path = j.value("out", c.output_path);
  c.validate();
  return c;
}

inline ExperimentConfig read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << is.rdbuf();
  std::string text = buf.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config '" + path + "' is not valid JSON at " +
                                detail::at_line_col(text, e.byte) + ": " +
                                e.what());
  }
  try {
    return config_from_json(j);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config '" + path + "': " + e.what());
  }
}

inline void write_config(const ExperimentConfig& c, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::invalid_argument("cannot open '" + path + "' for write");
  os << to_json(c).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Experiments

inline Topology topology_from_config(const ExperimentConfig& c,
                                     TopologyKind kind, int n) {
  switch (kind) {
    case TopologyKind::kLine: return make_line(n, c.comm_per_qpu);
    case TopologyKind::kRing: return make_ring(n, c.comm_per_qpu);
    case TopologyKind::kStar: return make_star(n, c.comm_per_qpu);
    case TopologyKind::kCustom:
      return Topology(TopologyKind::kCustom, n, c.custom_edges, c.custom_root,
                      c.comm_per_qpu);
  }
  throw internal_error("unknown topology kind");
}

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

inline long long counted_links(const Topology& t) {
  long long total = 0;
  for (const auto& q : t.qpus()) {
    if (q.id == t.root()) continue;
    total +=
        static_cast<long long>(shortest_path(t, t.root(), q.id).size()) - 1;
  }
  return total;
}

}  // namespace detail

/// Communication-cost table at the configured QPU count: counted link totals
/// (sum of root distances) next to the closed-form values. The two columns
/// must agree; a mismatch is an internal error.
inline std::vector<CostRow> run_cost(const ExperimentConfig& config) {
  config.validate();
  std::vector<CostRow> rows;
  const int n = config.n_qpus;
  for (TopologyKind kind :
       {TopologyKind::kLine, TopologyKind::kRing, TopologyKind::kStar}) {
    if (kind == TopologyKind::kRing && n < 3) continue;
    Topology t = topology_from_config(config, kind, n);
    CostRow row;
    row.kind = topology_kind_name(kind);
    row.n = n;
    row.counted = detail::counted_links(t);
    row.formula = link_cost_formula(kind, n);
    if (row.counted != row.formula) {
      throw internal_error("counted links disagree with the closed form");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

// Ideal remote-CNOT outputs on (control, target), control = qubit 0.
inline PureState sweep_target_state(const std::string& input) {
  if (input == "00") return PureState::basis(2, 0);
  if (input == "10") return PureState::basis(2, 3);
  if (input == "+0") {
    return PureState::from_amplitudes(
        2, {complex_t{std::numbers::sqrt2 / 2.0, 0.0}, complex_t{0.0, 0.0},
            complex_t{0.0, 0.0}, complex_t{std::numbers::sqrt2 / 2.0, 0.0}});
  }
  throw std::invalid_argument("unknown sweep input label '" + input + "'");
}

inline void prepare_sweep_input(Circuit& c, const std::string& input,
                                int control) {
  if (input == "00") return;
  if (input == "10") {
    c.x(control);
    return;
  }
  if (input == "+0") {
    c.h(control);
    return;
  }
  throw std::invalid_argument("unknown sweep input label '" + input + "'");
}

}  // namespace detail

/// Remote-CNOT hop sweep on a line of max_hops+1 QPUs: for every hop count
/// k = 1..max_hops and input in {00, 10, +0}, the state fidelity of the
/// protocol's output against the ideal CNOT output on (control, target).
inline std::vector<FidelityResult> run_rcnot_sweep(
    const ExperimentConfig& config) {
  config.validate();
  const int max_hops = config.max_hops;
  Topology t = make_line(max_hops + 1, config.comm_per_qpu);
  std::vector<FidelityResult> results;
  for (int k = 1; k <= max_hops; ++k) {
    for (const std::string input : {"00", "10", "+0"}) {
      auto t0 = std::chrono::steady_clock::now();
      const int control = t.processing_qubit(1);
      const int target = t.processing_qubit(k + 1);
      Circuit c = make_register(t, 2);
      detail::prepare_sweep_input(c, input, control);
      std::vector<int> path(static_cast<std::size_t>(k) + 1);
      for (int i = 0; i <= k; ++i) path[static_cast<std::size_t>(i)] = i + 1;
      remote_cnot(c, t, RcnotPlan{control, target, path, 0, 1}, config.noise);

      FidelityResult r;
      r.experiment = "rcnot_sweep";
      r.kind = topology_kind_name(t.kind());
      r.n = t.n_qpus();
      r.hops = k;
      r.input = input;
      r.backend = config.backend;
      r.params = config.noise;
      PureState ideal = detail::sweep_target_state(input);
      if (config.backend == "exact") {
        ExactResult res = execute_exact(c);
        MixedState reduced = partial_trace(res.merged, {control, target});
        r.fidelity = fidelity_with_pure(reduced, ideal);
      } else {
        TrajectoryEstimate est = estimate_overlap(c, config.shots, *config.seed,
                                                  ideal, {control, target});
        r.fidelity = est.mean;
        r.stderr_of_mean = est.stderr_of_mean;
        r.shots = est.shots;
        r.seed = *config.seed;
      }
      r.wall_time_ms = detail::ms_since(t0);
      results.push_back(std::move(r));
    }
  }
  return results;
}

/// GHZ fidelity per topology kind at the configured n: compile, execute,
/// trace ancillas, and compare the processing-qubit state against GHZ(n).
inline std::vector<FidelityResult> run_ghz(const ExperimentConfig& config) {
  config.validate();
  if (config.n_qpus < 3) {
    throw std::invalid_argument("ghz experiment needs n_qpus >= 3");
  }
  std::vector<TopologyKind> kinds;
  if (config.topology_kind == TopologyKind::kCustom) {
    kinds = {TopologyKind::kCustom};
  } else {
    kinds = {TopologyKind::kLine, TopologyKind::kRing, TopologyKind::kStar};
  }
  std::vector<FidelityResult> results;
  for (TopologyKind kind : kinds) {
    auto t0 = std::chrono::steady_clock::now();
    Topology t = topology_from_config(config, kind, config.n_qpus);
    GhzCompilation comp = compile_ghz(t, config.noise);
    std::vector<int> proc;
    for (const auto& q : t.qpus()) proc.push_back(q.processing.at(0));
    PureState target = ghz_state(t.n_qpus());

    FidelityResult r;
    r.experiment = "ghz";
    r.kind = topology_kind_name(kind);
    r.n = t.n_qpus();
    r.input = "ghz";
    r.backend = config.backend;
    r.params = config.noise;
    if (config.backend == "exact") {
      ExactResult res = execute_exact(comp.circuit);
      MixedState reduced = partial_trace(res.merged, proc);
      r.fidelity = fidelity_with_pure(reduced, target);
    } else {
      TrajectoryEstimate est = estimate_overlap(comp.circuit, config.shots,
                                                *config.seed, target, proc);
      r.fidelity = est.mean;
      r.stderr_of_mean = est.stderr_of_mean;
      r.shots = est.shots;
      r.seed = *config.seed;
    }
    r.wall_time_ms = detail::ms_since(t0);
    results.push_back(std::move(r));
  }
  return results;
}

struct TomographyReport {
  double process_fidelity = 0.0;
  MixedState choi;  // reduced state on (control, target, ref_c, ref_t)
  FidelityResult record;
};

/// Ideal CNOT Choi state on 4 qubits (data control, data target, ref of
/// control, ref of target), as produced by entangling each data qubit with
/// its reference and applying CNOT(control -> target).
inline PureState ideal_cnot_choi_state() {
  PureState phi(4);
  apply_unitary(phi, gates::hadamard(), {2});
  apply_cnot(phi, 2, 0);
  apply_unitary(phi, gates::hadamard(), {3});
  apply_cnot(phi, 3, 1);
  apply_cnot(phi, 0, 1);
  return phi;
}

/// Process tomography of the remote CNOT over a max_hops-long line path:
/// each data qubit is maximally entangled with a reference qubit, the
/// protocol runs on the data pair, ancillas are traced out, and the
/// resulting Choi state is compared against the ideal CNOT's. Exact backend
/// only.
inline TomographyReport run_tomography(const ExperimentConfig& config) {
  config.validate();
  if (config.backend != "exact") {
    throw std::invalid_argument("tomography supports the exact backend only");
  }
  auto t0 = std::chrono::steady_clock::now();
  const int hops = config.max_hops;
  Topology t = make_line(hops + 1, config.comm_per_qpu);
  if (t.n_qubits() + 2 > 12) {
    throw std::invalid_argument(
        "tomography over " + std::to_string(hops) +
        " hops needs a " + std::to_string(t.n_qubits() + 2) +
        "-qubit density matrix; the dense backend caps at 12 (use <= 3 hops)");
  }
  const int control = t.processing_qubit(1);
  const int target = t.processing_qubit(hops + 1);
  const int ref_c = t.n_qubits();
  const int ref_t = t.n_qubits() + 1;

  Circuit c = make_register(t, 2, /*extra_qubits=*/2);
  c.h(ref_c);
  c.cnot(ref_c, control);
  c.h(ref_t);
  c.cnot(ref_t, target);
  std::vector<int> path(static_cast<std::size_t>(hops) + 1);
  for (int i = 0; i <= hops; ++i) path[static_cast<std::size_t>(i)] = i + 1;
  remote_cnot(c, t, RcnotPlan{control, target, path, 0, 1}, config.noise);

  ExactResult res = execute_exact(c);
  MixedState choi = partial_trace(res.merged, {control, target, ref_c, ref_t});
  double f_pro = fidelity_with_pure(choi, ideal_cnot_choi_state());

  FidelityResult r;
  r.experiment = "tomography";
  r.kind = topology_kind_name(t.kind());
  r.n = t.n_qpus();
  r.hops = hops;
  r.input = "choi";
  r.fidelity = f_pro;
  r.backend = config.backend;
  r.params = config.noise;
  r.wall_time_ms = detail::ms_since(t0);
  return TomographyReport{f_pro, std::move(choi), std::move(r)};
}

}  // namespace qdcsim

#endif  // QDCSIM_BENCHMARK_HPP_
