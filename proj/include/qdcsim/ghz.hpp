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

#ifndef QDCSIM_GHZ_HPP_
#define QDCSIM_GHZ_HPP_

// GHZ-circuit compiler: Hadamard on the root QPU's processing qubit, then a
// remote CNOT from the root to every other QPU's processing qubit, in
// ascending QPU-id order, routed along BFS shortest paths. This root-fan-out
// construction is the one whose total link count matches the closed-form
// costs in link_cost_formula.
//
// Optional idle noise (NoiseParams::idle_damping_theta > 0): while one remote
// CNOT round runs, every uninvolved processing qubit suffers one idle
// collision per hop of that round, tying idle exposure to the round's
// entanglement-distribution duration.

#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qdcsim/catcomm.hpp"
#include "qdcsim/circuit.hpp"
#include "qdcsim/execute.hpp"
#include "qdcsim/noise.hpp"
#include "qdcsim/topology.hpp"

namespace qdcsim {

struct GhzPlan {
  int root_processing;
  std::vector<RcnotPlan> rcnots;  // one per non-root QPU, ascending id
  long long total_links;          // sum of hop counts
};

struct GhzCompilation {
  GhzPlan plan;
  Circuit circuit;
};

/// (|0...0> + |1...1>)/sqrt(2) on n qubits.
inline PureState ghz_state(int n_qubits) {
  PureState s(n_qubits);
  auto& a = s.amplitudes();
  a[0] = complex_t{std::numbers::sqrt2 / 2.0, 0.0};
  a[a.size() - 1] = a[0];
  return s;
}

inline GhzCompilation compile_ghz(const Topology& t,
                                  const NoiseParams& params) {
  params.validate();
  const int n = t.n_qpus();
  Circuit c = make_register(t, 2 * (n - 1));
  c.label("ghz n=" + std::to_string(n) + " kind=" +
          topology_kind_name(t.kind()));

  GhzPlan plan;
  plan.root_processing = t.processing_qubit(t.root());
  plan.total_links = 0;
  c.h(plan.root_processing);

  int clbit = 0;
  for (int v = 1; v <= n; ++v) {
    if (v == t.root()) continue;
    RcnotPlan r;
    r.control_proc = plan.root_processing;
    r.target_proc = t.processing_qubit(v);
    r.path = shortest_path(t, t.root(), v);
    r.clbit_m1 = clbit++;
    r.clbit_m2 = clbit++;
    long long hops = static_cast<long long>(r.path.size()) - 1;
    plan.total_links += hops;
    remote_cnot(c, t, r, params);
    if (params.idle_damping_theta > 0.0) {
      for (const auto& q : t.qpus()) {
        int p = q.processing.at(0);
        if (p == r.control_proc || p == r.target_proc) continue;
        detail::append_collisions(c, p, t.env_qubit(),
                                  params.idle_damping_theta,
                                  static_cast<int>(hops));
      }
    }
    plan.rcnots.push_back(std::move(r));
  }

  if (t.kind() != TopologyKind::kCustom &&
      plan.total_links != link_cost_formula(t.kind(), n)) {
    throw internal_error("counted links disagree with the closed form");
  }
  return GhzCompilation{std::move(plan), std::move(c)};
}

/// Exact-backend GHZ fidelity: execute, trace to the processing qubits,
/// compare against the n-qubit GHZ state.
inline double ghz_fidelity_exact(const Topology& t, const NoiseParams& params) {
  GhzCompilation comp = compile_ghz(t, params);
  ExactResult result = execute_exact(comp.circuit);
  std::vector<int> keep;
  for (const auto& q : t.qpus()) keep.push_back(q.processing.at(0));
  MixedState reduced = partial_trace(result.merged, keep);
  return fidelity_with_pure(reduced, ghz_state(t.n_qpus()));
}

}  // namespace qdcsim

#endif  // QDCSIM_GHZ_HPP_
