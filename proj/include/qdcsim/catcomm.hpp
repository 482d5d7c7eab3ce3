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

#ifndef QDCSIM_CATCOMM_HPP_
#define QDCSIM_CATCOMM_HPP_

// Cat-comm remote CNOT between QPUs:
//
//   1. Noisy Bell-pair generation across one link: the pair is prepared on
//      the two communication qubits and the transmitted half passes through
//      the collisional channel (sender transducer, fiber, receiver
//      transducer).
//   2. Multi-hop distribution: each intermediate QPU SWAPs the transported
//      half onward into the next QPU's communication qubit, which then
//      traverses the next link. A k-hop path costs exactly k link traversals
//      and k-1 SWAPs; SWAPs themselves are ideal.
//   3. Cat-entangler / cat-disentangler with two mid-circuit measurements
//      and classically conditioned X / Z corrections, after which both
//      endpoint communication qubits are reset for reuse.

#include <string>
#include <vector>

#include "qdcsim/circuit.hpp"
#include "qdcsim/noise.hpp"
#include "qdcsim/topology.hpp"

namespace qdcsim {

struct LinkEndpoints {
  int qpu_a;
  int qpu_b;
  int comm_a;  // stays with qpu_a
  int comm_b;  // the transmitted half, at qpu_b
  int env;
};

struct RcnotPlan {
  int control_proc;
  int target_proc;
  std::vector<int> path;  // QPU ids, control's QPU first; length >= 2
  int clbit_m1;
  int clbit_m2;
};

namespace detail {

inline void check_link(const Circuit& c, const LinkEndpoints& link) {
  if (link.qpu_a == link.qpu_b) {
    throw std::invalid_argument("link endpoints must be distinct QPUs");
  }
  if (link.comm_a == link.comm_b || link.comm_a == link.env ||
      link.comm_b == link.env) {
    throw std::invalid_argument("link qubits must be distinct");
  }
  if (c.role(link.comm_a) != QubitRole::kCommunication ||
      c.role(link.comm_b) != QubitRole::kCommunication) {
    throw std::invalid_argument("link endpoints must be communication qubits");
  }
  if (c.role(link.env) != QubitRole::kEnvironment) {
    throw std::invalid_argument("link needs an environment qubit");
  }
}

inline std::string path_text(const std::vector<int>& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(path[i]);
  }
  return out;
}

}  // namespace detail

/// Appends noisy Bell-pair generation across one link: H(comm_a),
/// CNOT(comm_a -> comm_b), then a channel traversal on comm_b. With zero
/// noise the pair is exactly (|00> + |11>)/sqrt(2).
inline void build_bell_link(Circuit& c, const LinkEndpoints& link,
                            const NoiseParams& params) {
  detail::check_link(c, link);
  c.h(link.comm_a);
  c.cnot(link.comm_a, link.comm_b);
  insert_channel_traversal(c, link.comm_b, link.env, params);
}

/// Appends entanglement distribution along `path` (QPU ids, pairwise
/// adjacent). After k hops the pair spans (comm of path front, comm of path
/// back), having accrued k traversals and k-1 ideal SWAPs.
inline void distribute_entanglement(Circuit& c, const Topology& t,
                                    const std::vector<int>& path,
                                    const NoiseParams& params) {
  if (path.size() < 2) {
    throw std::invalid_argument("distribution path needs >= 2 QPUs");
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!t.adjacent(path[i], path[i + 1])) {
      throw std::invalid_argument(
          "path QPUs " + std::to_string(path[i]) + " and " +
          std::to_string(path[i + 1]) + " are not adjacent");
    }
  }
  LinkEndpoints first{path[0], path[1], t.comm_qubit(path[0]),
                      t.comm_qubit(path[1]), t.env_qubit()};
  build_bell_link(c, first, params);
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    int here = t.comm_qubit(path[i]);
    int next = t.comm_qubit(path[i + 1]);
    c.swap_gate(here, next);
    insert_channel_traversal(c, next, t.env_qubit(), params);
  }
}

/// Appends a full remote CNOT: distribution over plan.path, cat-entangler
/// (CNOT onto the source comm half, measure m1, conditional X on the
/// destination half), the local CNOT onto the target, cat-disentangler
/// (H, measure m2, conditional Z on the control), and endpoint comm resets.
inline void remote_cnot(Circuit& c, const Topology& t, const RcnotPlan& plan,
                        const NoiseParams& params) {
  if (plan.path.size() < 2) {
    throw std::invalid_argument("remote CNOT path needs >= 2 QPUs");
  }
  if (plan.clbit_m1 == plan.clbit_m2) {
    throw std::invalid_argument("remote CNOT needs two distinct clbits");
  }
  if (c.role(plan.control_proc) != QubitRole::kProcessing ||
      c.role(plan.target_proc) != QubitRole::kProcessing) {
    throw std::invalid_argument("remote CNOT endpoints must be processing");
  }
  int comm_src = t.comm_qubit(plan.path.front());
  int comm_dst = t.comm_qubit(plan.path.back());

  c.label("rcnot q" + std::to_string(plan.control_proc) + " -> q" +
          std::to_string(plan.target_proc) + " via " +
          detail::path_text(plan.path));
  distribute_entanglement(c, t, plan.path, params);

  c.cnot(plan.control_proc, comm_src);
  c.measure(comm_src, plan.clbit_m1);
  c.conditional(plan.clbit_m1, 1, Gate::kX, {comm_dst});

  c.cnot(comm_dst, plan.target_proc);

  c.h(comm_dst);
  c.measure(comm_dst, plan.clbit_m2);
  c.conditional(plan.clbit_m2, 1, Gate::kZ, {plan.control_proc});

  c.reset(comm_src);
  c.reset(comm_dst);
}

/// Bell fidelity of a pair whose transmitted half underwent damping with
/// survival s = prod(1 - gamma_i): F = (1 + sqrt(s))^2 / 4.
inline double bell_fidelity_from_survival(double survival) {
  if (survival < 0.0 || survival > 1.0 + 1e-12) {
    throw std::invalid_argument("survival must lie in [0, 1]");
  }
  double r = 1.0 + std::sqrt(std::min(survival, 1.0));
  return r * r / 4.0;
}

}  // namespace qdcsim

#endif  // QDCSIM_CATCOMM_HPP_
