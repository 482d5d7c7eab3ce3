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

#ifndef QDCSIM_TOPOLOGY_HPP_
#define QDCSIM_TOPOLOGY_HPP_

// Quantum data-center topology model: line / ring / star QPU graphs (plus
// custom edge lists), BFS routing with a fixed tie-break, and the closed-form
// entanglement-link cost of a root-fan-out GHZ construction.
//
// Canonical qubit layout for a topology with n QPUs and c communication
// qubits per QPU: QPU ids are 1-based; QPU i owns processing qubit (i-1) and
// communication qubits n + (i-1)*c .. n + (i-1)*c + (c-1); one shared
// environment qubit sits at index n*(1+c). Sequential remote-CNOT scheduling
// needs only one communication qubit per QPU for pass-through (the default);
// more can be provisioned for concurrent schedules.

#include <algorithm>
#include <deque>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qdcsim/circuit.hpp"
#include "qdcsim/state.hpp"

namespace qdcsim {

enum class TopologyKind { kLine, kRing, kStar, kCustom };

inline const char* topology_kind_name(TopologyKind k) {
  switch (k) {
    case TopologyKind::kLine: return "line";
    case TopologyKind::kRing: return "ring";
    case TopologyKind::kStar: return "star";
    case TopologyKind::kCustom: return "custom";
  }
  throw internal_error("unknown topology kind");
}

inline TopologyKind topology_kind_from_name(const std::string& name) {
  if (name == "line") return TopologyKind::kLine;
  if (name == "ring") return TopologyKind::kRing;
  if (name == "star") return TopologyKind::kStar;
  if (name == "custom") return TopologyKind::kCustom;
  throw std::invalid_argument("unknown topology kind '" + name +
                              "' (line, ring, star, custom)");
}

struct Qpu {
  int id;  // 1-based
  std::vector<int> processing;
  std::vector<int> communication;
};

class Topology {
 public:
  Topology(TopologyKind kind, int n_qpus,
           std::vector<std::pair<int, int>> edges, int root,
           int comm_per_qpu = 1)
      : kind_(kind), root_(root) {
    if (n_qpus < 2) throw std::invalid_argument("topology needs >= 2 QPUs");
    if (comm_per_qpu < 1) {
      throw std::invalid_argument("need >= 1 communication qubit per QPU");
    }
    if (root < 1 || root > n_qpus) {
      throw std::invalid_argument("root QPU id out of range");
    }
    qpus_.reserve(static_cast<std::size_t>(n_qpus));
    for (int i = 1; i <= n_qpus; ++i) {
      Qpu q;
      q.id = i;
      q.processing = {i - 1};
      for (int k = 0; k < comm_per_qpu; ++k) {
        q.communication.push_back(n_qpus + (i - 1) * comm_per_qpu + k);
      }
      qpus_.push_back(std::move(q));
    }
    env_qubit_ = n_qpus * (1 + comm_per_qpu);

    std::set<std::pair<int, int>> seen;
    adjacency_.assign(static_cast<std::size_t>(n_qpus) + 1, {});
    for (auto [a, b] : edges) {
      if (a < 1 || a > n_qpus || b < 1 || b > n_qpus) {
        throw std::invalid_argument("edge endpoint out of range");
      }
      if (a == b) throw std::invalid_argument("self-loop edge");
      auto key = std::minmax(a, b);
      if (!seen.insert(key).second) {
        throw std::invalid_argument("duplicate edge");
      }
      adjacency_[static_cast<std::size_t>(a)].push_back(b);
      adjacency_[static_cast<std::size_t>(b)].push_back(a);
      edges_.push_back(key);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
    std::sort(edges_.begin(), edges_.end());
    check_connected();
  }

  TopologyKind kind() const { return kind_; }
  int n_qpus() const { return static_cast<int>(qpus_.size()); }
  int root() const { return root_; }
  const std::vector<Qpu>& qpus() const { return qpus_; }
  const Qpu& qpu(int id) const {
    if (id < 1 || id > n_qpus()) {
      throw std::out_of_range("QPU id out of range");
    }
    return qpus_[static_cast<std::size_t>(id - 1)];
  }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int id) const {
    if (id < 1 || id > n_qpus()) {
      throw std::out_of_range("QPU id out of range");
    }
    return adjacency_[static_cast<std::size_t>(id)];
  }
  bool adjacent(int a, int b) const {
    const auto& nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  int processing_qubit(int id) const { return qpu(id).processing.at(0); }
  int comm_qubit(int id) const { return qpu(id).communication.at(0); }
  int env_qubit() const { return env_qubit_; }
  /// Register size: all QPU qubits plus the shared environment qubit.
  int n_qubits() const { return env_qubit_ + 1; }

 private:
  void check_connected() const {
    std::vector<bool> seen(static_cast<std::size_t>(n_qpus()) + 1, false);
    std::deque<int> queue{1};
    seen[1] = true;
    int count = 0;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      ++count;
      for (int w : adjacency_[static_cast<std::size_t>(v)]) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = true;
          queue.push_back(w);
        }
      }
    }
    if (count != n_qpus()) {
      throw std::invalid_argument("topology graph is not connected");
    }
  }

  TopologyKind kind_;
  int root_;
  std::vector<Qpu> qpus_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
  int env_qubit_;
};

/// Path graph 1-2-...-n; root at endpoint QPU 1.
inline Topology make_line(int n, int comm_per_qpu = 1) {
  if (n < 2) throw std::invalid_argument("line needs n >= 2");
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
  return Topology(TopologyKind::kLine, n, std::move(edges), 1, comm_per_qpu);
}

/// Single cycle 1-2-...-n-1; root at QPU 1.
inline Topology make_ring(int n, int comm_per_qpu = 1) {
  if (n < 3) throw std::invalid_argument("ring needs n >= 3");
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(n, 1);
  return Topology(TopologyKind::kRing, n, std::move(edges), 1, comm_per_qpu);
}

/// Hub QPU 1 adjacent to every leaf; root at the hub.
inline Topology make_star(int n, int comm_per_qpu = 1) {
  if (n < 2) throw std::invalid_argument("star needs n >= 2");
  std::vector<std::pair<int, int>> edges;
  for (int i = 2; i <= n; ++i) edges.emplace_back(1, i);
  return Topology(TopologyKind::kStar, n, std::move(edges), 1, comm_per_qpu);
}

/// Breadth-first shortest path from a to b (inclusive). Ties are broken
/// toward the lower QPU id at each expansion: neighbors are explored in
/// ascending id order and a vertex keeps its first-discovered parent.
inline std::vector<int> shortest_path(const Topology& t, int a, int b) {
  t.qpu(a);
  t.qpu(b);
  if (a == b) return {a};
  std::vector<int> parent(static_cast<std::size_t>(t.n_qpus()) + 1, 0);
  std::deque<int> queue{a};
  parent[static_cast<std::size_t>(a)] = a;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int w : t.neighbors(v)) {
      if (parent[static_cast<std::size_t>(w)] != 0) continue;
      parent[static_cast<std::size_t>(w)] = v;
      if (w == b) {
        std::vector<int> path{b};
        for (int u = b; u != a; u = parent[static_cast<std::size_t>(u)]) {
          path.push_back(parent[static_cast<std::size_t>(u)]);
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(w);
    }
  }
  throw internal_error("disconnected topology escaped validation");
}

/// Closed-form total entanglement links of the root-fan-out GHZ build:
/// sum over non-root QPUs of their distance to the canonical root.
inline long long link_cost_formula(TopologyKind kind, int n) {
  switch (kind) {
    case TopologyKind::kLine:
      if (n < 2) throw std::invalid_argument("line needs n >= 2");
      return static_cast<long long>(n) * (n - 1) / 2;
    case TopologyKind::kRing:
      if (n < 3) throw std::invalid_argument("ring needs n >= 3");
      if (n % 2 == 0) return static_cast<long long>(n) * n / 4;
      return static_cast<long long>(n - 1) * (n + 1) / 4;
    case TopologyKind::kStar:
      if (n < 2) throw std::invalid_argument("star needs n >= 2");
      return n - 1;
    case TopologyKind::kCustom:
      throw std::invalid_argument("no closed-form cost for custom topologies");
  }
  throw internal_error("unknown topology kind");
}

/// Fresh circuit over the topology's register with roles assigned; extra
/// qubits (appended after the environment) serve as reference qubits for
/// process tomography and are marked processing.
inline Circuit make_register(const Topology& t, int n_clbits,
                             int extra_qubits = 0) {
  if (extra_qubits < 0) throw std::invalid_argument("negative extra qubits");
  Circuit c(t.n_qubits() + extra_qubits, n_clbits);
  for (const auto& q : t.qpus()) {
    for (int p : q.processing) c.set_role(p, QubitRole::kProcessing);
    for (int m : q.communication) c.set_role(m, QubitRole::kCommunication);
  }
  c.set_role(t.env_qubit(), QubitRole::kEnvironment);
  return c;
}

}  // namespace qdcsim

#endif  // QDCSIM_TOPOLOGY_HPP_
