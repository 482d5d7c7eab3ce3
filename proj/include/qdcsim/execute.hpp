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

#ifndef QDCSIM_EXECUTE_HPP_
#define QDCSIM_EXECUTE_HPP_

// Two execution backends over the circuit IR:
//
//   execute_exact       deterministic density-matrix backend; measurements
//                       split classical branches, feedforward is literal.
//   execute_trajectories sampled statevector backend with per-shot seeded
//                       substreams; bit-identical for identical
//                       (circuit, shots, seed).
//
// The exact backend merges branches once they agree on every clbit that can
// still be read by a remaining Conditional (a clbit's influence ends after
// its last read; clbits never read keep distinguishing their branches).
// Merging a convex mixture commutes with every remaining instruction kind,
// so results are unchanged while branch counts stay bounded by the
// feedforward window instead of the measurement count.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include "qdcsim/circuit.hpp"
#include "qdcsim/gates.hpp"
#include "qdcsim/state.hpp"

namespace qdcsim {

namespace detail {

template <class StateT>
void apply_gate_op(StateT& st, const GateOp& g) {
  switch (g.gate) {
    case Gate::kX:
      apply_x(st, g.targets[0]);
      return;
    case Gate::kZ:
      apply_z(st, g.targets[0]);
      return;
    case Gate::kCnot:
      apply_cnot(st, g.targets[0], g.targets[1]);
      return;
    case Gate::kSwap:
      apply_swap(st, g.targets[0], g.targets[1]);
      return;
    case Gate::kH:
      apply_unitary(st, gates::hadamard(), g.targets);
      return;
    case Gate::kU2q:
      if (!g.matrix) throw internal_error("U2Q without matrix");
      apply_unitary(st, *g.matrix, g.targets);
      return;
  }
  throw internal_error("unknown gate tag");
}

// Index of the last instruction that reads each clbit; -1 when never read.
inline std::vector<int> last_read_index(const Circuit& c) {
  std::vector<int> last(static_cast<std::size_t>(c.n_clbits()), -1);
  const auto& ins = c.instructions();
  for (std::size_t i = 0; i < ins.size(); ++i) {
    if (const auto* cond = std::get_if<ConditionalOp>(&ins[i])) {
      last[static_cast<std::size_t>(cond->clbit)] = static_cast<int>(i);
    }
  }
  return last;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exact branch-tracking backend

struct BranchState {
  double probability;
  MixedState state;
  // Outcome record. Bits whose branches were merged away (no remaining
  // reader could distinguish them) are reported as 0.
  std::vector<std::uint8_t> clbits;
};

struct ExactResult {
  std::vector<BranchState> branches;
  MixedState merged;  // sum of p * rho over branches, all qubits kept
};

struct ExactOptions {
  bool merge_spent_branches = true;
};

inline ExactResult execute_exact(const Circuit& c,
                                 const ExactOptions& opt = {}) {
  c.validate();
  const auto last_read = detail::last_read_index(c);
  const int n_cl = c.n_clbits();

  std::vector<BranchState> branches;
  branches.push_back(BranchState{
      1.0, MixedState(c.n_qubits()),
      std::vector<std::uint8_t>(static_cast<std::size_t>(n_cl), 0)});

  const auto& ins = c.instructions();
  for (std::size_t i = 0; i < ins.size(); ++i) {
    if (const auto* g = std::get_if<GateOp>(&ins[i])) {
      for (auto& b : branches) detail::apply_gate_op(b.state, *g);
    } else if (const auto* m = std::get_if<MeasureOp>(&ins[i])) {
      std::vector<BranchState> next;
      next.reserve(branches.size() * 2);
      for (auto& b : branches) {
        auto split = measurement_branches(b.state, m->qubit);
        for (auto& s : split) {
          BranchState child{b.probability * s.probability, std::move(s.state),
                            b.clbits};
          child.clbits[static_cast<std::size_t>(m->clbit)] =
              static_cast<std::uint8_t>(s.outcome);
          next.push_back(std::move(child));
        }
      }
      branches = std::move(next);
    } else if (const auto* r = std::get_if<ResetOp>(&ins[i])) {
      for (auto& b : branches) reset_qubit(b.state, r->qubit);
    } else if (const auto* cond = std::get_if<ConditionalOp>(&ins[i])) {
      for (auto& b : branches) {
        if (b.clbits[static_cast<std::size_t>(cond->clbit)] == cond->value) {
          detail::apply_gate_op(b.state, cond->inner);
        }
      }
    }
    // LabelOp: no effect.

    double total = 0.0;
    for (const auto& b : branches) total += b.probability;
    if (std::abs(total - 1.0) > 1e-9) {
      throw internal_error("branch probabilities do not sum to 1");
    }

    bool retired = false;
    for (int b = 0; b < n_cl; ++b) {
      if (last_read[static_cast<std::size_t>(b)] == static_cast<int>(i)) {
        retired = true;
      }
    }
    if (retired && opt.merge_spent_branches && branches.size() > 1) {
      // Signature = values of clbits still readable later plus clbits that
      // are never read (those stay visible in the returned branch list).
      std::map<std::vector<std::uint8_t>, std::size_t> by_sig;
      std::vector<BranchState> merged_branches;
      for (auto& b : branches) {
        std::vector<std::uint8_t> sig(b.clbits);
        for (int bit = 0; bit < n_cl; ++bit) {
          int lr = last_read[static_cast<std::size_t>(bit)];
          if (lr >= 0 && lr <= static_cast<int>(i)) {
            sig[static_cast<std::size_t>(bit)] = 0;  // spent: not part of sig
          }
        }
        auto it = by_sig.find(sig);
        if (it == by_sig.end()) {
          by_sig.emplace(sig, merged_branches.size());
          b.clbits = sig;
          merged_branches.push_back(std::move(b));
        } else {
          BranchState& dst = merged_branches[it->second];
          double p_new = dst.probability + b.probability;
          auto& acc = dst.state.data();
          const auto& add = b.state.data();
          double wa = dst.probability / p_new, wb = b.probability / p_new;
          for (std::size_t k = 0; k < acc.size(); ++k) {
            acc[k] = acc[k] * wa + add[k] * wb;
          }
          dst.probability = p_new;
        }
      }
      branches = std::move(merged_branches);
    }
  }

  MixedState merged(c.n_qubits());
  merged.data().assign(merged.data().size(), complex_t{0.0, 0.0});
  for (const auto& b : branches) {
    const auto& src = b.state.data();
    auto& dst = merged.data();
    for (std::size_t k = 0; k < dst.size(); ++k) {
      dst[k] += b.probability * src[k];
    }
  }
  return ExactResult{std::move(branches), std::move(merged)};
}

// ---------------------------------------------------------------------------
// Trajectory backend

/// Deterministic per-shot uniform stream: mt19937_64 seeded via a splitmix64
/// finalizer over (seed, shot), 53-bit mantissa doubles in [0, 1).
class ShotRng {
 public:
  explicit ShotRng(std::uint64_t seed) : gen_(seed) {}
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 gen_;
};

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t shot) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (shot + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Runs `shots` sampled trajectories; calls
/// on_shot(shot_index, final PureState, clbits) after each.
template <class OnShot>
void execute_trajectories(const Circuit& c, int shots, std::uint64_t seed,
                          OnShot&& on_shot) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  c.validate();
  const auto& ins = c.instructions();
  for (int shot = 0; shot < shots; ++shot) {
    ShotRng rng(substream_seed(seed, static_cast<std::uint64_t>(shot)));
    PureState psi(c.n_qubits());
    std::vector<std::uint8_t> clbits(static_cast<std::size_t>(c.n_clbits()), 0);
    for (const auto& in : ins) {
      if (const auto* g = std::get_if<GateOp>(&in)) {
        detail::apply_gate_op(psi, *g);
      } else if (const auto* m = std::get_if<MeasureOp>(&in)) {
        int outcome = measure_sampled(psi, m->qubit, rng);
        clbits[static_cast<std::size_t>(m->clbit)] =
            static_cast<std::uint8_t>(outcome);
      } else if (const auto* r = std::get_if<ResetOp>(&in)) {
        // Reset = measure, then flip to |0> on outcome 1 (same definition
        // as the exact backend's reset channel).
        if (measure_sampled(psi, r->qubit, rng) == 1) apply_x(psi, r->qubit);
      } else if (const auto* cond = std::get_if<ConditionalOp>(&in)) {
        if (clbits[static_cast<std::size_t>(cond->clbit)] == cond->value) {
          detail::apply_gate_op(psi, cond->inner);
        }
      }
    }
    on_shot(shot, psi, clbits);
  }
}

struct TrajectoryEstimate {
  double mean;
  double stderr_of_mean;  // sample stdev (n-1 denominator) / sqrt(shots)
  int shots;
};

/// Aggregate fidelity estimator: per shot, the overlap probability of the
/// final statevector with `target` on `target_qubits` (remaining qubits
/// summed over); returns mean and standard error across shots.
inline TrajectoryEstimate estimate_overlap(const Circuit& c, int shots,
                                           std::uint64_t seed,
                                           const PureState& target,
                                           const std::vector<int>& target_qubits) {
  // Welford update: immune to the cancellation the naive sum-of-squares
  // formula hits when every shot lands on the same value.
  double mean = 0.0, m2 = 0.0;
  int n = 0;
  execute_trajectories(
      c, shots, seed,
      [&](int, const PureState& psi, const std::vector<std::uint8_t>&) {
        double f = overlap_probability(psi, target, target_qubits);
        ++n;
        double delta = f - mean;
        mean += delta / n;
        m2 += delta * (f - mean);
      });
  double stderr_of_mean = 0.0;
  if (shots > 1) {
    stderr_of_mean = std::sqrt(std::max(m2 / (shots - 1), 0.0) / shots);
  }
  return TrajectoryEstimate{mean, stderr_of_mean, shots};
}

}  // namespace qdcsim

#endif  // QDCSIM_EXECUTE_HPP_
