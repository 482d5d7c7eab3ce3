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

#ifndef QDCSIM_CIRCUIT_HPP_
#define QDCSIM_CIRCUIT_HPP_

// Circuit representation with classical bits, mid-circuit measurement, reset,
// and classically conditioned gates.
//
// Classical bits are single-assignment: each clbit is written by at most one
// Measure, and every Conditional reads a clbit that was written earlier.
// Conditionals guard plain gates only (no nested conditionals, no conditional
// measurement); the instruction encoding makes richer classical control
// unrepresentable.

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "qdcsim/gates.hpp"
#include "qdcsim/state.hpp"

namespace qdcsim {

enum class QubitRole { kProcessing, kCommunication, kEnvironment };

inline char role_char(QubitRole r) {
  switch (r) {
    case QubitRole::kProcessing: return 'p';
    case QubitRole::kCommunication: return 'c';
    case QubitRole::kEnvironment: return 'e';
  }
  throw internal_error("unknown qubit role");
}

// ---------------------------------------------------------------------------
// Instruction variants

struct GateOp {
  Gate gate;
  std::vector<int> targets;  // gate qubit j binds to targets[j]
  std::vector<double> params;
  std::shared_ptr<const Unitary> matrix;  // set iff gate == kU2q
  std::string name;                       // display name for kU2q dumps
};

struct MeasureOp {
  int qubit;
  int clbit;
};

struct ResetOp {
  int qubit;
};

struct ConditionalOp {
  int clbit;
  int value;  // 0 or 1
  GateOp inner;
};

struct LabelOp {
  std::string text;
};

using Instruction =
    std::variant<GateOp, MeasureOp, ResetOp, ConditionalOp, LabelOp>;

// ---------------------------------------------------------------------------
// Circuit

class Circuit {
 public:
  Circuit(int n_qubits, int n_clbits)
      : n_qubits_(n_qubits),
        n_clbits_(n_clbits),
        roles_(static_cast<std::size_t>(n_qubits), QubitRole::kProcessing) {
    if (n_qubits < 1) throw std::invalid_argument("circuit needs >= 1 qubit");
    if (n_clbits < 0) throw std::invalid_argument("negative clbit count");
  }

  int n_qubits() const { return n_qubits_; }
  int n_clbits() const { return n_clbits_; }
  const std::vector<Instruction>& instructions() const { return instrs_; }

  void set_role(int qubit, QubitRole role) {
    detail::check_qubit(qubit, n_qubits_);
    roles_[static_cast<std::size_t>(qubit)] = role;
  }
  QubitRole role(int qubit) const {
    detail::check_qubit(qubit, n_qubits_);
    return roles_[static_cast<std::size_t>(qubit)];
  }

  // Builders: the only mutation path. Each validates its arguments on append.

  void gate(Gate g, std::vector<int> targets) {
    if (g == Gate::kU2q) {
      throw std::invalid_argument("U2Q requires an explicit matrix");
    }
    check_gate_targets(g, targets);
    instrs_.push_back(GateOp{g, std::move(targets), {}, nullptr, {}});
  }

  void u2q(std::string name, const Unitary& u, std::vector<int> targets,
           std::vector<double> params = {}) {
    if (u.k_qubits() != 2) throw std::invalid_argument("U2Q matrix must be 4x4");
    check_gate_targets(Gate::kU2q, targets);
    instrs_.push_back(GateOp{Gate::kU2q, std::move(targets), std::move(params),
                             std::make_shared<const Unitary>(u),
                             std::move(name)});
  }
  void u2q(std::string name, std::shared_ptr<const Unitary> u,
           std::vector<int> targets, std::vector<double> params = {}) {
    if (!u || u->k_qubits() != 2) {
      throw std::invalid_argument("U2Q matrix must be 4x4");
    }
    check_gate_targets(Gate::kU2q, targets);
    instrs_.push_back(GateOp{Gate::kU2q, std::move(targets), std::move(params),
                             std::move(u), std::move(name)});
  }

  void h(int q) { gate(Gate::kH, {q}); }
  void x(int q) { gate(Gate::kX, {q}); }
  void z(int q) { gate(Gate::kZ, {q}); }
  void cnot(int control, int target) { gate(Gate::kCnot, {control, target}); }
  void swap_gate(int a, int b) { gate(Gate::kSwap, {a, b}); }

  void append_standard_gate(const std::string& name, std::vector<int> targets) {
    gate(gate_from_name(name), std::move(targets));
  }

  void measure(int qubit, int clbit) {
    detail::check_qubit(qubit, n_qubits_);
    check_clbit(clbit);
    if (written_.count(clbit)) {
      throw std::invalid_argument("clbit c" + std::to_string(clbit) +
                                  " already written (single-assignment)");
    }
    written_.insert(clbit);
    instrs_.push_back(MeasureOp{qubit, clbit});
  }

  void reset(int qubit) {
    detail::check_qubit(qubit, n_qubits_);
    instrs_.push_back(ResetOp{qubit});
  }

  void conditional(int clbit, int value, Gate g, std::vector<int> targets) {
    check_clbit(clbit);
    if (value != 0 && value != 1) {
      throw std::invalid_argument("conditional value must be 0 or 1");
    }
    if (!written_.count(clbit)) {
      throw std::invalid_argument("conditional reads unwritten clbit c" +
                                  std::to_string(clbit));
    }
    if (g == Gate::kU2q) {
      throw std::invalid_argument("conditional U2Q not supported");
    }
    check_gate_targets(g, targets);
    instrs_.push_back(ConditionalOp{
        clbit, value, GateOp{g, std::move(targets), {}, nullptr, {}}});
  }

  void label(std::string text) { instrs_.push_back(LabelOp{std::move(text)}); }

  /// Re-runs the static checks over the whole instruction list. Builders
  /// enforce these incrementally; this guards circuits assembled elsewhere.
  void validate() const {
    std::unordered_set<int> written;
    for (const auto& ins : instrs_) {
      if (const auto* g = std::get_if<GateOp>(&ins)) {
        check_gate_targets(g->gate, g->targets);
        if ((g->gate == Gate::kU2q) != (g->matrix != nullptr)) {
          throw std::invalid_argument("U2Q matrix presence mismatch");
        }
      } else if (const auto* m = std::get_if<MeasureOp>(&ins)) {
        detail::check_qubit(m->qubit, n_qubits_);
        check_clbit(m->clbit);
        if (!written.insert(m->clbit).second) {
          throw std::invalid_argument("clbit c" + std::to_string(m->clbit) +
                                      " written twice");
        }
      } else if (const auto* r = std::get_if<ResetOp>(&ins)) {
        detail::check_qubit(r->qubit, n_qubits_);
      } else if (const auto* c = std::get_if<ConditionalOp>(&ins)) {
        check_clbit(c->clbit);
        if (!written.count(c->clbit)) {
          throw std::invalid_argument("conditional reads unwritten clbit c" +
                                      std::to_string(c->clbit));
        }
        check_gate_targets(c->inner.gate, c->inner.targets);
      }
    }
  }

  /// Human-readable listing, one instruction per line; stable across builds
  /// of the same circuit, suitable for golden-file comparison.
  std::string dump() const {
    std::string out;
    out += "qubits: " + std::to_string(n_qubits_) + "\n";
    out += "roles: ";
    for (int q = 0; q < n_qubits_; ++q) {
      if (q) out += ' ';
      out += role_char(roles_[static_cast<std::size_t>(q)]);
    }
    out += "\n";
    out += "clbits: " + std::to_string(n_clbits_) + "\n";
    for (const auto& ins : instrs_) {
      out += format_instruction(ins);
      out += "\n";
    }
    return out;
  }

 private:
  static Gate gate_from_name(const std::string& name) {
    if (name == "H") return Gate::kH;
    if (name == "X") return Gate::kX;
    if (name == "Z") return Gate::kZ;
    if (name == "CNOT") return Gate::kCnot;
    if (name == "SWAP") return Gate::kSwap;
    if (name == "U2Q" || name == "U2q") {
      throw std::invalid_argument("U2Q requires an explicit matrix");
    }
    throw std::invalid_argument(
        "unknown gate name '" + name + "' (library: H, X, Z, CNOT, SWAP, U2q)");
  }

  void check_clbit(int clbit) const {
    if (clbit < 0 || clbit >= n_clbits_) {
      throw std::out_of_range("clbit index " + std::to_string(clbit) +
                              " out of range for " + std::to_string(n_clbits_) +
                              " clbits");
    }
  }

  void check_gate_targets(Gate g, const std::vector<int>& targets) const {
    detail::check_targets(targets, n_qubits_);
    if (static_cast<int>(targets.size()) != gate_arity(g)) {
      throw std::invalid_argument(std::string("gate ") + gate_name(g) +
                                  " expects " + std::to_string(gate_arity(g)) +
                                  " target(s), got " +
                                  std::to_string(targets.size()));
    }
  }

  static std::string format_gate(const GateOp& g) {
    std::string out =
        g.gate == Gate::kU2q ? (g.name.empty() ? "U2Q" : g.name)
                             : std::string(gate_name(g.gate));
    if (!g.params.empty()) {
      out += '(';
      for (std::size_t i = 0; i < g.params.size(); ++i) {
        if (i) out += ',';
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", g.params[i]);
        out += buf;
      }
      out += ')';
    }
    for (int t : g.targets) out += " q" + std::to_string(t);
    return out;
  }

  static std::string format_instruction(const Instruction& ins) {
    if (const auto* g = std::get_if<GateOp>(&ins)) {
      return format_gate(*g);
    }
    if (const auto* m = std::get_if<MeasureOp>(&ins)) {
      return "MEASURE q" + std::to_string(m->qubit) + " -> c" +
             std::to_string(m->clbit);
    }
    if (const auto* r = std::get_if<ResetOp>(&ins)) {
      return "RESET q" + std::to_string(r->qubit);
    }
    if (const auto* c = std::get_if<ConditionalOp>(&ins)) {
      return "IF c" + std::to_string(c->clbit) + "=" +
             std::to_string(c->value) + ": " + format_gate(c->inner);
    }
    if (const auto* l = std::get_if<LabelOp>(&ins)) {
      return "# " + l->text;
    }
    throw internal_error("unknown instruction variant");
  }

  int n_qubits_;
  int n_clbits_;
  std::vector<QubitRole> roles_;
  std::vector<Instruction> instrs_;
  std::unordered_set<int> written_;
};

}  // namespace qdcsim

#endif  // QDCSIM_CIRCUIT_HPP_
