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

#ifndef QDCSIM_GATES_HPP_
#define QDCSIM_GATES_HPP_

// Named gate set used by the circuit layer. Two-qubit gates follow the
// library-wide bit convention: gate qubit 0 (the least-significant bit of the
// 4x4 matrix index) binds to targets[0]. For CNOT, targets[0] is the control.

#include <numbers>
#include <string>

#include "qdcsim/state.hpp"

namespace qdcsim {

enum class Gate { kH, kX, kZ, kCnot, kSwap, kU2q };

inline const char* gate_name(Gate g) {
  switch (g) {
    case Gate::kH: return "H";
    case Gate::kX: return "X";
    case Gate::kZ: return "Z";
    case Gate::kCnot: return "CNOT";
    case Gate::kSwap: return "SWAP";
    case Gate::kU2q: return "U2Q";
  }
  throw internal_error("unknown gate tag");
}

inline int gate_arity(Gate g) {
  switch (g) {
    case Gate::kH:
    case Gate::kX:
    case Gate::kZ:
      return 1;
    case Gate::kCnot:
    case Gate::kSwap:
    case Gate::kU2q:
      return 2;
  }
  throw internal_error("unknown gate tag");
}

namespace gates {

inline const Unitary& hadamard() {
  constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
  static const Unitary u = Unitary::from_matrix(
      1, {complex_t{kInvSqrt2, 0.0}, complex_t{kInvSqrt2, 0.0},
          complex_t{kInvSqrt2, 0.0}, complex_t{-kInvSqrt2, 0.0}});
  return u;
}

inline const Unitary& pauli_x() {
  static const Unitary u = Unitary::from_matrix(
      1, {complex_t{0.0, 0.0}, complex_t{1.0, 0.0},
          complex_t{1.0, 0.0}, complex_t{0.0, 0.0}});
  return u;
}

inline const Unitary& pauli_z() {
  static const Unitary u = Unitary::from_matrix(
      1, {complex_t{1.0, 0.0}, complex_t{0.0, 0.0},
          complex_t{0.0, 0.0}, complex_t{-1.0, 0.0}});
  return u;
}

// Control = gate qubit 0 (index bit 0), target = gate qubit 1 (index bit 1).
inline const Unitary& cnot() {
  static const Unitary u = [] {
    std::vector<complex_t> m(16, complex_t{0.0, 0.0});
    m[0 * 4 + 0] = complex_t{1.0, 0.0};  // |00> -> |00>
    m[3 * 4 + 1] = complex_t{1.0, 0.0};  // |01> (c=1,t=0) -> |11>
    m[2 * 4 + 2] = complex_t{1.0, 0.0};  // |10> (c=0,t=1) -> |10>
    m[1 * 4 + 3] = complex_t{1.0, 0.0};  // |11> -> |01>
    return Unitary::from_matrix(2, std::move(m));
  }();
  return u;
}

inline const Unitary& swap() {
  static const Unitary u = [] {
    std::vector<complex_t> m(16, complex_t{0.0, 0.0});
    m[0 * 4 + 0] = complex_t{1.0, 0.0};
    m[2 * 4 + 1] = complex_t{1.0, 0.0};
    m[1 * 4 + 2] = complex_t{1.0, 0.0};
    m[3 * 4 + 3] = complex_t{1.0, 0.0};
    return Unitary::from_matrix(2, std::move(m));
  }();
  return u;
}

inline const Unitary& fixed_matrix(Gate g) {
  switch (g) {
    case Gate::kH: return hadamard();
    case Gate::kX: return pauli_x();
    case Gate::kZ: return pauli_z();
    case Gate::kCnot: return cnot();
    case Gate::kSwap: return swap();
    case Gate::kU2q:
      throw std::invalid_argument("U2Q carries an explicit matrix");
  }
  throw internal_error("unknown gate tag");
}

}  // namespace gates
}  // namespace qdcsim

#endif  // QDCSIM_GATES_HPP_
