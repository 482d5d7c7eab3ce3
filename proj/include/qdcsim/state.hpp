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

#ifndef QDCSIM_STATE_HPP_
#define QDCSIM_STATE_HPP_

// Dense numerical backend for pure and mixed quantum states: unitary and
// Kraus-channel application, sampled measurement, measurement branching,
// reset, partial trace, and fidelity.
//
// Conventions, fixed everywhere in this library:
//   - qubit index 0 is the least-significant bit of a basis-state index;
//   - matrices are stored row-major;
//   - in apply_unitary, qubit j of the gate matrix corresponds to targets[j]
//     (so targets[0] is the least-significant gate qubit).
//
// Practical ceilings with dense storage: ~24 qubits for PureState,
// ~12 qubits for MixedState.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdcsim {

using complex_t = std::complex<double>;

/// Thrown when an internal invariant is violated (a bug, not a usage error).
struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

namespace detail {

inline std::size_t dim_of(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 30) {
    throw std::invalid_argument("qubit count out of range: " +
                                std::to_string(n_qubits));
  }
  return std::size_t{1} << n_qubits;
}

inline void check_qubit(int q, int n_qubits) {
  if (q < 0 || q >= n_qubits) {
    throw std::out_of_range("qubit index " + std::to_string(q) +
                            " out of range for " + std::to_string(n_qubits) +
                            " qubits");
  }
}

inline void check_targets(const std::vector<int>& targets, int n_qubits) {
  if (targets.empty()) throw std::invalid_argument("empty target list");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    check_qubit(targets[i], n_qubits);
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (targets[i] == targets[j]) {
        throw std::invalid_argument("duplicate target qubit " +
                                    std::to_string(targets[i]));
      }
    }
  }
}

inline bool is_finite(complex_t z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Inserts zero bits at the (ascending-sorted) positions in `bits`, spreading
// the low bits of `x` around them. Used to enumerate subspace base indices.
inline std::uint64_t spread_index(std::uint64_t x,
                                  const std::vector<int>& sorted_bits) {
  for (int b : sorted_bits) {
    std::uint64_t low = x & ((std::uint64_t{1} << b) - 1);
    x = ((x >> b) << (b + 1)) | low;
  }
  return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Unitary

/// Dense k-qubit unitary, validated U†U = I (1e-10 elementwise) on build.
class Unitary {
 public:
  static Unitary from_matrix(int k_qubits, std::vector<complex_t> row_major) {
    Unitary u(k_qubits, std::move(row_major));
    if (!u.is_unitary(1e-10)) {
      throw std::invalid_argument("matrix is not unitary within 1e-10");
    }
    return u;
  }

  int k_qubits() const { return k_; }
  std::size_t dim() const { return dim_; }
  complex_t operator()(std::size_t r, std::size_t c) const {
    return m_[r * dim_ + c];
  }
  const std::vector<complex_t>& data() const { return m_; }

  Unitary dagger() const {
    std::vector<complex_t> d(m_.size());
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c)
        d[c * dim_ + r] = std::conj(m_[r * dim_ + c]);
    Unitary out(k_, std::move(d));
    return out;
  }

  bool is_unitary(double tol) const {
    for (std::size_t r = 0; r < dim_; ++r) {
      for (std::size_t c = 0; c < dim_; ++c) {
        complex_t acc{0.0, 0.0};
        for (std::size_t k = 0; k < dim_; ++k) {
          acc += std::conj(m_[k * dim_ + r]) * m_[k * dim_ + c];
        }
        complex_t expect = (r == c) ? complex_t{1.0, 0.0} : complex_t{0.0, 0.0};
        if (std::abs(acc - expect) > tol) return false;
      }
    }
    return true;
  }

 private:
  Unitary(int k_qubits, std::vector<complex_t> row_major)
      : k_(k_qubits), dim_(detail::dim_of(k_qubits)), m_(std::move(row_major)) {
    if (m_.size() != dim_ * dim_) {
      throw std::invalid_argument("unitary data size does not match 2^k x 2^k");
    }
  }

  int k_;
  std::size_t dim_;
  std::vector<complex_t> m_;
};

// ---------------------------------------------------------------------------
// KrausChannel

/// Trace-preserving k-qubit channel {K_i}: Σ K†K = I within 1e-10.
class KrausChannel {
 public:
  static KrausChannel from_operators(int k_qubits,
                                     std::vector<std::vector<complex_t>> ops) {
    KrausChannel ch;
    ch.k_ = k_qubits;
    ch.dim_ = detail::dim_of(k_qubits);
    if (ops.empty()) throw std::invalid_argument("empty Kraus operator list");
    for (const auto& op : ops) {
      if (op.size() != ch.dim_ * ch.dim_) {
        throw std::invalid_argument("Kraus operator has wrong dimension");
      }
    }
    ch.ops_ = std::move(ops);
    for (std::size_t r = 0; r < ch.dim_; ++r) {
      for (std::size_t c = 0; c < ch.dim_; ++c) {
        complex_t acc{0.0, 0.0};
        for (const auto& op : ch.ops_) {
          for (std::size_t k = 0; k < ch.dim_; ++k) {
            acc += std::conj(op[k * ch.dim_ + r]) * op[k * ch.dim_ + c];
          }
        }
        complex_t expect = (r == c) ? complex_t{1.0, 0.0} : complex_t{0.0, 0.0};
        if (std::abs(acc - expect) > 1e-10) {
          throw std::invalid_argument(
              "Kraus operators are not trace-preserving within 1e-10");
        }
      }
    }
    return ch;
  }

  int k_qubits() const { return k_; }
  std::size_t dim() const { return dim_; }
  const std::vector<std::vector<complex_t>>& operators() const { return ops_; }

 private:
  KrausChannel() = default;
  int k_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::vector<complex_t>> ops_;
};

// ---------------------------------------------------------------------------
// PureState

class PureState {
 public:
  /// |0...0> on n qubits.
  explicit PureState(int n_qubits)
      : n_(n_qubits), amps_(detail::dim_of(n_qubits), complex_t{0.0, 0.0}) {
    amps_[0] = complex_t{1.0, 0.0};
  }

  static PureState basis(int n_qubits, std::uint64_t index) {
    PureState s(n_qubits);
    if (index >= s.dim()) throw std::out_of_range("basis index out of range");
    s.amps_[0] = complex_t{0.0, 0.0};
    s.amps_[index] = complex_t{1.0, 0.0};
    return s;
  }

  /// Builds from explicit amplitudes; requires unit L2 norm within 1e-9.
  static PureState from_amplitudes(int n_qubits, std::vector<complex_t> amps) {
    PureState s(n_qubits);
    if (amps.size() != s.dim()) {
      throw std::invalid_argument("amplitude vector size does not match 2^n");
    }
    s.amps_ = std::move(amps);
    if (std::abs(s.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("amplitudes are not normalized within 1e-9");
    }
    return s;
  }

  int n_qubits() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  complex_t amp(std::uint64_t i) const { return amps_[i]; }
  const std::vector<complex_t>& amplitudes() const { return amps_; }
  std::vector<complex_t>& amplitudes() { return amps_; }

  double norm() const {
    double acc = 0.0;
    for (complex_t a : amps_) acc += std::norm(a);
    return std::sqrt(acc);
  }

  void renormalize() {
    double n = norm();
    if (n < 1e-12) throw internal_error("cannot renormalize ~zero state");
    for (complex_t& a : amps_) a /= n;
  }

  /// |<other|this>|^2.
  double overlap(const PureState& other) const {
    if (other.n_ != n_) throw std::invalid_argument("qubit count mismatch");
    complex_t acc{0.0, 0.0};
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      acc += std::conj(other.amps_[i]) * amps_[i];
    }
    return std::norm(acc);
  }

 private:
  int n_;
  std::vector<complex_t> amps_;
};

// ---------------------------------------------------------------------------
// MixedState

class MixedState {
 public:
  /// |0...0><0...0| on n qubits.
  explicit MixedState(int n_qubits)
      : n_(n_qubits),
        dim_(detail::dim_of(n_qubits)),
        rho_(dim_ * dim_, complex_t{0.0, 0.0}) {
    rho_[0] = complex_t{1.0, 0.0};
  }

  static MixedState from_pure(const PureState& psi) {
    MixedState m(psi.n_qubits());
    const auto& a = psi.amplitudes();
    for (std::size_t i = 0; i < m.dim_; ++i) {
      for (std::size_t j = 0; j < m.dim_; ++j) {
        m.rho_[i * m.dim_ + j] = a[i] * std::conj(a[j]);
      }
    }
    return m;
  }

  static MixedState maximally_mixed(int n_qubits) {
    MixedState m(n_qubits);
    m.rho_[0] = complex_t{0.0, 0.0};
    double p = 1.0 / static_cast<double>(m.dim_);
    for (std::size_t i = 0; i < m.dim_; ++i) {
      m.rho_[i * m.dim_ + i] = complex_t{p, 0.0};
    }
    return m;
  }

  /// Builds from an explicit matrix; requires Hermitian + unit trace (1e-9).
  static MixedState from_matrix(int n_qubits, std::vector<complex_t> row_major) {
    MixedState m(n_qubits);
    if (row_major.size() != m.dim_ * m.dim_) {
      throw std::invalid_argument("density matrix size does not match 2^n");
    }
    m.rho_ = std::move(row_major);
    double herm = 0.0;
    for (std::size_t i = 0; i < m.dim_; ++i) {
      for (std::size_t j = i; j < m.dim_; ++j) {
        herm = std::max(herm, std::abs(m.at(i, j) - std::conj(m.at(j, i))));
      }
    }
    if (herm > 1e-9) {
      throw std::invalid_argument("density matrix is not Hermitian within 1e-9");
    }
    if (std::abs(m.trace() - 1.0) > 1e-9) {
      throw std::invalid_argument("density matrix trace is not 1 within 1e-9");
    }
    return m;
  }

  int n_qubits() const { return n_; }
  std::size_t dim() const { return dim_; }
  complex_t at(std::size_t i, std::size_t j) const { return rho_[i * dim_ + j]; }
  complex_t& at(std::size_t i, std::size_t j) { return rho_[i * dim_ + j]; }
  const std::vector<complex_t>& data() const { return rho_; }
  std::vector<complex_t>& data() { return rho_; }

  double trace() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) acc += rho_[i * dim_ + i].real();
    return acc;
  }

  /// Tr(rho^2) = Σ |rho_ij|^2 for Hermitian rho.
  double purity() const {
    double acc = 0.0;
    for (complex_t z : rho_) acc += std::norm(z);
    return acc;
  }

  void rescale(double factor) {
    for (complex_t& z : rho_) z *= factor;
  }

 private:
  int n_;
  std::size_t dim_;
  std::vector<complex_t> rho_;
};

// ---------------------------------------------------------------------------
// Gate-application kernels

namespace detail {

struct TargetMap {
  std::vector<int> sorted;            // target bits, ascending
  std::vector<std::uint64_t> offset;  // offset[l] for local index l
  std::size_t subdim;                 // 2^k
  std::size_t n_groups;               // 2^(n-k)
};

inline TargetMap make_target_map(const std::vector<int>& targets, int n_qubits) {
  TargetMap tm;
  tm.sorted = targets;
  std::sort(tm.sorted.begin(), tm.sorted.end());
  tm.subdim = std::size_t{1} << targets.size();
  tm.n_groups = (std::size_t{1} << n_qubits) >> targets.size();
  tm.offset.resize(tm.subdim);
  for (std::size_t l = 0; l < tm.subdim; ++l) {
    std::uint64_t off = 0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      if ((l >> j) & 1u) off |= std::uint64_t{1} << targets[j];
    }
    tm.offset[l] = off;
  }
  return tm;
}

// Sparse row structure of a small matrix: per output row, its nonzero columns.
struct SmallMatrix {
  std::size_t dim;
  std::vector<std::vector<std::pair<std::size_t, complex_t>>> rows;
};

inline SmallMatrix sparse_rows(const Unitary& u, bool conjugate) {
  SmallMatrix sm;
  sm.dim = u.dim();
  sm.rows.resize(sm.dim);
  for (std::size_t r = 0; r < sm.dim; ++r) {
    for (std::size_t c = 0; c < sm.dim; ++c) {
      complex_t v = conjugate ? std::conj(u(r, c)) : u(r, c);
      if (v != complex_t{0.0, 0.0}) sm.rows[r].emplace_back(c, v);
    }
  }
  return sm;
}

// y_l = Σ_s M[l][s] x_s on the gathered subspace elements of one group.
inline void apply_small_to_vector(std::vector<complex_t>& amps,
                                  const SmallMatrix& m, const TargetMap& tm) {
  std::vector<complex_t> in(tm.subdim), out(tm.subdim);
  for (std::size_t g = 0; g < tm.n_groups; ++g) {
    std::uint64_t base = spread_index(g, tm.sorted);
    for (std::size_t l = 0; l < tm.subdim; ++l) in[l] = amps[base + tm.offset[l]];
    for (std::size_t l = 0; l < tm.subdim; ++l) {
      complex_t acc{0.0, 0.0};
      for (const auto& [s, v] : m.rows[l]) acc += v * in[s];
      out[l] = acc;
    }
    for (std::size_t l = 0; l < tm.subdim; ++l) amps[base + tm.offset[l]] = out[l];
  }
}

}  // namespace detail

/// |psi> -> (U ⊗ I)|psi> with U embedded on `targets`.
inline void apply_unitary(PureState& state, const Unitary& u,
                          const std::vector<int>& targets) {
  detail::check_targets(targets, state.n_qubits());
  if (static_cast<std::size_t>(u.k_qubits()) != targets.size()) {
    throw std::invalid_argument("gate arity does not match target count");
  }
  auto tm = detail::make_target_map(targets, state.n_qubits());
  auto sm = detail::sparse_rows(u, /*conjugate=*/false);
  detail::apply_small_to_vector(state.amplitudes(), sm, tm);
}

/// rho -> U rho U† with U embedded on `targets`.
inline void apply_unitary(MixedState& state, const Unitary& u,
                          const std::vector<int>& targets) {
  detail::check_targets(targets, state.n_qubits());
  if (static_cast<std::size_t>(u.k_qubits()) != targets.size()) {
    throw std::invalid_argument("gate arity does not match target count");
  }
  const std::size_t dim = state.dim();
  auto tm = detail::make_target_map(targets, state.n_qubits());
  auto sm = detail::sparse_rows(u, /*conjugate=*/false);
  auto smc = detail::sparse_rows(u, /*conjugate=*/true);
  auto* rho = state.data().data();

  // Left multiply: rows within a group mix; rows are contiguous.
  std::vector<std::vector<complex_t>> scratch(tm.subdim,
                                              std::vector<complex_t>(dim));
  for (std::size_t g = 0; g < tm.n_groups; ++g) {
    std::uint64_t base = detail::spread_index(g, tm.sorted);
    for (std::size_t l = 0; l < tm.subdim; ++l) {
      complex_t* out = scratch[l].data();
      std::fill(out, out + dim, complex_t{0.0, 0.0});
      for (const auto& [s, v] : sm.rows[l]) {
        const complex_t* in = rho + (base + tm.offset[s]) * dim;
        for (std::size_t c = 0; c < dim; ++c) out[c] += v * in[c];
      }
    }
    for (std::size_t l = 0; l < tm.subdim; ++l) {
      std::copy(scratch[l].begin(), scratch[l].end(),
                rho + (base + tm.offset[l]) * dim);
    }
  }

  // Right multiply by U†: per row, columns within a group mix via conj(U).
  std::vector<complex_t> in(tm.subdim), out(tm.subdim);
  for (std::size_t r = 0; r < dim; ++r) {
    complex_t* row = rho + r * dim;
    for (std::size_t g = 0; g < tm.n_groups; ++g) {
      std::uint64_t base = detail::spread_index(g, tm.sorted);
      for (std::size_t l = 0; l < tm.subdim; ++l) in[l] = row[base + tm.offset[l]];
      for (std::size_t l = 0; l < tm.subdim; ++l) {
        complex_t acc{0.0, 0.0};
        for (const auto& [s, v] : smc.rows[l]) acc += v * in[s];
        out[l] = acc;
      }
      for (std::size_t l = 0; l < tm.subdim; ++l) row[base + tm.offset[l]] = out[l];
    }
  }
}

/// rho -> Σ K rho K† on `targets`.
inline void apply_kraus(MixedState& state, const KrausChannel& ch,
                        const std::vector<int>& targets) {
  detail::check_targets(targets, state.n_qubits());
  if (static_cast<std::size_t>(ch.k_qubits()) != targets.size()) {
    throw std::invalid_argument("channel arity does not match target count");
  }
  const std::size_t dim = state.dim();
  auto tm = detail::make_target_map(targets, state.n_qubits());

  std::vector<complex_t> acc(dim * dim, complex_t{0.0, 0.0});
  std::vector<complex_t> term(dim * dim);
  for (const auto& op : ch.operators()) {
    // K rho K† = (left multiply K) then (right multiply K†), on a copy.
    term = state.data();
    std::vector<std::vector<std::pair<std::size_t, complex_t>>> rows(tm.subdim),
        rows_conj(tm.subdim);
    for (std::size_t r = 0; r < tm.subdim; ++r) {
      for (std::size_t c = 0; c < tm.subdim; ++c) {
        complex_t v = op[r * tm.subdim + c];
        if (v != complex_t{0.0, 0.0}) {
          rows[r].emplace_back(c, v);
          rows_conj[r].emplace_back(c, std::conj(v));
        }
      }
    }
    std::vector<std::vector<complex_t>> scratch(tm.subdim,
                                                std::vector<complex_t>(dim));
    complex_t* t = term.data();
    for (std::size_t g = 0; g < tm.n_groups; ++g) {
      std::uint64_t base = detail::spread_index(g, tm.sorted);
      for (std::size_t l = 0; l < tm.subdim; ++l) {
        complex_t* out = scratch[l].data();
        std::fill(out, out + dim, complex_t{0.0, 0.0});
        for (const auto& [s, v] : rows[l]) {
          const complex_t* in = t + (base + tm.offset[s]) * dim;
          for (std::size_t c = 0; c < dim; ++c) out[c] += v * in[c];
        }
      }
      for (std::size_t l = 0; l < tm.subdim; ++l) {
        std::copy(scratch[l].begin(), scratch[l].end(),
                  t + (base + tm.offset[l]) * dim);
      }
    }
    std::vector<complex_t> in(tm.subdim), out(tm.subdim);
    for (std::size_t r = 0; r < dim; ++r) {
      complex_t* row = t + r * dim;
      for (std::size_t g = 0; g < tm.n_groups; ++g) {
        std::uint64_t base = detail::spread_index(g, tm.sorted);
        for (std::size_t l = 0; l < tm.subdim; ++l) {
          in[l] = row[base + tm.offset[l]];
        }
        for (std::size_t l = 0; l < tm.subdim; ++l) {
          complex_t a{0.0, 0.0};
          for (const auto& [s, v] : rows_conj[l]) a += v * in[s];
          out[l] = a;
        }
        for (std::size_t l = 0; l < tm.subdim; ++l) {
          row[base + tm.offset[l]] = out[l];
        }
      }
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += term[i];
  }
  state.data() = std::move(acc);
}

// ---------------------------------------------------------------------------
// Fast paths for permutation- and phase-type gates (X, Z, CNOT, SWAP and
// classically conditioned X/Z). These avoid the dense kernel entirely.

/// In-place |psi> index permutation psi'[i] = psi[f(i)], f an involution.
template <class F>
void permute_involution(PureState& state, F&& f) {
  auto& a = state.amplitudes();
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    std::uint64_t j = f(i);
    if (j > i) std::swap(a[i], a[j]);
  }
}

/// In-place rho'[i][j] = rho[f(i)][f(j)], f an involution.
template <class F>
void permute_involution(MixedState& state, F&& f) {
  const std::size_t dim = state.dim();
  auto* rho = state.data().data();
  for (std::uint64_t i = 0; i < dim; ++i) {
    std::uint64_t fi = f(i);
    for (std::uint64_t j = 0; j < dim; ++j) {
      std::uint64_t fj = f(j);
      if (fi > i || (fi == i && fj > j)) {
        std::swap(rho[i * dim + j], rho[fi * dim + fj]);
      }
    }
  }
}

inline void apply_x(PureState& s, int q) {
  detail::check_qubit(q, s.n_qubits());
  std::uint64_t m = std::uint64_t{1} << q;
  permute_involution(s, [m](std::uint64_t i) { return i ^ m; });
}
inline void apply_x(MixedState& s, int q) {
  detail::check_qubit(q, s.n_qubits());
  std::uint64_t m = std::uint64_t{1} << q;
  permute_involution(s, [m](std::uint64_t i) { return i ^ m; });
}

inline void apply_z(PureState& s, int q) {
  detail::check_qubit(q, s.n_qubits());
  std::uint64_t m = std::uint64_t{1} << q;
  auto& a = s.amplitudes();
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    if (i & m) a[i] = -a[i];
  }
}
inline void apply_z(MixedState& s, int q) {
  detail::check_qubit(q, s.n_qubits());
  std::uint64_t m = std::uint64_t{1} << q;
  const std::size_t dim = s.dim();
  auto* rho = s.data().data();
  for (std::uint64_t i = 0; i < dim; ++i) {
    for (std::uint64_t j = 0; j < dim; ++j) {
      if (((i & m) != 0) != ((j & m) != 0)) rho[i * dim + j] = -rho[i * dim + j];
    }
  }
}

template <class StateT>
void apply_cnot(StateT& s, int control, int target) {
  detail::check_qubit(control, s.n_qubits());
  detail::check_qubit(target, s.n_qubits());
  if (control == target) throw std::invalid_argument("duplicate target qubit");
  std::uint64_t cm = std::uint64_t{1} << control;
  std::uint64_t tm = std::uint64_t{1} << target;
  permute_involution(
      s, [cm, tm](std::uint64_t i) { return (i & cm) ? (i ^ tm) : i; });
}

template <class StateT>
void apply_swap(StateT& s, int a, int b) {
  detail::check_qubit(a, s.n_qubits());
  detail::check_qubit(b, s.n_qubits());
  if (a == b) throw std::invalid_argument("duplicate target qubit");
  std::uint64_t am = std::uint64_t{1} << a;
  std::uint64_t bm = std::uint64_t{1} << b;
  permute_involution(s, [am, bm](std::uint64_t i) {
    bool ba = (i & am) != 0, bb = (i & bm) != 0;
    return ba == bb ? i : i ^ (am | bm);
  });
}

// ---------------------------------------------------------------------------
// Measurement, reset, partial trace, fidelity

/// Samples qubit `q` with Born probabilities (u < p0 picks outcome 0) and
/// collapses in place. `rng` must provide double uniform() in [0,1).
template <class Rng>
int measure_sampled(PureState& state, int q, Rng& rng) {
  detail::check_qubit(q, state.n_qubits());
  std::uint64_t m = std::uint64_t{1} << q;
  auto& a = state.amplitudes();
  double p0 = 0.0;
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    if (!(i & m)) p0 += std::norm(a[i]);
  }
  int outcome = (rng.uniform() < p0) ? 0 : 1;
  double p = outcome == 0 ? p0 : 1.0 - p0;
  if (p < 1e-15) throw internal_error("sampled a ~zero-probability branch");
  double scale = 1.0 / std::sqrt(p);
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    if (((i & m) != 0) != (outcome == 1)) {
      a[i] = complex_t{0.0, 0.0};
    } else {
      a[i] *= scale;
    }
  }
  return outcome;
}

struct MeasurementBranch {
  double probability;
  MixedState state;
  int outcome;
};

/// All nonzero-probability post-measurement branches of qubit `q`.
/// Probabilities sum to 1 within 1e-10; branches with p < 1e-12 are omitted.
inline std::vector<MeasurementBranch> measurement_branches(
    const MixedState& state, int q) {
  detail::check_qubit(q, state.n_qubits());
  const std::size_t dim = state.dim();
  std::uint64_t m = std::uint64_t{1} << q;
  double p1 = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & m) p1 += state.at(i, i).real();
  }
  double p0 = state.trace() - p1;
  std::vector<MeasurementBranch> out;
  for (int outcome : {0, 1}) {
    double p = outcome == 0 ? p0 : p1;
    if (p < 1e-12) continue;
    MixedState proj(state.n_qubits());
    proj.data().assign(dim * dim, complex_t{0.0, 0.0});
    for (std::size_t i = 0; i < dim; ++i) {
      if (((i & m) != 0) != (outcome == 1)) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        if (((j & m) != 0) != (outcome == 1)) continue;
        proj.at(i, j) = state.at(i, j) / p;
      }
    }
    out.push_back(MeasurementBranch{p, std::move(proj), outcome});
  }
  return out;
}

/// rho -> P0 rho P0 + X P1 rho P1 X on qubit `q` (measure and flip to |0>).
inline void reset_qubit(MixedState& state, int q) {
  detail::check_qubit(q, state.n_qubits());
  const std::size_t dim = state.dim();
  std::uint64_t m = std::uint64_t{1} << q;
  auto* rho = state.data().data();
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & m) continue;
    for (std::uint64_t j = 0; j < dim; ++j) {
      if (j & m) continue;
      rho[i * dim + j] += rho[(i | m) * dim + (j | m)];
    }
  }
  for (std::uint64_t i = 0; i < dim; ++i) {
    for (std::uint64_t j = 0; j < dim; ++j) {
      if ((i & m) || (j & m)) rho[i * dim + j] = complex_t{0.0, 0.0};
    }
  }
}

/// Reduced density matrix over `keep` (kept qubits keep their relative order,
/// ascending original index = ascending reduced index).
inline MixedState partial_trace(const MixedState& state, std::vector<int> keep) {
  if (keep.empty()) throw std::invalid_argument("empty keep set");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  detail::check_targets(keep, state.n_qubits());

  const int n = state.n_qubits();
  const int k = static_cast<int>(keep.size());
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (!std::binary_search(keep.begin(), keep.end(), q)) traced.push_back(q);
  }
  auto scatter = [](std::uint64_t bits, const std::vector<int>& pos) {
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < pos.size(); ++j) {
      if ((bits >> j) & 1u) out |= std::uint64_t{1} << pos[j];
    }
    return out;
  };

  MixedState red(k);
  red.data().assign(red.dim() * red.dim(), complex_t{0.0, 0.0});
  const std::size_t kd = red.dim();
  const std::size_t td = std::size_t{1} << traced.size();
  for (std::size_t i = 0; i < kd; ++i) {
    std::uint64_t ib = scatter(i, keep);
    for (std::size_t j = 0; j < kd; ++j) {
      std::uint64_t jb = scatter(j, keep);
      complex_t acc{0.0, 0.0};
      for (std::size_t t = 0; t < td; ++t) {
        std::uint64_t tb = scatter(t, traced);
        acc += state.at(ib | tb, jb | tb);
      }
      red.at(i, j) = acc;
    }
  }
  return red;
}

/// <psi|rho|psi>, checked real within 1e-10 and clamped to [0,1].
inline double fidelity_with_pure(const MixedState& rho, const PureState& psi) {
  if (rho.n_qubits() != psi.n_qubits()) {
    throw std::invalid_argument("dimension mismatch");
  }
  const std::size_t dim = rho.dim();
  const auto& a = psi.amplitudes();
  complex_t acc{0.0, 0.0};
  for (std::size_t i = 0; i < dim; ++i) {
    complex_t row{0.0, 0.0};
    for (std::size_t j = 0; j < dim; ++j) row += rho.at(i, j) * a[j];
    acc += std::conj(a[i]) * row;
  }
  if (std::abs(acc.imag()) > 1e-10) {
    throw internal_error("fidelity has non-real value");
  }
  double f = acc.real();
  if (f < -1e-9 || f > 1.0 + 1e-9) {
    throw internal_error("fidelity outside [0,1] beyond tolerance");
  }
  return std::clamp(f, 0.0, 1.0);
}

/// <psi| (|target><target| ⊗ I) |psi> where `target` lives on the qubits
/// listed in `target_qubits` (qubit j of `target` = target_qubits[j]).
inline double overlap_probability(const PureState& state,
                                  const PureState& target,
                                  const std::vector<int>& target_qubits) {
  detail::check_targets(target_qubits, state.n_qubits());
  if (static_cast<std::size_t>(target.n_qubits()) != target_qubits.size()) {
    throw std::invalid_argument("target size does not match qubit list");
  }
  auto tm = detail::make_target_map(target_qubits, state.n_qubits());
  const auto& a = state.amplitudes();
  const auto& t = target.amplitudes();
  double total = 0.0;
  for (std::size_t g = 0; g < tm.n_groups; ++g) {
    std::uint64_t base = detail::spread_index(g, tm.sorted);
    complex_t acc{0.0, 0.0};
    for (std::size_t l = 0; l < tm.subdim; ++l) {
      acc += std::conj(t[l]) * a[base + tm.offset[l]];
    }
    total += std::norm(acc);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Validation (debug/test use; the PSD floor is cubic)

/// Cholesky-based floor check: true iff rho + floor*I admits a Cholesky
/// factorization, i.e. all eigenvalues are >= -floor (up to roundoff).
inline bool psd_within_floor(const MixedState& rho, double floor) {
  const std::size_t dim = rho.dim();
  std::vector<complex_t> a(rho.data());
  for (std::size_t i = 0; i < dim; ++i) {
    a[i * dim + i] += complex_t{floor, 0.0};
  }
  std::vector<complex_t> l(dim * dim, complex_t{0.0, 0.0});
  for (std::size_t j = 0; j < dim; ++j) {
    double d = a[j * dim + j].real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l[j * dim + k]);
    if (d <= 0.0) return false;
    double ljj = std::sqrt(d);
    l[j * dim + j] = complex_t{ljj, 0.0};
    for (std::size_t i = j + 1; i < dim; ++i) {
      complex_t acc = a[i * dim + j];
      for (std::size_t k = 0; k < j; ++k) {
        acc -= l[i * dim + k] * std::conj(l[j * dim + k]);
      }
      l[i * dim + j] = acc / ljj;
    }
  }
  return true;
}

inline void check_density_matrix(const MixedState& rho, bool check_psd = false) {
  const std::size_t dim = rho.dim();
  for (complex_t z : rho.data()) {
    if (!detail::is_finite(z)) throw internal_error("non-finite matrix entry");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      if (std::abs(rho.at(i, j) - std::conj(rho.at(j, i))) > 1e-9) {
        throw internal_error("density matrix not Hermitian within 1e-9");
      }
    }
  }
  if (std::abs(rho.trace() - 1.0) > 1e-9) {
    throw internal_error("density matrix trace not 1 within 1e-9");
  }
  if (check_psd && !psd_within_floor(rho, 1e-8)) {
    throw internal_error("density matrix eigenvalue below -1e-8");
  }
}

}  // namespace qdcsim

#endif  // QDCSIM_STATE_HPP_
