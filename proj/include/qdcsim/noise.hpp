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

#ifndef QDCSIM_NOISE_HPP_
#define QDCSIM_NOISE_HPP_

// Collisional noise: exchange-Hamiltonian collision unitaries, their
// insertion into circuits (collision + environment reset per step), the
// per-collision strength calibrated from fiber attenuation, and the
// analytically equivalent amplitude-damping Kraus channel.
//
// One collision with the environment in |0>, followed by tracing (resetting)
// the environment, acts on the carrier as amplitude damping with
// gamma = sin^2(kappa * delta_t). Because the environment is reset after
// every collision, m collisions compose Markovianly:
// 1 - gamma_total = prod_i (1 - gamma_i).

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "qdcsim/circuit.hpp"
#include "qdcsim/gates.hpp"
#include "qdcsim/state.hpp"

namespace qdcsim {

// Collision angles theta = kappa * delta_t live in [0, pi/2]: pi/2 is the
// full excitation swap, beyond which damping would weaken again.
inline constexpr double kThetaMax = std::numbers::pi / 2.0;

enum class CollisionKind { kTransduction, kFiber, kIdle };

struct NoiseParams {
  double kappa_T = 0.5;  // transduction coupling (dominant noise source)
  // Fiber coupling override. Unset: the per-collision fiber angle is derived
  // from attenuation_per_km and fiber_length_km instead, so total fiber loss
  // is collision-count-invariant. Set (including 0): theta_F = kappa_F *
  // delta_t, attenuation ignored.
  std::optional<double> kappa_F;
  double delta_t = 1.0;
  int n_coll_T = 1;  // collisions per transduction interface (sender|receiver)
  int n_coll_F = 4;  // collisions per fiber segment
  double fiber_length_km = 0.01;
  double attenuation_per_km = 0.0392;
  double idle_damping_theta = 0.0;  // synthetic extension, off by default

  void validate() const;
  double theta_T() const { return kappa_T * delta_t; }
  double theta_F_per_collision() const;
  bool fiber_enabled() const {
    return n_coll_F > 0 && theta_F_per_collision() > 0.0;
  }
};

/// gamma = sin^2(theta): the carrier's excited-state loss per collision.
inline double damping_gamma(double theta) {
  double s = std::sin(theta);
  return s * s;
}

/// Two-qubit collision unitary exp(-i H delta_t) for the exchange coupling
/// H = kappa (sigma+ sigma- + sigma- sigma+), carrier = gate qubit 0,
/// environment = gate qubit 1. Closed form with theta = kappa * delta_t:
/// identity on |00> and |11>; on the one-excitation subspace,
/// cos(theta) I - i sin(theta) SWAP.
inline Unitary exchange_unitary(double kappa, double delta_t) {
  double theta = kappa * delta_t;
  if (!(theta >= 0.0) || theta > kThetaMax + 1e-12) {
    throw std::invalid_argument("kappa * delta_t must lie in [0, pi/2]");
  }
  double c = std::cos(theta), s = std::sin(theta);
  std::vector<complex_t> m(16, complex_t{0.0, 0.0});
  m[0 * 4 + 0] = complex_t{1.0, 0.0};
  m[1 * 4 + 1] = complex_t{c, 0.0};
  m[1 * 4 + 2] = complex_t{0.0, -s};
  m[2 * 4 + 1] = complex_t{0.0, -s};
  m[2 * 4 + 2] = complex_t{c, 0.0};
  m[3 * 4 + 3] = complex_t{1.0, 0.0};
  return Unitary::from_matrix(2, std::move(m));
}

/// Single-qubit channel equal to one collision followed by tracing out the
/// environment: Kraus pair K0 = diag(1, cos theta), K1 = sin(theta)|0><1|.
inline KrausChannel effective_damping_channel(double theta) {
  if (!(theta >= 0.0) || theta > kThetaMax + 1e-12) {
    throw std::invalid_argument("theta must lie in [0, pi/2]");
  }
  double c = std::cos(theta), s = std::sin(theta);
  std::vector<complex_t> k0 = {complex_t{1.0, 0.0}, complex_t{0.0, 0.0},
                               complex_t{0.0, 0.0}, complex_t{c, 0.0}};
  std::vector<complex_t> k1 = {complex_t{0.0, 0.0}, complex_t{s, 0.0},
                               complex_t{0.0, 0.0}, complex_t{0.0, 0.0}};
  return KrausChannel::from_operators(1, {std::move(k0), std::move(k1)});
}

/// Per-collision angle such that m collisions reproduce the fiber's total
/// survival e^{-alpha L}: gamma_c = 1 - e^{-alpha L / m},
/// theta = arcsin(sqrt(gamma_c)). Total loss is invariant to m.
inline double theta_from_attenuation(double alpha_per_km, double length_km,
                                     int n_collisions) {
  if (n_collisions < 1) {
    throw std::invalid_argument("fiber collision count must be >= 1");
  }
  if (alpha_per_km < 0.0 || length_km < 0.0) {
    throw std::invalid_argument("attenuation and length must be >= 0");
  }
  double gamma_c = -std::expm1(-alpha_per_km * length_km / n_collisions);
  return std::asin(std::sqrt(gamma_c));
}

inline double NoiseParams::theta_F_per_collision() const {
  if (kappa_F.has_value()) return *kappa_F * delta_t;
  if (n_coll_F == 0) return 0.0;
  return theta_from_attenuation(attenuation_per_km, fiber_length_km, n_coll_F);
}

inline void NoiseParams::validate() const {
  if (kappa_T < 0.0 || (kappa_F.has_value() && *kappa_F < 0.0)) {
    throw std::invalid_argument("couplings must be >= 0");
  }
  if (delta_t < 0.0) throw std::invalid_argument("delta_t must be >= 0");
  if (theta_T() > kThetaMax + 1e-12) {
    throw std::invalid_argument("kappa_T * delta_t must lie in [0, pi/2]");
  }
  if (kappa_F.has_value() && *kappa_F * delta_t > kThetaMax + 1e-12) {
    throw std::invalid_argument("kappa_F * delta_t must lie in [0, pi/2]");
  }
  if (n_coll_T < 0 || n_coll_F < 0) {
    throw std::invalid_argument("collision counts must be >= 0");
  }
  if (attenuation_per_km < 0.0 || fiber_length_km < 0.0) {
    throw std::invalid_argument("attenuation and length must be >= 0");
  }
  if (idle_damping_theta < 0.0 || idle_damping_theta > kThetaMax + 1e-12) {
    throw std::invalid_argument("idle_damping_theta must lie in [0, pi/2]");
  }
}

namespace detail {

// Collisions with theta ~ 0 are exact identities; skip them so noiseless
// configurations produce noiseless circuits.
inline void append_collisions(Circuit& c, int carrier, int env, double theta,
                              int count) {
  if (count <= 0 || theta < 1e-15) return;
  auto u = std::make_shared<const Unitary>(exchange_unitary(theta, 1.0));
  for (int i = 0; i < count; ++i) {
    c.u2q("UEX", u, {carrier, env}, {theta});
    c.reset(env);
  }
}

}  // namespace detail

/// Appends one full link traversal on `carrier`: sender transducer
/// (n_coll_T collisions at theta_T), fiber (n_coll_F collisions at the
/// calibrated fiber angle), receiver transducer (n_coll_T at theta_T).
/// Exactly one environment Reset follows every collision.
inline void insert_channel_traversal(Circuit& c, int carrier, int env,
                                     const NoiseParams& params) {
  if (carrier == env) {
    throw std::invalid_argument("carrier and environment must differ");
  }
  if (c.role(env) != QubitRole::kEnvironment) {
    throw std::invalid_argument("traversal requires an environment qubit");
  }
  params.validate();
  detail::append_collisions(c, carrier, env, params.theta_T(),
                            params.n_coll_T);
  detail::append_collisions(c, carrier, env, params.theta_F_per_collision(),
                            params.n_coll_F);
  detail::append_collisions(c, carrier, env, params.theta_T(),
                            params.n_coll_T);
}

/// Survival factor prod_i (1 - gamma_i) over the collisions of one traversal.
inline double traversal_survival(const NoiseParams& params) {
  params.validate();
  double log_s = 0.0;
  double g_t = damping_gamma(params.theta_T());
  for (int i = 0; i < 2 * params.n_coll_T; ++i) log_s += std::log1p(-g_t);
  double g_f = damping_gamma(params.theta_F_per_collision());
  for (int i = 0; i < params.n_coll_F; ++i) log_s += std::log1p(-g_f);
  return std::exp(log_s);
}

}  // namespace qdcsim

#endif  // QDCSIM_NOISE_HPP_
