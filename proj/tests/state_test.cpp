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

#include "qdcsim/state.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qdcsim/gates.hpp"

namespace qdcsim {
namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;

struct FixedRng {
  double value;
  double uniform() const { return value; }
};

TEST(UnitaryTest, RejectsNonUnitaryMatrix) {
  std::vector<complex_t> m = {complex_t{1.0, 0.0}, complex_t{0.0, 0.0},
                              complex_t{0.0, 0.0}, complex_t{0.5, 0.0}};
  EXPECT_THROW(Unitary::from_matrix(1, m), std::invalid_argument);
}

TEST(UnitaryTest, DaggerInvertsAction) {
  oracles::Rng rng(11);
  Unitary u = oracles::random_unitary(2, rng);
  PureState psi = oracles::random_pure_state(3, rng);
  PureState orig = psi;
  apply_unitary(psi, u, {2, 0});
  apply_unitary(psi, u.dagger(), {2, 0});
  EXPECT_GT(psi.overlap(orig), 1.0 - 1e-10);
}

TEST(KrausChannelTest, RejectsNonTracePreserving) {
  std::vector<complex_t> k0 = {complex_t{1.0, 0.0}, complex_t{0.0, 0.0},
                               complex_t{0.0, 0.0}, complex_t{0.5, 0.0}};
  EXPECT_THROW(KrausChannel::from_operators(1, {k0}), std::invalid_argument);
}

TEST(ApplyUnitaryTest, XOnQubitZeroFlipsBasisIndexZeroToOne) {
  PureState psi(2);
  apply_unitary(psi, gates::pauli_x(), {0});
  EXPECT_NEAR(std::abs(psi.amp(1)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(psi.amp(0)), 0.0, 1e-12);
}

TEST(ApplyUnitaryTest, HadamardTwiceIsIdentity) {
  oracles::Rng rng(3);
  PureState psi = oracles::random_pure_state(3, rng);
  PureState orig = psi;
  apply_unitary(psi, gates::hadamard(), {1});
  apply_unitary(psi, gates::hadamard(), {1});
  EXPECT_GT(psi.overlap(orig), 1.0 - 1e-12);
}

TEST(ApplyUnitaryTest, CnotBuildsBellState) {
  // (|00> + |10>)/sqrt(2) with qubit 1 set: H on qubit 1 of |00>.
  PureState psi(2);
  apply_unitary(psi, gates::hadamard(), {1});
  // CNOT with control = qubit 1 (gate qubit 0), target = qubit 0.
  apply_unitary(psi, gates::cnot(), {1, 0});
  EXPECT_NEAR(psi.amp(0).real(), kInvSqrt2, 1e-12);
  EXPECT_NEAR(psi.amp(3).real(), kInvSqrt2, 1e-12);
  EXPECT_NEAR(std::abs(psi.amp(1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(psi.amp(2)), 0.0, 1e-12);
}

TEST(ApplyUnitaryTest, FastPathsMatchDenseKernel) {
  oracles::Rng rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    MixedState rho = oracles::random_mixed_state(3, rng);
    MixedState via_fast = rho;
    MixedState via_dense = rho;

    apply_x(via_fast, 1);
    apply_unitary(via_dense, gates::pauli_x(), {1});
    EXPECT_LT(oracles::max_abs_diff(via_fast.data(), via_dense.data()), 1e-12);

    apply_z(via_fast, 2);
    apply_unitary(via_dense, gates::pauli_z(), {2});
    EXPECT_LT(oracles::max_abs_diff(via_fast.data(), via_dense.data()), 1e-12);

    apply_cnot(via_fast, 2, 0);
    apply_unitary(via_dense, gates::cnot(), {2, 0});
    EXPECT_LT(oracles::max_abs_diff(via_fast.data(), via_dense.data()), 1e-12);

    apply_swap(via_fast, 0, 2);
    apply_unitary(via_dense, gates::swap(), {0, 2});
    EXPECT_LT(oracles::max_abs_diff(via_fast.data(), via_dense.data()), 1e-12);
  }
}

TEST(ApplyUnitaryTest, MatchesNaiveEmbeddingOracle) {
  oracles::Rng rng(29);
  for (const auto& targets : std::vector<std::vector<int>>{{0, 2}, {2, 1}}) {
    Unitary u = oracles::random_unitary(2, rng);
    MixedState rho = oracles::random_mixed_state(3, rng);
    oracles::Matrix expected = oracles::conjugate(
        oracles::embed_unitary(u.data(), targets, 3), rho.data(), 8);
    apply_unitary(rho, u, targets);
    EXPECT_LT(oracles::max_abs_diff(rho.data(), expected), 1e-11);
  }
}

TEST(ApplyUnitaryTest, PureStateMatchesNaiveEmbeddingOracle) {
  oracles::Rng rng(31);
  Unitary u = oracles::random_unitary(2, rng);
  PureState psi = oracles::random_pure_state(3, rng);
  oracles::Matrix full = oracles::embed_unitary(u.data(), {1, 2}, 3);
  std::vector<complex_t> expected(8, complex_t{0.0, 0.0});
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 8; ++c) {
      expected[r] += full[r * 8 + c] * psi.amp(c);
    }
  }
  apply_unitary(psi, u, {1, 2});
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_LT(std::abs(psi.amp(i) - expected[i]), 1e-11);
  }
}

TEST(ApplyUnitaryTest, RejectsBadTargets) {
  PureState psi(2);
  EXPECT_THROW(apply_unitary(psi, gates::pauli_x(), {2}), std::out_of_range);
  EXPECT_THROW(apply_unitary(psi, gates::cnot(), {0, 0}),
               std::invalid_argument);
  EXPECT_THROW(apply_unitary(psi, gates::cnot(), {0}), std::invalid_argument);
}

TEST(ApplyKrausTest, IdentityChannelLeavesStateUnchanged) {
  auto id = KrausChannel::from_operators(
      1, {{complex_t{1.0, 0.0}, complex_t{0.0, 0.0}, complex_t{0.0, 0.0},
           complex_t{1.0, 0.0}}});
  oracles::Rng rng(5);
  MixedState rho = oracles::random_mixed_state(2, rng);
  MixedState orig = rho;
  apply_kraus(rho, id, {1});
  EXPECT_LT(oracles::max_abs_diff(rho.data(), orig.data()), 1e-12);
}

KrausChannel damping_channel(double gamma) {
  double c = std::sqrt(1.0 - gamma), s = std::sqrt(gamma);
  return KrausChannel::from_operators(
      1, {{complex_t{1.0, 0.0}, complex_t{0.0, 0.0}, complex_t{0.0, 0.0},
           complex_t{c, 0.0}},
          {complex_t{0.0, 0.0}, complex_t{s, 0.0}, complex_t{0.0, 0.0},
           complex_t{0.0, 0.0}}});
}

TEST(ApplyKrausTest, FullDampingSendsExcitedToGround) {
  MixedState rho = MixedState::from_pure(PureState::basis(1, 1));
  apply_kraus(rho, damping_channel(1.0), {0});
  EXPECT_NEAR(rho.at(0, 0).real(), 1.0, 1e-12);
  EXPECT_NEAR(rho.at(1, 1).real(), 0.0, 1e-12);
}

TEST(ApplyKrausTest, HalfDampingGivesEqualPopulations) {
  // K0 rho K0^t + K1 rho K1^t on |1><1| with gamma = 0.5.
  MixedState rho = MixedState::from_pure(PureState::basis(1, 1));
  apply_kraus(rho, damping_channel(0.5), {0});
  EXPECT_NEAR(rho.at(0, 0).real(), 0.5, 1e-12);
  EXPECT_NEAR(rho.at(1, 1).real(), 0.5, 1e-12);
  EXPECT_NEAR(std::abs(rho.at(0, 1)), 0.0, 1e-12);
}

TEST(ApplyKrausTest, TracePreservedOnRandomStates) {
  oracles::Rng rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    MixedState rho = oracles::random_mixed_state(3, rng);
    apply_kraus(rho, damping_channel(0.3), {rep % 3});
    EXPECT_NEAR(rho.trace(), 1.0, 1e-10);
  }
}

TEST(ApplyKrausTest, PurityDecreasesOnPureInputs) {
  oracles::Rng rng(9);
  MixedState rho = MixedState::from_pure(oracles::random_pure_state(2, rng));
  apply_kraus(rho, damping_channel(0.4), {0});
  EXPECT_LT(rho.purity(), 1.0);
}

TEST(MeasureSampledTest, DeterministicOnBasisState) {
  for (double u : {0.0, 0.3, 0.999}) {
    PureState psi = PureState::basis(1, 1);
    FixedRng rng{u};
    EXPECT_EQ(measure_sampled(psi, 0, rng), 1);
    EXPECT_NEAR(std::abs(psi.amp(1)), 1.0, 1e-12);
  }
}

TEST(MeasureSampledTest, ForcedRngPicksEachBranchOfPlus) {
  PureState plus(1);
  apply_unitary(plus, gates::hadamard(), {0});

  PureState low = plus;
  FixedRng below{0.25};
  EXPECT_EQ(measure_sampled(low, 0, below), 0);
  EXPECT_NEAR(std::abs(low.amp(0)), 1.0, 1e-12);

  PureState high = plus;
  FixedRng above{0.75};
  EXPECT_EQ(measure_sampled(high, 0, above), 1);
  EXPECT_NEAR(std::abs(high.amp(1)), 1.0, 1e-12);
}

TEST(MeasureSampledTest, BellCorrelation) {
  PureState psi(2);
  apply_unitary(psi, gates::hadamard(), {0});
  apply_unitary(psi, gates::cnot(), {0, 1});
  FixedRng above{0.9};  // picks outcome 1
  EXPECT_EQ(measure_sampled(psi, 1, above), 1);
  EXPECT_NEAR(std::abs(psi.amp(3)), 1.0, 1e-12);
}

TEST(MeasurementBranchesTest, GroundStateGivesSingleBranch) {
  MixedState rho(1);
  auto branches = measurement_branches(rho, 0);
  ASSERT_EQ(branches.size(), 1u);
  EXPECT_EQ(branches[0].outcome, 0);
  EXPECT_NEAR(branches[0].probability, 1.0, 1e-12);
}

TEST(MeasurementBranchesTest, MaximallyMixedSplitsEvenly) {
  MixedState rho = MixedState::maximally_mixed(1);
  auto branches = measurement_branches(rho, 0);
  ASSERT_EQ(branches.size(), 2u);
  EXPECT_NEAR(branches[0].probability, 0.5, 1e-12);
  EXPECT_NEAR(branches[1].probability, 0.5, 1e-12);
}

TEST(MeasurementBranchesTest, PlusStateBranchesToBasisStates) {
  PureState plus(1);
  apply_unitary(plus, gates::hadamard(), {0});
  auto branches = measurement_branches(MixedState::from_pure(plus), 0);
  ASSERT_EQ(branches.size(), 2u);
  EXPECT_EQ(branches[0].outcome, 0);
  EXPECT_NEAR(branches[0].probability, 0.5, 1e-12);
  EXPECT_NEAR(branches[0].state.at(0, 0).real(), 1.0, 1e-12);
  EXPECT_EQ(branches[1].outcome, 1);
  EXPECT_NEAR(branches[1].probability, 0.5, 1e-12);
  EXPECT_NEAR(branches[1].state.at(1, 1).real(), 1.0, 1e-12);
}

TEST(MeasurementBranchesTest, ProbabilitiesMatchDiagonalMarginals) {
  oracles::Rng rng(13);
  MixedState rho = oracles::random_mixed_state(3, rng);
  for (int q = 0; q < 3; ++q) {
    double p1 = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      if (i & (1u << q)) p1 += rho.at(i, i).real();
    }
    auto branches = measurement_branches(rho, q);
    double total = 0.0;
    for (const auto& b : branches) {
      total += b.probability;
      if (b.outcome == 1) {
        EXPECT_NEAR(b.probability, p1, 1e-10);
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(ResetQubitTest, ExcitedGoesToGround) {
  MixedState rho = MixedState::from_pure(PureState::basis(1, 1));
  reset_qubit(rho, 0);
  EXPECT_NEAR(rho.at(0, 0).real(), 1.0, 1e-12);
}

TEST(ResetQubitTest, BellPairLeavesOtherHalfMaximallyMixed) {
  PureState bell(2);
  apply_unitary(bell, gates::hadamard(), {0});
  apply_unitary(bell, gates::cnot(), {0, 1});
  MixedState rho = MixedState::from_pure(bell);
  reset_qubit(rho, 1);
  MixedState other = partial_trace(rho, {0});
  EXPECT_NEAR(other.at(0, 0).real(), 0.5, 1e-12);
  EXPECT_NEAR(other.at(1, 1).real(), 0.5, 1e-12);
  MixedState env = partial_trace(rho, {1});
  EXPECT_NEAR(env.at(0, 0).real(), 1.0, 1e-12);
}

TEST(ResetQubitTest, GroundQubitUntouched) {
  oracles::Rng rng(19);
  MixedState rho = oracles::random_mixed_state(2, rng);
  // Force qubit 1 to |0> first, then reset it again: state must not move.
  reset_qubit(rho, 1);
  MixedState before = rho;
  reset_qubit(rho, 1);
  EXPECT_LT(oracles::max_abs_diff(rho.data(), before.data()), 1e-12);
}

TEST(ResetQubitTest, EqualsTraceThenRetensor) {
  oracles::Rng rng(23);
  MixedState rho = oracles::random_mixed_state(3, rng);
  MixedState reset_version = rho;
  reset_qubit(reset_version, 1);

  MixedState rest = partial_trace(rho, {0, 2});
  // Re-tensor |0><0| at position 1: indices with qubit-1 bit set vanish.
  MixedState expected(3);
  expected.data().assign(64, complex_t{0.0, 0.0});
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      std::size_t fi = (i & 1u) | ((i & 2u) << 1);
      std::size_t fj = (j & 1u) | ((j & 2u) << 1);
      expected.at(fi, fj) = rest.at(i, j);
    }
  }
  EXPECT_LT(oracles::max_abs_diff(reset_version.data(), expected.data()),
            1e-10);
}

TEST(PartialTraceTest, ProductStateFactors) {
  PureState psi(2);
  apply_unitary(psi, gates::hadamard(), {1});
  MixedState rho = MixedState::from_pure(psi);
  MixedState q1 = partial_trace(rho, {1});
  EXPECT_NEAR(q1.at(0, 0).real(), 0.5, 1e-12);
  EXPECT_NEAR(q1.at(0, 1).real(), 0.5, 1e-12);
  MixedState q0 = partial_trace(rho, {0});
  EXPECT_NEAR(q0.at(0, 0).real(), 1.0, 1e-12);
}

TEST(PartialTraceTest, BellPairReducesToMaximallyMixed) {
  PureState bell(2);
  apply_unitary(bell, gates::hadamard(), {0});
  apply_unitary(bell, gates::cnot(), {0, 1});
  MixedState rho = MixedState::from_pure(bell);
  for (int keep : {0, 1}) {
    MixedState red = partial_trace(rho, {keep});
    EXPECT_NEAR(red.at(0, 0).real(), 0.5, 1e-12);
    EXPECT_NEAR(red.at(1, 1).real(), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(red.at(0, 1)), 0.0, 1e-12);
  }
}

TEST(PartialTraceTest, CollisionThenTraceGivesDampedPopulations) {
  // One exchange collision at angle theta on |1>_sys |0>_env, then tracing
  // the environment, leaves diag(sin^2, cos^2) on the system. The two-qubit
  // evolution here is written out explicitly as the oracle.
  double theta = 0.7;
  oracles::Matrix u = oracles::exchange_evolution(theta, 1.0);
  std::vector<complex_t> psi = {complex_t{0.0, 0.0}, complex_t{1.0, 0.0},
                                complex_t{0.0, 0.0}, complex_t{0.0, 0.0}};
  std::vector<complex_t> out(4, complex_t{0.0, 0.0});
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) out[r] += u[r * 4 + c] * psi[c];
  }
  oracles::Matrix rho(16, complex_t{0.0, 0.0});
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) rho[i * 4 + j] = out[i] * std::conj(out[j]);
  }
  MixedState sys =
      partial_trace(MixedState::from_matrix(2, std::move(rho)), {0});
  double s2 = std::sin(theta) * std::sin(theta);
  EXPECT_NEAR(sys.at(0, 0).real(), s2, 1e-10);
  EXPECT_NEAR(sys.at(1, 1).real(), 1.0 - s2, 1e-10);
}

TEST(PartialTraceTest, EmptyKeepRejected) {
  MixedState rho(2);
  EXPECT_THROW(partial_trace(rho, {}), std::invalid_argument);
}

TEST(FidelityTest, PureStateAgainstItselfIsOne) {
  oracles::Rng rng(37);
  PureState psi = oracles::random_pure_state(2, rng);
  EXPECT_NEAR(fidelity_with_pure(MixedState::from_pure(psi), psi), 1.0, 1e-12);
}

TEST(FidelityTest, OrthogonalStateIsZero) {
  EXPECT_NEAR(fidelity_with_pure(MixedState::from_pure(PureState::basis(2, 1)),
                                 PureState::basis(2, 2)),
              0.0, 1e-12);
}

TEST(FidelityTest, MaximallyMixedGivesInverseDimension) {
  oracles::Rng rng(41);
  for (int n : {1, 2, 3}) {
    PureState target = oracles::random_pure_state(n, rng);
    EXPECT_NEAR(fidelity_with_pure(MixedState::maximally_mixed(n), target),
                std::pow(2.0, -n), 1e-12);
  }
}

TEST(FidelityTest, DimensionMismatchRejected) {
  EXPECT_THROW(fidelity_with_pure(MixedState(2), PureState(1)),
               std::invalid_argument);
}

TEST(OverlapProbabilityTest, MatchesPartialTraceFidelity) {
  oracles::Rng rng(43);
  PureState psi = oracles::random_pure_state(3, rng);
  PureState target = oracles::random_pure_state(2, rng);
  double via_overlap = overlap_probability(psi, target, {0, 2});
  MixedState reduced = partial_trace(MixedState::from_pure(psi), {0, 2});
  EXPECT_NEAR(via_overlap, fidelity_with_pure(reduced, target), 1e-10);
}

TEST(ValidationTest, NormAndTracePreservedThroughMixedPipeline) {
  oracles::Rng rng(47);
  MixedState rho = oracles::random_mixed_state(3, rng);
  apply_unitary(rho, oracles::random_unitary(2, rng), {0, 2});
  apply_kraus(rho, damping_channel(0.2), {1});
  reset_qubit(rho, 2);
  auto branches = measurement_branches(rho, 0);
  double total = 0.0;
  for (const auto& b : branches) {
    total += b.probability * b.state.trace();
    check_density_matrix(b.state, /*check_psd=*/true);
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(ValidationTest, PsdFloorAcceptsStatesAndRejectsNegativeMatrices) {
  oracles::Rng rng(53);
  EXPECT_TRUE(psd_within_floor(oracles::random_mixed_state(2, rng), 1e-8));
  MixedState bad(1);
  bad.at(0, 0) = complex_t{1.5, 0.0};
  bad.at(1, 1) = complex_t{-0.5, 0.0};
  EXPECT_FALSE(psd_within_floor(bad, 1e-8));
  EXPECT_THROW(check_density_matrix(bad, true), internal_error);
}

}  // namespace
}  // namespace qdcsim
