#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ecp/hilbert.hpp"
#include "test_util.hpp"

namespace {

using namespace ecp::hilbert;
using ecp::EcpError;
using ecp::ErrorKind;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const EcpError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no EcpError thrown";
  return ErrorKind::ConfigError;
}

TEST(Spins, RoundTripThroughText) {
  EXPECT_EQ(spins_to_string(spins_from_string("DUU")), "DUU");
  EXPECT_EQ(spins_from_string("↓↑↑"), spins_from_string("DUU"));
  EXPECT_EQ(flip(Spin::Up), Spin::Down);
  EXPECT_EQ(reverse(Direction::PlusZ), Direction::MinusZ);
}

TEST(StateVector, AddAccumulatesAndPrunes) {
  StateVector s;
  s.add(spin_ket("UU"), 0.5);
  s.add(spin_ket("UU"), 0.25);
  EXPECT_DOUBLE_EQ(s.amplitude(spin_ket("UU")).real(), 0.75);
  s.add(spin_ket("UU"), -0.75);
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.amplitude(spin_ket("DD")), Amplitude(0.0));
}

TEST(StateVector, RejectsMixedShapes) {
  StateVector s{{spin_ket("UU"), 1.0}};
  EXPECT_EQ(kind_of([&] { s.add(spin_ket("UUU"), 1.0); }), ErrorKind::ShapeMismatch);
  EXPECT_EQ(kind_of([&] { s.add(photon_ket(Polarization::R, Direction::MinusZ, "UU"), 1.0); }),
            ErrorKind::ShapeMismatch);

  StateVector circ{{photon_ket(Polarization::R, Direction::MinusZ, "U"), 1.0}};
  EXPECT_EQ(kind_of([&] { circ.add(photon_ket(Polarization::H, Direction::MinusZ, "U"), 1.0); }),
            ErrorKind::ShapeMismatch);
}

TEST(StateVector, RejectsNonFinite) {
  StateVector s;
  EXPECT_EQ(kind_of([&] { s.add(spin_ket("U"), std::nan("")); }), ErrorKind::NonFiniteAmplitude);
  EXPECT_EQ(kind_of([&] { s.add(spin_ket("U"), Amplitude(0.0, INFINITY)); }), ErrorKind::NonFiniteAmplitude);
}

TEST(StateVector, NormalizeZeroStateThrows) {
  EXPECT_EQ(kind_of([] { normalize(StateVector{}); }), ErrorKind::ZeroState);
}

TEST(StateVector, NormalizeGivesUnitNorm) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto s = ecp::test::random_state(rng, 3, i % 2 == 0);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
  }
}

TEST(StateVector, ProjectionsArePartition) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    const auto s = ecp::test::random_state(rng, 3, true);
    double total = 0.0;
    for (auto p : {Polarization::R, Polarization::L}) {
      for (auto d : {Direction::PlusZ, Direction::MinusZ}) {
        total += project(s, [&](const BasisKet& k) {
                   return k.photon->polarization == p && k.photon->direction == d;
                 }).probability;
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Fidelity, SymmetricAndPhaseInvariant) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 50; ++i) {
    const auto a = ecp::test::random_state(rng, 3, false);
    const auto b = ecp::test::random_state(rng, 3, false);
    EXPECT_NEAR(fidelity(a, b), fidelity(b, a), 1e-14);
    EXPECT_NEAR(fidelity(scale(a, std::polar(1.0, 0.7 * i)), b), fidelity(a, b), 1e-14);
    EXPECT_NEAR(fidelity(a, a), 1.0, 1e-12);
    EXPECT_LE(fidelity(a, b), 1.0 + 1e-12);
  }
}

TEST(Fidelity, OrthogonalKetsGiveZero) {
  EXPECT_EQ(fidelity(StateVector{{spin_ket("DUU"), 1.0}}, StateVector{{spin_ket("UDU"), 1.0}}), 0.0);
}

TEST(InnerProduct, ConjugatesFirstArgument) {
  const StateVector a{{spin_ket("U"), Amplitude(0.0, 1.0)}};
  const StateVector b{{spin_ket("U"), 1.0}};
  EXPECT_EQ(inner_product(a, b), Amplitude(0.0, -1.0));
}

TEST(Tensor, PhotonTimesSpinsAndBack) {
  const StateVector spins{{spin_ket("DU"), 0.6}, {spin_ket("UD"), 0.8}};
  const StateVector photon{{photon_ket(Polarization::R, Direction::MinusZ), 1.0}};
  const auto joint = tensor_with_photon(spins, photon);
  EXPECT_EQ(joint.size(), 2u);
  EXPECT_NEAR(joint.amplitude(photon_ket(Polarization::R, Direction::MinusZ, "UD")).real(), 0.8, 1e-15);
  EXPECT_NEAR(fidelity(drop_photon(joint), spins), 1.0, 1e-15);
}

}  // namespace
