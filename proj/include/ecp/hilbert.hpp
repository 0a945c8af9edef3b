#pragma once

// Sparse photon (x) spin state vectors.
//
// A ket is an optional single-photon label followed by an ordered register of
// electron spins. States are maps from kets to complex amplitudes and are
// treated as values: every operation below returns a fresh state.

#include <complex>
#include <compare>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecp/error.hpp"

namespace ecp::hilbert {

using Amplitude = std::complex<double>;

enum class Spin : std::uint8_t { Up, Down };

constexpr Spin flip(Spin s) { return s == Spin::Up ? Spin::Down : Spin::Up; }

enum class PolarizationBasis : std::uint8_t { Circular, Linear };

enum class Polarization : std::uint8_t { R, L, H, V };

constexpr PolarizationBasis basis_of(Polarization p) {
  return (p == Polarization::R || p == Polarization::L) ? PolarizationBasis::Circular
                                                        : PolarizationBasis::Linear;
}

// PlusZ is the s_z = +1 propagation convention.
enum class Direction : std::uint8_t { PlusZ, MinusZ };

constexpr Direction reverse(Direction d) {
  return d == Direction::PlusZ ? Direction::MinusZ : Direction::PlusZ;
}

struct PhotonLabel {
  Polarization polarization;
  Direction direction;

  auto operator<=>(const PhotonLabel&) const = default;
};

struct BasisKet {
  std::optional<PhotonLabel> photon;
  std::vector<Spin> spins;

  // Photon field first, then spins lexicographically.
  auto operator<=>(const BasisKet&) const = default;
};

struct KetShape {
  bool has_photon = false;
  PolarizationBasis basis = PolarizationBasis::Circular;
  std::size_t spin_count = 0;

  bool operator==(const KetShape&) const = default;
};

KetShape shape_of(const BasisKet& ket);

/// Parses a spin register written with 'U'/'D' (or the arrows).
std::vector<Spin> spins_from_string(std::string_view text);
std::string spins_to_string(const std::vector<Spin>& spins);
std::string to_string(Polarization p);
std::string to_string(Direction d);
std::string to_string(const BasisKet& ket);

BasisKet spin_ket(std::string_view spins);
BasisKet photon_ket(Polarization p, Direction d, std::string_view spins = {});

class StateVector {
 public:
  using Terms = std::map<BasisKet, Amplitude>;

  static constexpr double kDefaultTolerance = 1e-12;

  StateVector() = default;
  explicit StateVector(double tolerance) : tolerance_(tolerance) {}
  StateVector(std::initializer_list<std::pair<BasisKet, Amplitude>> terms,
              double tolerance = kDefaultTolerance);

  // Accumulates into the ket's amplitude. Terms whose squared magnitude falls
  // below tolerance^2 are dropped.
  void add(const BasisKet& ket, Amplitude amplitude);

  const Terms& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  double tolerance() const noexcept { return tolerance_; }
  std::optional<KetShape> shape() const { return shape_; }

  Amplitude amplitude(const BasisKet& ket) const;
  double norm_squared() const;

  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

 private:
  Terms terms_;
  std::optional<KetShape> shape_;
  double tolerance_ = kDefaultTolerance;
};

StateVector normalize(const StateVector& s);

/// <a|b>, conjugate-linear in the first argument.
Amplitude inner_product(const StateVector& a, const StateVector& b);

/// |<a|b>|^2 for normalized inputs.
double fidelity(const StateVector& a, const StateVector& b);

StateVector scale(const StateVector& s, Amplitude factor);

/// Attaches a photon state (kets with a photon and no spins) to a spin-only state.
StateVector tensor_with_photon(const StateVector& spins, const StateVector& photon);

struct Projection {
  StateVector state;  // not renormalized
  double probability = 0.0;
};

template <std::predicate<const BasisKet&> Pred>
Projection project(const StateVector& s, Pred&& keep) {
  Projection out{StateVector(s.tolerance()), 0.0};
  for (const auto& [ket, amp] : s) {
    if (keep(ket)) {
      out.state.add(ket, amp);
      out.probability += std::norm(amp);
    }
  }
  return out;
}

/// Removes the photon label from every ket. All kets must carry the same photon.
StateVector drop_photon(const StateVector& s);

/// Linear extension of a per-ket map. The map returns the image of one basis ket.
template <typename F>
  requires std::invocable<F, const BasisKet&>
StateVector transform(const StateVector& s, F&& image_of) {
  StateVector out(s.tolerance());
  for (const auto& [ket, amp] : s) {
    for (const auto& [image, coeff] : image_of(ket)) {
      out.add(image, amp * coeff);
    }
  }
  return out;
}

}  // namespace ecp::hilbert
