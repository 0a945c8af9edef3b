#include "ecp/hilbert.hpp"

#include <cmath>

namespace ecp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroState: return "ZeroState";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFiniteAmplitude: return "NonFiniteAmplitude";
    case ErrorKind::LinearBasisPhoton: return "LinearBasisPhoton";
    case ErrorKind::CircularBasisPhoton: return "CircularBasisPhoton";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::InvalidParameters: return "InvalidParameters";
    case ErrorKind::InvalidCoefficients: return "InvalidCoefficients";
    case ErrorKind::DegenerateCoefficients: return "DegenerateCoefficients";
    case ErrorKind::UnknownDetector: return "UnknownDetector";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace ecp

namespace ecp::hilbert {

KetShape shape_of(const BasisKet& ket) {
  KetShape shape;
  shape.has_photon = ket.photon.has_value();
  if (ket.photon) shape.basis = basis_of(ket.photon->polarization);
  shape.spin_count = ket.spins.size();
  return shape;
}

std::vector<Spin> spins_from_string(std::string_view text) {
  std::vector<Spin> spins;
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == 'U' || c == 'u' || c == '0') {
      spins.push_back(Spin::Up);
      ++i;
    } else if (c == 'D' || c == 'd' || c == '1') {
      spins.push_back(Spin::Down);
      ++i;
    } else if (text.substr(i, 3) == "↑") {
      spins.push_back(Spin::Up);
      i += 3;
    } else if (text.substr(i, 3) == "↓") {
      spins.push_back(Spin::Down);
      i += 3;
    } else {
      throw EcpError(ErrorKind::DomainError, "bad spin character in '" + std::string(text) + "'");
    }
  }
  return spins;
}

std::string spins_to_string(const std::vector<Spin>& spins) {
  std::string out;
  out.reserve(spins.size());
  for (Spin s : spins) out.push_back(s == Spin::Up ? 'U' : 'D');
  return out;
}

std::string to_string(Polarization p) {
  switch (p) {
    case Polarization::R: return "R";
    case Polarization::L: return "L";
    case Polarization::H: return "H";
    case Polarization::V: return "V";
  }
  return "?";
}

std::string to_string(Direction d) { return d == Direction::PlusZ ? "+z" : "-z"; }

std::string to_string(const BasisKet& ket) {
  std::string out;
  if (ket.photon) out += to_string(ket.photon->polarization) + "^" + to_string(ket.photon->direction) + " ";
  return out + "|" + spins_to_string(ket.spins) + ">";
}

BasisKet spin_ket(std::string_view spins) { return BasisKet{std::nullopt, spins_from_string(spins)}; }

BasisKet photon_ket(Polarization p, Direction d, std::string_view spins) {
  return BasisKet{PhotonLabel{p, d}, spins_from_string(spins)};
}

StateVector::StateVector(std::initializer_list<std::pair<BasisKet, Amplitude>> terms, double tolerance)
    : tolerance_(tolerance) {
  for (const auto& [ket, amp] : terms) add(ket, amp);
}

void StateVector::add(const BasisKet& ket, Amplitude amplitude) {
  if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag())) {
    throw EcpError(ErrorKind::NonFiniteAmplitude, "amplitude for " + to_string(ket));
  }
  const KetShape shape = shape_of(ket);
  if (shape_ && *shape_ != shape) {
    throw EcpError(ErrorKind::ShapeMismatch, "ket " + to_string(ket) + " does not match state shape");
  }
  shape_ = shape;

  auto [it, inserted] = terms_.try_emplace(ket, amplitude);
  if (!inserted) it->second += amplitude;
  if (std::norm(it->second) < tolerance_ * tolerance_) terms_.erase(it);
}

Amplitude StateVector::amplitude(const BasisKet& ket) const {
  auto it = terms_.find(ket);
  return it == terms_.end() ? Amplitude{} : it->second;
}

double StateVector::norm_squared() const {
  double sum = 0.0;
  for (const auto& [ket, amp] : terms_) sum += std::norm(amp);
  return sum;
}

StateVector normalize(const StateVector& s) {
  const double n2 = s.norm_squared();
  if (s.empty() || n2 < s.tolerance() * s.tolerance()) {
    throw EcpError(ErrorKind::ZeroState, "cannot normalize a zero state");
  }
  return scale(s, 1.0 / std::sqrt(n2));
}

namespace {

void require_same_shape(const StateVector& a, const StateVector& b) {
  if (a.shape() && b.shape() && *a.shape() != *b.shape()) {
    throw EcpError(ErrorKind::ShapeMismatch, "states have different ket shapes");
  }
}

}  // namespace

Amplitude inner_product(const StateVector& a, const StateVector& b) {
  require_same_shape(a, b);
  Amplitude sum{};
  for (const auto& [ket, amp] : a) sum += std::conj(amp) * b.amplitude(ket);
  return sum;
}

double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner_product(a, b)); }

StateVector scale(const StateVector& s, Amplitude factor) {
  StateVector out(s.tolerance());
  for (const auto& [ket, amp] : s) out.add(ket, amp * factor);
  return out;
}

StateVector tensor_with_photon(const StateVector& spins, const StateVector& photon) {
  if (spins.shape() && spins.shape()->has_photon) {
    throw EcpError(ErrorKind::ShapeMismatch, "state already carries a photon");
  }
  if (photon.shape() && (!photon.shape()->has_photon || photon.shape()->spin_count != 0)) {
    throw EcpError(ErrorKind::ShapeMismatch, "photon state must hold photon-only kets");
  }
  StateVector out(spins.tolerance());
  for (const auto& [pk, pa] : photon) {
    for (const auto& [sk, sa] : spins) {
      out.add(BasisKet{pk.photon, sk.spins}, pa * sa);
    }
  }
  return out;
}

StateVector drop_photon(const StateVector& s) {
  StateVector out(s.tolerance());
  std::optional<PhotonLabel> seen;
  for (const auto& [ket, amp] : s) {
    if (!ket.photon) throw EcpError(ErrorKind::ShapeMismatch, "ket has no photon to drop");
    if (seen && *seen != *ket.photon) {
      throw EcpError(ErrorKind::ShapeMismatch, "state mixes photon labels; project first");
    }
    seen = ket.photon;
    out.add(BasisKet{std::nullopt, ket.spins}, amp);
  }
  return out;
}

}  // namespace ecp::hilbert
