#include "ecp/cavity.hpp"

#include <cmath>
#include <map>

namespace ecp::cavity {

using hilbert::Direction;
using hilbert::PhotonLabel;
using hilbert::Polarization;
using hilbert::PolarizationBasis;
using hilbert::Spin;

void CavityParams::validate() const {
  const double all[] = {kappa, kappa_s, gamma, g, omega0, omega_c, omega_x};
  for (double v : all) {
    if (!std::isfinite(v)) throw EcpError(ErrorKind::InvalidParameters, "cavity parameters must be finite");
  }
  if (kappa <= 0.0) throw EcpError(ErrorKind::InvalidParameters, "kappa must be positive");
  if (kappa_s < 0.0) throw EcpError(ErrorKind::InvalidParameters, "kappa_s must be nonnegative");
  if (gamma < 0.0) throw EcpError(ErrorKind::InvalidParameters, "gamma must be nonnegative");
  if (g < 0.0) throw EcpError(ErrorKind::InvalidParameters, "g must be nonnegative");
}

std::string to_string(DenominatorConvention c) {
  return c == DenominatorConvention::Verbatim ? "verbatim" : "corrected";
}

DenominatorConvention convention_from_string(const std::string& text) {
  if (text == "verbatim") return DenominatorConvention::Verbatim;
  if (text == "corrected") return DenominatorConvention::Corrected;
  throw EcpError(ErrorKind::ConfigError, "convention must be 'verbatim' or 'corrected', got '" + text + "'");
}

namespace {

constexpr double kSingular = 1e-15;

std::complex<double> checked_divide(std::complex<double> num, std::complex<double> den, const char* what) {
  if (std::abs(den) < kSingular) throw EcpError(ErrorKind::SingularDenominator, what);
  return num / den;
}

}  // namespace

ScatterCoefficients scatter_coefficients(const CavityParams& raw, double omega, DenominatorConvention conv) {
  raw.validate();
  if (!std::isfinite(omega)) throw EcpError(ErrorKind::InvalidParameters, "omega must be finite");

  // Work in units of kappa.
  const double k = raw.kappa;
  const double ks = raw.kappa_s / k, gamma = raw.gamma / k, g = raw.g / k;
  const double w = omega / k, w0 = raw.omega0 / k, wc = raw.omega_c / k, wx = raw.omega_x / k;
  const std::complex<double> i(0.0, 1.0);

  const std::complex<double> dipole = i * (wx - w) + gamma / 2.0;
  const std::complex<double> cavity = i * (wc - w) + 1.0 + ks / 2.0;
  const std::complex<double> den = conv == DenominatorConvention::Verbatim ? dipole * (cavity + g * g)
                                                                           : dipole * cavity + g * g;

  ScatterCoefficients out;
  out.t = checked_divide(-dipole, den, "t(omega) denominator vanishes");
  out.r = 1.0 + out.t;

  const std::complex<double> bare = i * (w0 - w) + ks / 2.0;
  out.t0 = checked_divide(-1.0, bare + 1.0, "t0(omega) denominator vanishes");
  out.r0 = checked_divide(bare, bare + 1.0, "r0(omega) denominator vanishes");
  return out;
}

std::string to_string(DetectorLabel d) { return "D" + std::to_string(static_cast<int>(d) + 1); }

std::optional<DetectorLabel> detector_from_string(const std::string& text) {
  for (DetectorLabel d : kAllDetectors) {
    if (to_string(d) == text) return d;
  }
  return std::nullopt;
}

DetectorLabel detector_for(Station station, Port port, Polarization pol) {
  if (hilbert::basis_of(pol) != PolarizationBasis::Linear) {
    throw EcpError(ErrorKind::CircularBasisPhoton, "detectors sit behind a PBS in the H/V basis");
  }
  const bool h = pol == Polarization::H;
  if (station == Station::Alice) {
    if (port == Port::Output1) return h ? DetectorLabel::D1 : DetectorLabel::D2;
    return h ? DetectorLabel::D3 : DetectorLabel::D4;
  }
  if (port == Port::Output1) return h ? DetectorLabel::D5 : DetectorLabel::D6;
  return h ? DetectorLabel::D7 : DetectorLabel::D8;
}

Station station_of(DetectorLabel d) {
  return static_cast<int>(d) < 4 ? Station::Alice : Station::Charlie;
}

Port port_of(DetectorLabel d) {
  return (static_cast<int>(d) % 4) < 2 ? Port::Output1 : Port::Output2;
}

Polarization polarization_of(DetectorLabel d) {
  return static_cast<int>(d) % 2 == 0 ? Polarization::H : Polarization::V;
}

DetectorLabel partner_of(DetectorLabel d) {
  return static_cast<DetectorLabel>(static_cast<int>(d) ^ 1);
}

Port port_of(Direction d) { return d == Direction::PlusZ ? Port::Output1 : Port::Output2; }

namespace {

struct Rule {
  Polarization in_pol;
  Direction in_dir;
  Spin spin;
  Polarization out_pol;
  Direction out_dir;
  int sign;
};

// Coupled pairs reflect (direction and handedness label flip, +1); uncoupled
// pairs transmit with a -1.
constexpr Rule kRules[] = {
    {Polarization::R, Direction::PlusZ, Spin::Up, Polarization::L, Direction::MinusZ, +1},
    {Polarization::R, Direction::MinusZ, Spin::Up, Polarization::R, Direction::MinusZ, -1},
    {Polarization::R, Direction::PlusZ, Spin::Down, Polarization::R, Direction::PlusZ, -1},
    {Polarization::R, Direction::MinusZ, Spin::Down, Polarization::L, Direction::PlusZ, +1},
    {Polarization::L, Direction::PlusZ, Spin::Up, Polarization::L, Direction::PlusZ, -1},
    {Polarization::L, Direction::MinusZ, Spin::Up, Polarization::R, Direction::PlusZ, +1},
    {Polarization::L, Direction::PlusZ, Spin::Down, Polarization::R, Direction::MinusZ, +1},
    {Polarization::L, Direction::MinusZ, Spin::Down, Polarization::L, Direction::MinusZ, -1},
};

const PhotonLabel& circular_photon(const BasisKet& ket) {
  if (!ket.photon) throw EcpError(ErrorKind::ShapeMismatch, "ket " + hilbert::to_string(ket) + " has no photon");
  if (hilbert::basis_of(ket.photon->polarization) != PolarizationBasis::Circular) {
    throw EcpError(ErrorKind::LinearBasisPhoton, "expected an R/L photon in " + hilbert::to_string(ket));
  }
  return *ket.photon;
}

void check_spin_index(const BasisKet& ket, std::size_t spin_index) {
  if (spin_index >= ket.spins.size()) {
    throw EcpError(ErrorKind::DomainError, "spin index " + std::to_string(spin_index) + " out of range");
  }
}

}  // namespace

InteractionResult ideal_interaction(const BasisKet& ket, std::size_t spin_index) {
  const PhotonLabel& photon = circular_photon(ket);
  check_spin_index(ket, spin_index);
  const Spin spin = ket.spins[spin_index];
  for (const Rule& rule : kRules) {
    if (rule.in_pol == photon.polarization && rule.in_dir == photon.direction && rule.spin == spin) {
      BasisKet out = ket;
      out.photon = PhotonLabel{rule.out_pol, rule.out_dir};
      return {std::move(out), rule.sign};
    }
  }
  throw EcpError(ErrorKind::DomainError, "no interaction rule for " + hilbert::to_string(ket));
}

StateVector apply_ebs_gate(const StateVector& s, std::size_t spin_index) {
  return hilbert::transform(s, [spin_index](const BasisKet& ket) {
    auto [out, sign] = ideal_interaction(ket, spin_index);
    return std::array{std::pair{std::move(out), Amplitude(sign)}};
  });
}

StateVector hwp45(const StateVector& s) {
  const double h = 1.0 / std::sqrt(2.0);
  return hilbert::transform(s, [h](const BasisKet& ket) {
    const PhotonLabel& photon = circular_photon(ket);
    BasisKet to_h = ket, to_v = ket;
    to_h.photon = PhotonLabel{Polarization::H, photon.direction};
    to_v.photon = PhotonLabel{Polarization::V, photon.direction};
    const double v_sign = photon.polarization == Polarization::R ? 1.0 : -1.0;
    return std::array{std::pair{std::move(to_h), Amplitude(h)}, std::pair{std::move(to_v), Amplitude(v_sign * h)}};
  });
}

std::vector<Detection> detect(const StateVector& s, Station station) {
  for (const auto& [ket, amp] : s) {
    if (!ket.photon) throw EcpError(ErrorKind::ShapeMismatch, "nothing to detect in " + hilbert::to_string(ket));
    if (hilbert::basis_of(ket.photon->polarization) != PolarizationBasis::Linear) {
      throw EcpError(ErrorKind::CircularBasisPhoton, "pass the photon through the HWP before the PBS");
    }
  }

  std::map<DetectorLabel, hilbert::Projection> clicks;
  for (Direction dir : {Direction::PlusZ, Direction::MinusZ}) {
    for (Polarization pol : {Polarization::H, Polarization::V}) {
      const PhotonLabel label{pol, dir};
      clicks[detector_for(station, port_of(dir), pol)] =
          hilbert::project(s, [&](const BasisKet& k) { return *k.photon == label; });
    }
  }

  std::vector<Detection> out;
  for (auto& [det, proj] : clicks) {
    if (proj.state.empty()) continue;
    out.push_back({det, proj.probability, hilbert::normalize(hilbert::drop_photon(proj.state))});
  }
  return out;
}

bool couples(const PhotonLabel& photon, Spin spin) {
  const bool plus_sz = (photon.polarization == Polarization::R && photon.direction == Direction::PlusZ) ||
                       (photon.polarization == Polarization::L && photon.direction == Direction::MinusZ);
  return plus_sz == (spin == Spin::Up);
}

std::vector<std::pair<BasisKet, Amplitude>> LossyGate::image(const BasisKet& ket, std::size_t spin_index) const {
  const PhotonLabel& photon = circular_photon(ket);
  check_spin_index(ket, spin_index);
  const bool coupled = couples(photon, ket.spins[spin_index]);

  BasisKet transmitted = ket;
  BasisKet reflected = ket;
  reflected.photon = PhotonLabel{photon.polarization == Polarization::R ? Polarization::L : Polarization::R,
                                 hilbert::reverse(photon.direction)};
  return {{std::move(transmitted), coupled ? coeffs_.t : coeffs_.t0},
          {std::move(reflected), coupled ? coeffs_.r : coeffs_.r0}};
}

StateVector LossyGate::apply(const StateVector& s, std::size_t spin_index) const {
  return hilbert::transform(s, [&](const BasisKet& ket) { return image(ket, spin_index); });
}

namespace {

double ratio_or_zero(double num, double other) {
  const double den = std::sqrt(num * num + other * other);
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

double LossyGate::transmission_factor() const { return ratio_or_zero(std::abs(coeffs_.t0), std::abs(coeffs_.t)); }

double LossyGate::reflection_factor() const { return ratio_or_zero(std::abs(coeffs_.r), std::abs(coeffs_.r0)); }

LossyGate lossy_operators(const ScatterCoefficients& coeffs) { return LossyGate(coeffs); }

}  // namespace ecp::cavity
