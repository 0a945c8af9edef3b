#pragma once

// Quantum-dot spin in a microcavity used as a photon/spin parity check, plus
// the linear optics (HWP at 45 degrees, PBS, detectors) behind its two ports.
//
// A photon is injected along -z. Transmitted photons (output2) keep -z,
// reflected photons (output1) leave along +z with their handedness label
// flipped.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecp/hilbert.hpp"

namespace ecp::cavity {

using hilbert::Amplitude;
using hilbert::BasisKet;
using hilbert::StateVector;

/// Rates and frequencies in units of kappa.
struct CavityParams {
  double kappa = 1.0;
  double kappa_s = 0.0;
  double gamma = 0.0;
  double g = 0.0;
  double omega0 = 0.0;
  double omega_c = 0.0;
  double omega_x = 0.0;

  void validate() const;
};

/// Where g^2 enters the denominator of t(omega).
///   Verbatim:  [i(wX-w)+gamma/2] * [i(wc-w)+kappa+kappa_s/2+g^2]
///   Corrected: [i(wX-w)+gamma/2] * [i(wc-w)+kappa+kappa_s/2] + g^2
/// Verbatim is the default because it reproduces the quoted lossy maxima.
enum class DenominatorConvention : std::uint8_t { Verbatim, Corrected };

std::string to_string(DenominatorConvention c);
DenominatorConvention convention_from_string(const std::string& text);

struct ScatterCoefficients {
  std::complex<double> t;   // coupled transmission
  std::complex<double> r;   // coupled reflection, r = 1 + t
  std::complex<double> t0;  // uncoupled transmission
  std::complex<double> r0;  // uncoupled reflection, r0 = 1 + t0

  static ScatterCoefficients ideal() { return {0.0, 1.0, -1.0, 0.0}; }
};

ScatterCoefficients scatter_coefficients(const CavityParams& p, double omega,
                                         DenominatorConvention conv = DenominatorConvention::Verbatim);

enum class Station : std::uint8_t { Alice, Charlie };

/// output1 is the reflection port, output2 the transmission port.
enum class Port : std::uint8_t { Output1, Output2 };

enum class DetectorLabel : std::uint8_t { D1, D2, D3, D4, D5, D6, D7, D8 };

inline constexpr std::array<DetectorLabel, 8> kAllDetectors = {
    DetectorLabel::D1, DetectorLabel::D2, DetectorLabel::D3, DetectorLabel::D4,
    DetectorLabel::D5, DetectorLabel::D6, DetectorLabel::D7, DetectorLabel::D8};

std::string to_string(DetectorLabel d);
std::optional<DetectorLabel> detector_from_string(const std::string& text);

// The single routing table. Every other detector query goes through these.
DetectorLabel detector_for(Station station, Port port, hilbert::Polarization pol);
Station station_of(DetectorLabel d);
Port port_of(DetectorLabel d);
hilbert::Polarization polarization_of(DetectorLabel d);
/// The other detector behind the same PBS.
DetectorLabel partner_of(DetectorLabel d);

Port port_of(hilbert::Direction d);

struct InteractionResult {
  BasisKet ket;
  int sign;

  bool operator==(const InteractionResult&) const = default;
};

/// One photon/spin interaction from the eight-rule table.
InteractionResult ideal_interaction(const BasisKet& ket, std::size_t spin_index);

/// Linear extension of ideal_interaction.
StateVector apply_ebs_gate(const StateVector& s, std::size_t spin_index);

/// R -> (H+V)/sqrt2, L -> (H-V)/sqrt2.
StateVector hwp45(const StateVector& s);

struct Detection {
  DetectorLabel detector;
  double probability;
  StateVector spins;  // normalized
};

/// PBS plus detectors for one station. Outcomes with zero probability are omitted.
std::vector<Detection> detect(const StateVector& s, Station station);

/// True when the photon's s_z matches the spin: R^+z / L^-z with up,
/// L^+z / R^-z with down.
bool couples(const hilbert::PhotonLabel& photon, hilbert::Spin spin);

/// Transmission and reflection operators under leakage. Coupled photon/spin
/// pairs pick up (t, r), uncoupled ones (t0, r0).
class LossyGate {
 public:
  explicit LossyGate(const ScatterCoefficients& c) : coeffs_(c) {}

  const ScatterCoefficients& coefficients() const { return coeffs_; }

  /// Image of a single circular-basis ket: a transmitted and a reflected term.
  std::vector<std::pair<BasisKet, Amplitude>> image(const BasisKet& ket, std::size_t spin_index) const;

  /// Not unitary when kappa_s > 0; the lost norm is leakage.
  StateVector apply(const StateVector& s, std::size_t spin_index) const;

  /// |t0| / sqrt(|t0|^2 + |t|^2): weight of the wanted transmission.
  double transmission_factor() const;
  /// |r| / sqrt(|r0|^2 + |r|^2): weight of the wanted reflection.
  double reflection_factor() const;

 private:
  ScatterCoefficients coeffs_;
};

LossyGate lossy_operators(const ScatterCoefficients& coeffs);

}  // namespace ecp::cavity
