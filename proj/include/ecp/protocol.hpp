#pragma once

// Two-station concentration of a less-entangled W state
//   a1|DUU> + a2|UDU> + a3|UUD>
// held on three electron spins. Alice (spin 1) strips a1 out of the state;
// Charlie (spin 3) then equalizes a2 and a3. Either party retries on a
// failure click with a fresh ancilla photon built from the updated
// coefficients.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ecp/cavity.hpp"
#include "ecp/hilbert.hpp"

namespace ecp::protocol {

using cavity::DetectorLabel;
using cavity::Station;
using hilbert::StateVector;

struct WCoefficients {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;

  static constexpr double kNormTolerance = 1e-12;

  /// Checks nonnegativity and unit norm.
  static WCoefficients validated(double a1, double a2, double a3);
  /// Rescales a nonnegative, nonzero triple to unit norm.
  static WCoefficients normalized(double a1, double a2, double a3);
  static WCoefficients equal();

  /// Protocol entry additionally needs every coefficient strictly positive.
  void require_genuine_w() const;

  double norm_squared() const { return a1 * a1 + a2 * a2 + a3 * a3; }
};

/// The three W kets in order |DUU>, |UDU>, |UUD>.
const std::array<hilbert::BasisKet, 3>& w_kets();

StateVector prepare_w_state(const WCoefficients& c);

/// Reads |amplitude| of the three W kets; the state must live in the W subspace.
WCoefficients coefficients_of(const StateVector& s);

StateVector alice_photon(const WCoefficients& c);
StateVector charlie_photon(const WCoefficients& c);

/// Coefficients after Alice's failure click: proportional to (a1^2, a2^2, a2*a3).
WCoefficients coefficient_update_alice(const WCoefficients& c);
/// Coefficients after Charlie's failure click: proportional to (a2^2, a2^2, a3^2).
WCoefficients coefficient_update_charlie(const WCoefficients& c);

enum class Classification : std::uint8_t { AliceSuccess, AliceRetry, CharlieSuccess, CharlieRetry, PhotonLost };

std::string to_string(Classification c);
Classification classify(DetectorLabel d);

struct IdealGate {};
struct LossyCavity {
  cavity::CavityParams params;
  cavity::DenominatorConvention convention = cavity::DenominatorConvention::Verbatim;
  /// Photon frequency; defaults to the input-photon frequency omega0.
  std::optional<double> omega;

  cavity::ScatterCoefficients coefficients() const;
};
using GateMode = std::variant<IdealGate, LossyCavity>;

struct ExhaustiveTree {
  /// Fold each heralded pair (D1|D2, ...) into one branch.
  bool merge_heralds = false;
};
struct MonteCarlo {
  std::uint64_t shots = 1;
};
using RunMode = std::variant<ExhaustiveTree, MonteCarlo>;

struct ProtocolConfig {
  int max_rounds_alice = 1;
  int max_rounds_charlie = 1;
  GateMode gate_mode = IdealGate{};
  std::uint64_t rng_seed = 0;
  RunMode mode = ExhaustiveTree{};

  void validate() const;
};

struct RoundOutcome {
  DetectorLabel detector;
  double probability = 0.0;
  StateVector post_state;  // spins only, phase-corrected
  WCoefficients post_coefficients;
  Classification classification;
};

/// sigma_z on the spin owned by the station that heard a D2/D4/D6/D8 click.
StateVector phase_correction(const StateVector& s, DetectorLabel detector);

std::vector<RoundOutcome> alice_round(const StateVector& state, const WCoefficients& c, const GateMode& gate);
std::vector<RoundOutcome> charlie_round(const StateVector& state, const WCoefficients& c, const GateMode& gate);

/// One click along a branch. `merged` marks a folded heralded pair.
struct Herald {
  DetectorLabel detector;
  bool merged = false;

  bool operator==(const Herald&) const = default;
  auto operator<=>(const Herald&) const = default;
};

std::string to_string(const Herald& h);

struct Branch {
  std::vector<Herald> path;
  double probability = 0.0;
  Classification classification;
  std::optional<StateVector> final_state;  // absent for PhotonLost
  std::uint64_t count = 0;                 // Monte Carlo only
};

struct ProtocolTrace {
  ProtocolConfig config;
  WCoefficients initial;
  std::vector<Branch> branches;
  double total_success_probability = 0.0;
  std::uint64_t shots = 0;  // Monte Carlo only
  std::map<Classification, std::uint64_t> class_counts;
  std::string rng_algorithm;
};

/// Upper bound on per-detector leaves before tree mode requires merge_heralds.
inline constexpr std::uint64_t kMaxTreeLeaves = std::uint64_t{1} << 20;

ProtocolTrace run_protocol(const WCoefficients& c, const ProtocolConfig& cfg);

}  // namespace ecp::protocol
