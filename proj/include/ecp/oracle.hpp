#pragma once

// Cross-checks for the closed forms. Branch probabilities here come from raw
// amplitudes only: every round rebuilds the ancilla from the collapsed state's
// own amplitudes and never consults the analytics layer.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ecp/analytics.hpp"
#include "ecp/cavity.hpp"
#include "ecp/hilbert.hpp"
#include "ecp/protocol.hpp"

namespace ecp::oracle {

using cavity::DetectorLabel;
using protocol::Classification;
using protocol::GateMode;
using protocol::WCoefficients;

struct BranchNode {
  std::vector<DetectorLabel> path;
  double amplitude_weight = 1.0;  // path probability
  hilbert::StateVector state;     // spins, normalized and phase-corrected
  int depth = 0;
  cavity::Station station = cavity::Station::Alice;  // who measures next
  int alice_round = 0;    // rounds Alice has used so far
  int charlie_round = 0;  // rounds Charlie has used so far
  std::optional<Classification> classification;  // set on every non-root node
  std::vector<BranchNode> children;
  double lost = 0.0;  // probability mass leaked at this node (lossy gate only)

  bool is_leaf() const { return children.empty(); }
};

/// Full per-detector tree. k_charlie = 0 gives an Alice-only tree.
BranchNode enumerate_tree(const WCoefficients& c, int k_alice, int k_charlie,
                          const GateMode& gate = protocol::IdealGate{});

/// Walks every node; used by tests and the comparison layer.
void visit(const BranchNode& root, const std::function<void(const BranchNode&)>& fn);

/// Total leaf mass per class (lost mass reported as PhotonLost).
std::map<Classification, double> leaf_mass(const BranchNode& root);

struct SampleSummary {
  std::uint64_t shots = 0;
  std::map<Classification, std::uint64_t> counts;
  std::string rng_algorithm;

  double frequency(Classification c) const;
};

/// Seeded measurement sampling down the oracle tree. cfg.mode must be MonteCarlo.
SampleSummary sample_paths(const WCoefficients& c, const protocol::ProtocolConfig& cfg);

struct ComparisonReport {
  std::string quantity;
  WCoefficients coefficients;
  double analytic = 0.0;
  double simulated = 0.0;
  double abs_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// The closed forms under test; swap a member to build a negative control.
struct AnalyticModel {
  std::function<double(int, const WCoefficients&)> p1_round = analytics::p1_round;
  std::function<double(int, const WCoefficients&)> p2_round = analytics::p2_round;
  std::function<double(const WCoefficients&)> pt_one_round = analytics::pt_one_round;
  std::function<double(const WCoefficients&, const cavity::ScatterCoefficients&)> practical_p1 =
      analytics::practical_p1;
  std::function<double(const WCoefficients&, const cavity::ScatterCoefficients&)> practical_p2 =
      analytics::practical_p2;
  std::function<double(const WCoefficients&, const cavity::ScatterCoefficients&)> practical_total =
      analytics::practical_total;
};

struct Tolerances {
  double probability = 1e-10;
};

struct NamedCavity {
  std::string name;
  protocol::LossyCavity cavity;
};

/// kappa_s = 0.1 and 0.5 with g = 0.5, gamma = 0.1 (units of kappa).
std::vector<NamedCavity> reference_cavities();

/// Interior points of the simplex of squared coefficients with denominator
/// n + 2, i.e. n(n+1)/2 points. n = 1 is the equal-coefficient point.
std::vector<WCoefficients> simplex_grid(int n);

std::vector<ComparisonReport> compare_all(const std::vector<WCoefficients>& grid, int k_alice, int k_charlie,
                                          const Tolerances& tol, const AnalyticModel& model = {},
                                          const std::vector<NamedCavity>& cavities = reference_cavities());

/// Fixed-width table, one row per report, with a pass/fail tally at the end.
void print_table(std::ostream& out, const std::vector<ComparisonReport>& reports);

}  // namespace ecp::oracle
