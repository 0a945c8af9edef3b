#include "ecp/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "ecp/rng.hpp"

namespace ecp::oracle {

using cavity::Port;
using cavity::Station;
using hilbert::Amplitude;
using hilbert::BasisKet;
using hilbert::Direction;
using hilbert::Polarization;
using hilbert::StateVector;

namespace {

const BasisKet kDUU = hilbert::spin_ket("DUU");
const BasisKet kUDU = hilbert::spin_ket("UDU");
const BasisKet kUUD = hilbert::spin_ket("UUD");

StateVector ancilla(double r_weight, double l_weight) {
  const double n = std::hypot(r_weight, l_weight);
  if (n == 0.0) throw EcpError(ErrorKind::DegenerateCoefficients, "ancilla photon would be empty");
  return StateVector{{hilbert::photon_ket(Polarization::R, Direction::MinusZ), r_weight / n},
                     {hilbert::photon_ket(Polarization::L, Direction::MinusZ), l_weight / n}};
}

StateVector sigma_z(const StateVector& s, std::size_t spin) {
  StateVector out(s.tolerance());
  for (const auto& [ket, amp] : s) out.add(ket, ket.spins[spin] == hilbert::Spin::Down ? -amp : amp);
  return out;
}

struct Limits {
  int k_alice;
  int k_charlie;
  GateMode gate;
};

// One measurement round at `node`, appending its children.
void expand(BranchNode& node, const Limits& lim) {
  const bool alice = node.station == Station::Alice;
  const std::size_t spin = alice ? 0 : 2;
  const double c1 = std::abs(node.state.amplitude(kDUU));
  const double c2 = std::abs(node.state.amplitude(kUDU));
  const double c3 = std::abs(node.state.amplitude(kUUD));

  StateVector joint = hilbert::tensor_with_photon(node.state, alice ? ancilla(c1, c2) : ancilla(c2, c3));
  joint = cavity::apply_ebs_gate(joint, spin);
  if (const auto* lossy = std::get_if<protocol::LossyCavity>(&lim.gate)) {
    const auto op = cavity::lossy_operators(lossy->coefficients());
    const double keep_t = std::sqrt(op.transmission_factor()), keep_r = std::sqrt(op.reflection_factor());
    StateVector leaky(joint.tolerance());
    for (const auto& [ket, amp] : joint) {
      leaky.add(ket, amp * (ket.photon->direction == Direction::MinusZ ? keep_t : keep_r));
    }
    joint = leaky;
  }
  joint = cavity::hwp45(joint);

  const int round_used = alice ? node.alice_round + 1 : node.charlie_round + 1;
  double seen = 0.0;
  for (auto& click : cavity::detect(joint, node.station)) {
    seen += click.probability;
    const Port port = cavity::port_of(click.detector);
    const bool success = alice ? port == Port::Output2 : port == Port::Output1;

    BranchNode child;
    child.path = node.path;
    child.path.push_back(click.detector);
    child.amplitude_weight = node.amplitude_weight * click.probability;
    child.state = cavity::polarization_of(click.detector) == Polarization::V ? sigma_z(click.spins, spin)
                                                                            : std::move(click.spins);
    child.depth = node.depth + 1;
    child.alice_round = alice ? round_used : node.alice_round;
    child.charlie_round = alice ? 0 : round_used;
    if (alice) {
      child.classification = success ? Classification::AliceSuccess : Classification::AliceRetry;
    } else {
      child.classification = success ? Classification::CharlieSuccess : Classification::CharlieRetry;
    }

    bool more = false;
    if (alice && success) {
      child.station = Station::Charlie;
      more = lim.k_charlie > 0;
    } else if (alice) {
      child.station = Station::Alice;
      more = round_used < lim.k_alice;
    } else if (!success) {
      child.station = Station::Charlie;
      more = round_used < lim.k_charlie;
    }
    if (more) expand(child, lim);
    node.children.push_back(std::move(child));
  }
  if (std::holds_alternative<protocol::LossyCavity>(lim.gate)) node.lost = std::max(0.0, 1.0 - seen);
}

}  // namespace

BranchNode enumerate_tree(const WCoefficients& c, int k_alice, int k_charlie, const GateMode& gate) {
  if (k_alice < 1 || k_charlie < 0) throw EcpError(ErrorKind::DomainError, "tree depths must be k_alice >= 1, k_charlie >= 0");
  c.require_genuine_w();
  BranchNode root;
  root.state = hilbert::normalize(StateVector{{kDUU, c.a1}, {kUDU, c.a2}, {kUUD, c.a3}});
  expand(root, Limits{k_alice, k_charlie, gate});
  return root;
}

void visit(const BranchNode& root, const std::function<void(const BranchNode&)>& fn) {
  fn(root);
  for (const auto& child : root.children) visit(child, fn);
}

std::map<Classification, double> leaf_mass(const BranchNode& root) {
  std::map<Classification, double> mass;
  visit(root, [&](const BranchNode& n) {
    if (n.is_leaf() && n.classification) mass[*n.classification] += n.amplitude_weight;
    if (n.lost > 0.0) mass[Classification::PhotonLost] += n.amplitude_weight * n.lost;
  });
  return mass;
}

double SampleSummary::frequency(Classification c) const {
  auto it = counts.find(c);
  return it == counts.end() || shots == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(shots);
}

SampleSummary sample_paths(const WCoefficients& c, const protocol::ProtocolConfig& cfg) {
  const auto* mc = std::get_if<protocol::MonteCarlo>(&cfg.mode);
  if (!mc) throw EcpError(ErrorKind::ConfigError, "sample_paths needs Monte Carlo mode");
  cfg.validate();
  const BranchNode root = enumerate_tree(c, cfg.max_rounds_alice, cfg.max_rounds_charlie, cfg.gate_mode);

  SampleSummary out;
  out.shots = mc->shots;
  out.rng_algorithm = kRngAlgorithm;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::uint64_t shot = 0; shot < mc->shots; ++shot) {
    auto engine = shot_engine(cfg.rng_seed, shot);
    const BranchNode* node = &root;
    while (true) {
      double u = uniform(engine) * node->amplitude_weight;
      const BranchNode* next = nullptr;
      for (const auto& child : node->children) {
        if (u < child.amplitude_weight) {
          next = &child;
          break;
        }
        u -= child.amplitude_weight;
      }
      if (!next && node->lost > 1e-12) {
        ++out.counts[Classification::PhotonLost];
        break;
      }
      if (!next) next = &node->children.back();
      if (next->is_leaf()) {
        ++out.counts[*next->classification];
        break;
      }
      node = next;
    }
  }
  return out;
}

std::vector<NamedCavity> reference_cavities() {
  std::vector<NamedCavity> out;
  for (double ks : {0.1, 0.5}) {
    protocol::LossyCavity lc;
    lc.params.kappa_s = ks;
    lc.params.g = 0.5;
    lc.params.gamma = 0.1;
    char name[32];
    std::snprintf(name, sizeof name, "ks=%.1f", ks);
    out.push_back({name, lc});
  }
  return out;
}

std::vector<WCoefficients> simplex_grid(int n) {
  if (n < 1) throw EcpError(ErrorKind::DomainError, "grid size must be >= 1");
  const int d = n + 2;
  std::vector<WCoefficients> grid;
  for (int i = 1; i <= d - 2; ++i) {
    for (int j = 1; i + j <= d - 1; ++j) {
      const int k = d - i - j;
      grid.push_back({std::sqrt(double(i) / d), std::sqrt(double(j) / d), std::sqrt(double(k) / d)});
    }
  }
  return grid;
}

namespace {

ComparisonReport report(std::string quantity, const WCoefficients& c, double analytic, double simulated, double tol) {
  const double err = std::abs(analytic - simulated);
  return {std::move(quantity), c, analytic, simulated, err, tol, err <= tol};
}

}  // namespace

std::vector<ComparisonReport> compare_all(const std::vector<WCoefficients>& grid, int k_alice, int k_charlie,
                                          const Tolerances& tol, const AnalyticModel& model,
                                          const std::vector<NamedCavity>& cavities) {
  if (grid.empty()) throw EcpError(ErrorKind::DomainError, "comparison grid is empty");
  if (k_alice < 1 || k_charlie < 1) throw EcpError(ErrorKind::DomainError, "depths must be >= 1");
  const double t = tol.probability;

  std::vector<ComparisonReport> out;
  for (const auto& c : grid) {
    const BranchNode tree = enumerate_tree(c, k_alice, k_charlie);
    std::vector<double> alice_by_round(k_alice + 1, 0.0), charlie_by_round(k_charlie + 1, 0.0);
    double one_shot = 0.0, total = 0.0;
    visit(tree, [&](const BranchNode& n) {
      if (n.classification == Classification::AliceSuccess) alice_by_round[n.alice_round] += n.amplitude_weight;
      if (n.classification == Classification::CharlieSuccess) {
        charlie_by_round[n.charlie_round] += n.amplitude_weight;
        total += n.amplitude_weight;
        if (n.alice_round == 1 && n.charlie_round == 1) one_shot += n.amplitude_weight;
      }
    });
    double alice_total = 0.0;
    for (double m : alice_by_round) alice_total += m;

    double p1_sum = 0.0, p2_sum = 0.0;
    for (int k = 1; k <= k_alice; ++k) {
      const double a = model.p1_round(k, c);
      p1_sum += a;
      out.push_back(report("P1^" + std::to_string(k), c, a, alice_by_round[k], t));
    }
    for (int k = 1; k <= k_charlie; ++k) {
      const double a = model.p2_round(k, c);
      p2_sum += a;
      out.push_back(report("P2^" + std::to_string(k), c, a, charlie_by_round[k] / alice_total, t));
    }
    out.push_back(report("Pt^1", c, model.pt_one_round(c), one_shot, t));
    out.push_back(report("Pt(" + std::to_string(k_alice) + "," + std::to_string(k_charlie) + ")", c,
                         p1_sum * p2_sum, total, t));

    for (const auto& named : cavities) {
      const BranchNode lossy = enumerate_tree(c, 1, 1, named.cavity);
      const auto mass = leaf_mass(lossy);
      double alice_ok = 0.0;
      for (const auto& child : lossy.children) {
        if (child.classification == Classification::AliceSuccess) alice_ok += child.amplitude_weight;
      }
      const double charlie_ok = mass.count(Classification::CharlieSuccess) ? mass.at(Classification::CharlieSuccess) : 0.0;
      const auto sc = named.cavity.coefficients();
      out.push_back(report("P1'[" + named.name + "]", c, model.practical_p1(c, sc), alice_ok, t));
      out.push_back(report("P2'[" + named.name + "]", c, model.practical_p2(c, sc), charlie_ok / alice_ok, t));
      out.push_back(report("P'[" + named.name + "]", c, model.practical_total(c, sc), charlie_ok, t));
    }
  }
  return out;
}

void print_table(std::ostream& out, const std::vector<ComparisonReport>& reports) {
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %-28s %-20s %-20s %-10s %s\n", "quantity", "(a1, a2, a3)", "analytic",
                "simulated", "abs_err", "status");
  out << line;
  std::size_t failed = 0;
  for (const auto& r : reports) {
    char coeffs[64];
    std::snprintf(coeffs, sizeof coeffs, "(%.6f, %.6f, %.6f)", r.coefficients.a1, r.coefficients.a2,
                  r.coefficients.a3);
    std::snprintf(line, sizeof line, "%-14s %-28s %-20.15g %-20.15g %-10.2e %s\n", r.quantity.c_str(), coeffs,
                  r.analytic, r.simulated, r.abs_error, r.pass ? "PASS" : "FAIL");
    out << line;
    if (!r.pass) ++failed;
  }
  out << reports.size() - failed << "/" << reports.size() << " comparisons passed\n";
}

}  // namespace ecp::oracle
