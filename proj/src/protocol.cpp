#include "ecp/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <thread>

#include "ecp/rng.hpp"

namespace ecp::protocol {

using hilbert::BasisKet;
using hilbert::Direction;
using hilbert::Polarization;

WCoefficients WCoefficients::validated(double a1, double a2, double a3) {
  WCoefficients c{a1, a2, a3};
  for (double a : {a1, a2, a3}) {
    if (!std::isfinite(a) || a < 0.0) {
      throw EcpError(ErrorKind::InvalidCoefficients, "coefficients must be finite and nonnegative");
    }
  }
  if (std::abs(c.norm_squared() - 1.0) > kNormTolerance) {
    throw EcpError(ErrorKind::InvalidCoefficients,
                   "a1^2 + a2^2 + a3^2 must be 1, got " + std::to_string(c.norm_squared()));
  }
  return c;
}

WCoefficients WCoefficients::normalized(double a1, double a2, double a3) {
  for (double a : {a1, a2, a3}) {
    if (!std::isfinite(a) || a < 0.0) {
      throw EcpError(ErrorKind::InvalidCoefficients, "coefficients must be finite and nonnegative");
    }
  }
  const double n = std::sqrt(a1 * a1 + a2 * a2 + a3 * a3);
  if (n == 0.0) throw EcpError(ErrorKind::InvalidCoefficients, "all coefficients are zero");
  return {a1 / n, a2 / n, a3 / n};
}

WCoefficients WCoefficients::equal() {
  const double a = 1.0 / std::sqrt(3.0);
  return {a, a, a};
}

void WCoefficients::require_genuine_w() const {
  validated(a1, a2, a3);
  if (a1 <= 0.0 || a2 <= 0.0 || a3 <= 0.0) {
    throw EcpError(ErrorKind::InvalidCoefficients, "a W state needs all three coefficients nonzero");
  }
}

const std::array<BasisKet, 3>& w_kets() {
  static const std::array<BasisKet, 3> kets = {hilbert::spin_ket("DUU"), hilbert::spin_ket("UDU"),
                                                hilbert::spin_ket("UUD")};
  return kets;
}

StateVector prepare_w_state(const WCoefficients& c) {
  const WCoefficients v = WCoefficients::validated(c.a1, c.a2, c.a3);
  const auto& k = w_kets();
  return hilbert::normalize(StateVector{{k[0], v.a1}, {k[1], v.a2}, {k[2], v.a3}});
}

WCoefficients coefficients_of(const StateVector& s) {
  const auto& k = w_kets();
  double weight = 0.0;
  for (const auto& ket : k) weight += std::norm(s.amplitude(ket));
  if (std::abs(weight - s.norm_squared()) > 1e-10) {
    throw EcpError(ErrorKind::InvalidCoefficients, "state has weight outside the W subspace");
  }
  return WCoefficients::normalized(std::abs(s.amplitude(k[0])), std::abs(s.amplitude(k[1])),
                                   std::abs(s.amplitude(k[2])));
}

namespace {

StateVector photon_state(double r_weight, double l_weight) {
  const double n2 = r_weight * r_weight + l_weight * l_weight;
  if (n2 <= 0.0) throw EcpError(ErrorKind::DegenerateCoefficients, "ancilla photon would be empty");
  const double n = std::sqrt(n2);
  return StateVector{{hilbert::photon_ket(Polarization::R, Direction::MinusZ), r_weight / n},
                     {hilbert::photon_ket(Polarization::L, Direction::MinusZ), l_weight / n}};
}

}  // namespace

StateVector alice_photon(const WCoefficients& c) { return photon_state(c.a1, c.a2); }

StateVector charlie_photon(const WCoefficients& c) { return photon_state(c.a2, c.a3); }

WCoefficients coefficient_update_alice(const WCoefficients& c) {
  return WCoefficients::normalized(c.a1 * c.a1, c.a2 * c.a2, c.a2 * c.a3);
}

WCoefficients coefficient_update_charlie(const WCoefficients& c) {
  return WCoefficients::normalized(c.a1 * c.a2, c.a2 * c.a2, c.a3 * c.a3);
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::AliceSuccess: return "AliceSuccess";
    case Classification::AliceRetry: return "AliceRetry";
    case Classification::CharlieSuccess: return "CharlieSuccess";
    case Classification::CharlieRetry: return "CharlieRetry";
    case Classification::PhotonLost: return "PhotonLost";
  }
  return "?";
}

Classification classify(DetectorLabel d) {
  switch (d) {
    case DetectorLabel::D1:
    case DetectorLabel::D2: return Classification::AliceRetry;
    case DetectorLabel::D3:
    case DetectorLabel::D4: return Classification::AliceSuccess;
    case DetectorLabel::D5:
    case DetectorLabel::D6: return Classification::CharlieSuccess;
    case DetectorLabel::D7:
    case DetectorLabel::D8: return Classification::CharlieRetry;
  }
  throw EcpError(ErrorKind::UnknownDetector, "unknown detector");
}

cavity::ScatterCoefficients LossyCavity::coefficients() const {
  return cavity::scatter_coefficients(params, omega.value_or(params.omega0), convention);
}

void ProtocolConfig::validate() const {
  if (max_rounds_alice < 1 || max_rounds_charlie < 1) {
    throw EcpError(ErrorKind::ConfigError, "max_rounds_alice and max_rounds_charlie must be >= 1");
  }
  if (max_rounds_alice > 64 || max_rounds_charlie > 64) {
    throw EcpError(ErrorKind::ConfigError, "at most 64 rounds per station");
  }
  if (const auto* mc = std::get_if<MonteCarlo>(&mode); mc && mc->shots < 1) {
    throw EcpError(ErrorKind::ConfigError, "n_shots must be >= 1");
  }
  if (const auto* lossy = std::get_if<LossyCavity>(&gate_mode)) lossy->params.validate();
}

StateVector phase_correction(const StateVector& s, DetectorLabel detector) {
  std::size_t spin_index = 0;
  switch (detector) {
    case DetectorLabel::D2:
    case DetectorLabel::D4: spin_index = 0; break;
    case DetectorLabel::D6:
    case DetectorLabel::D8: spin_index = 2; break;
    default:
      throw EcpError(ErrorKind::UnknownDetector, cavity::to_string(detector) + " needs no phase correction");
  }
  return hilbert::transform(s, [spin_index](const BasisKet& ket) {
    if (spin_index >= ket.spins.size()) throw EcpError(ErrorKind::ShapeMismatch, "spin register too short");
    const double sign = ket.spins[spin_index] == hilbert::Spin::Down ? -1.0 : 1.0;
    return std::array{std::pair{ket, hilbert::Amplitude(sign)}};
  });
}

namespace {

// Leaks the unwanted part of each port: transmitted amplitudes carry
// sqrt(transmission_factor), reflected ones sqrt(reflection_factor).
StateVector apply_port_losses(const StateVector& s, const GateMode& gate) {
  const auto* lossy = std::get_if<LossyCavity>(&gate);
  if (!lossy) return s;
  const cavity::LossyGate op = cavity::lossy_operators(lossy->coefficients());
  const double keep_t = std::sqrt(op.transmission_factor());
  const double keep_r = std::sqrt(op.reflection_factor());
  return hilbert::transform(s, [&](const BasisKet& ket) {
    const double w = cavity::port_of(ket.photon->direction) == cavity::Port::Output2 ? keep_t : keep_r;
    return std::array{std::pair{ket, hilbert::Amplitude(w)}};
  });
}

std::vector<RoundOutcome> run_round(const StateVector& state, const StateVector& photon, std::size_t spin_index,
                                    Station station, const GateMode& gate) {
  StateVector joint = hilbert::tensor_with_photon(state, photon);
  joint = cavity::apply_ebs_gate(joint, spin_index);
  joint = apply_port_losses(joint, gate);
  joint = cavity::hwp45(joint);

  std::vector<RoundOutcome> out;
  for (auto& click : cavity::detect(joint, station)) {
    RoundOutcome o{click.detector, click.probability, std::move(click.spins), {}, classify(click.detector)};
    if (cavity::polarization_of(o.detector) == Polarization::V) o.post_state = phase_correction(o.post_state, o.detector);
    o.post_coefficients = coefficients_of(o.post_state);
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace

std::vector<RoundOutcome> alice_round(const StateVector& state, const WCoefficients& c, const GateMode& gate) {
  return run_round(state, alice_photon(c), 0, Station::Alice, gate);
}

std::vector<RoundOutcome> charlie_round(const StateVector& state, const WCoefficients& c, const GateMode& gate) {
  return run_round(state, charlie_photon(c), 2, Station::Charlie, gate);
}

std::string to_string(const Herald& h) {
  if (!h.merged) return cavity::to_string(h.detector);
  return cavity::to_string(h.detector) + "|" + cavity::to_string(cavity::partner_of(h.detector));
}

namespace {

// Round outcomes for every reachable node, with heralded pairs sharing a child.
// Partners lead to identical corrected states, so the node count is
// O(K_alice * K_charlie) whatever the per-detector branch count is.
struct Node {
  Station station;
  int round = 1;
  std::vector<RoundOutcome> outcomes;
  double lost = 0.0;
  std::unique_ptr<Node> success;
  std::unique_ptr<Node> retry;

  const Node* child_for(Classification c) const {
    const bool succeeded = c == Classification::AliceSuccess || c == Classification::CharlieSuccess;
    return succeeded ? success.get() : retry.get();
  }
};

class TreeBuilder {
 public:
  explicit TreeBuilder(const ProtocolConfig& cfg) : cfg_(cfg) {}

  std::unique_ptr<Node> build(Station station, int round, const StateVector& state, const WCoefficients& c) const {
    auto node = std::make_unique<Node>();
    node->station = station;
    node->round = round;
    node->outcomes = station == Station::Alice ? alice_round(state, c, cfg_.gate_mode)
                                               : charlie_round(state, c, cfg_.gate_mode);
    double total = 0.0;
    for (const auto& o : node->outcomes) total += o.probability;
    node->lost = std::max(0.0, 1.0 - total);

    const RoundOutcome* succ = first_of(*node, true);
    const RoundOutcome* fail = first_of(*node, false);
    if (succ && station == Station::Alice) {
      node->success = build(Station::Charlie, 1, succ->post_state, succ->post_coefficients);
    }
    const int limit = station == Station::Alice ? cfg_.max_rounds_alice : cfg_.max_rounds_charlie;
    if (fail && round < limit) {
      node->retry = build(station, round + 1, fail->post_state, fail->post_coefficients);
    }
    return node;
  }

 private:
  static const RoundOutcome* first_of(const Node& node, bool success) {
    const RoundOutcome* found = nullptr;
    for (const auto& o : node.outcomes) {
      const bool s = o.classification == Classification::AliceSuccess ||
                     o.classification == Classification::CharlieSuccess;
      if (s != success) continue;
      if (!found) {
        found = &o;
      } else if (hilbert::fidelity(found->post_state, o.post_state) < 1.0 - 1e-12) {
        throw EcpError(ErrorKind::DomainError, "heralded partners disagree after phase correction");
      }
    }
    return found;
  }

  const ProtocolConfig& cfg_;
};

bool is_lossy(const ProtocolConfig& cfg) { return std::holds_alternative<LossyCavity>(cfg.gate_mode); }

void collect(const Node& node, std::vector<Herald>& path, double prob, bool merge, bool lossy,
             std::vector<Branch>& out) {
  auto emit_or_descend = [&](const RoundOutcome& o, double p, Herald h) {
    path.push_back(h);
    if (const Node* child = node.child_for(o.classification)) {
      collect(*child, path, p, merge, lossy, out);
    } else {
      out.push_back(Branch{path, p, o.classification, o.post_state, 0});
    }
    path.pop_back();
  };

  if (merge) {
    std::map<DetectorLabel, std::pair<const RoundOutcome*, double>> pairs;
    for (const auto& o : node.outcomes) {
      const DetectorLabel lead = std::min(o.detector, cavity::partner_of(o.detector));
      auto& slot = pairs[lead];
      if (!slot.first) slot.first = &o;
      slot.second += o.probability;
    }
    for (const auto& [lead, slot] : pairs) emit_or_descend(*slot.first, prob * slot.second, Herald{lead, true});
  } else {
    for (const auto& o : node.outcomes) emit_or_descend(o, prob * o.probability, Herald{o.detector, false});
  }
  if (lossy) out.push_back(Branch{path, prob * node.lost, Classification::PhotonLost, std::nullopt, 0});
}

double per_detector_leaf_estimate(const ProtocolConfig& cfg) {
  const double ka = std::ldexp(1.0, cfg.max_rounds_alice);
  const double kc = std::ldexp(1.0, cfg.max_rounds_charlie);
  const double leaves = ka + (2.0 * ka - 2.0) * (3.0 * kc - 2.0);
  return is_lossy(cfg) ? 2.0 * leaves : leaves;
}

ProtocolTrace run_tree(const Node& root, const ProtocolConfig& cfg, const ExhaustiveTree& mode, ProtocolTrace trace) {
  if (!mode.merge_heralds && per_detector_leaf_estimate(cfg) > static_cast<double>(kMaxTreeLeaves)) {
    throw EcpError(ErrorKind::ConfigError,
                   "per-detector tree would exceed " + std::to_string(kMaxTreeLeaves) +
                       " leaves; enable merge_heralds or lower the round limits");
  }
  std::vector<Herald> path;
  collect(root, path, 1.0, mode.merge_heralds, is_lossy(cfg), trace.branches);
  for (const auto& b : trace.branches) {
    if (b.classification == Classification::CharlieSuccess) trace.total_success_probability += b.probability;
  }
  return trace;
}

struct SampledLeaf {
  Classification classification;
  const RoundOutcome* last = nullptr;
};

SampledLeaf sample_one(const Node& root, std::mt19937_64& engine, std::vector<Herald>& path) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const Node* node = &root;
  while (true) {
    const double u = uniform(engine);
    double acc = 0.0;
    const RoundOutcome* picked = nullptr;
    for (const auto& o : node->outcomes) {
      acc += o.probability;
      if (u < acc) {
        picked = &o;
        break;
      }
    }
    if (!picked) {
      // Past the last click: photon lost, or rounding at the top of [0, 1).
      if (node->lost > 1e-12 || node->outcomes.empty()) return {Classification::PhotonLost, nullptr};
      picked = &node->outcomes.back();
    }
    path.push_back(Herald{picked->detector, false});
    const Node* child = node->child_for(picked->classification);
    if (!child) return {picked->classification, picked};
    node = child;
  }
}

ProtocolTrace run_monte_carlo(const Node& root, const ProtocolConfig& cfg, const MonteCarlo& mc, ProtocolTrace trace) {
  struct Tally {
    std::map<std::vector<Herald>, std::pair<std::uint64_t, SampledLeaf>> paths;
  };
  const std::uint64_t workers =
      std::clamp<std::uint64_t>(std::thread::hardware_concurrency(), 1, std::max<std::uint64_t>(1, mc.shots / 1024));
  std::vector<Tally> tallies(workers);
  {
    std::vector<std::jthread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::uint64_t begin = mc.shots * w / workers;
        const std::uint64_t end = mc.shots * (w + 1) / workers;
        std::vector<Herald> path;
        for (std::uint64_t shot = begin; shot < end; ++shot) {
          auto engine = shot_engine(cfg.rng_seed, shot);
          path.clear();
          const SampledLeaf leaf = sample_one(root, engine, path);
          auto& slot = tallies[w].paths[path];
          ++slot.first;
          slot.second = leaf;
        }
      });
    }
  }

  std::map<std::vector<Herald>, std::pair<std::uint64_t, SampledLeaf>> merged;
  for (const auto& t : tallies) {
    for (const auto& [path, slot] : t.paths) {
      auto& m = merged[path];
      m.first += slot.first;
      m.second = slot.second;
    }
  }

  trace.shots = mc.shots;
  std::uint64_t successes = 0;
  for (const auto& [path, slot] : merged) {
    const auto& [count, leaf] = slot;
    Branch b{path, static_cast<double>(count) / static_cast<double>(mc.shots), leaf.classification, std::nullopt,
             count};
    if (leaf.last) b.final_state = leaf.last->post_state;
    trace.class_counts[leaf.classification] += count;
    if (leaf.classification == Classification::CharlieSuccess) successes += count;
    trace.branches.push_back(std::move(b));
  }
  trace.total_success_probability = static_cast<double>(successes) / static_cast<double>(mc.shots);
  return trace;
}

}  // namespace

ProtocolTrace run_protocol(const WCoefficients& c, const ProtocolConfig& cfg) {
  c.require_genuine_w();
  cfg.validate();

  const TreeBuilder builder(cfg);
  const auto root = builder.build(Station::Alice, 1, prepare_w_state(c), c);

  ProtocolTrace trace;
  trace.config = cfg;
  trace.initial = c;
  if (const auto* tree = std::get_if<ExhaustiveTree>(&cfg.mode)) return run_tree(*root, cfg, *tree, std::move(trace));

  trace.rng_algorithm = kRngAlgorithm;
  return run_monte_carlo(*root, cfg, std::get<MonteCarlo>(cfg.mode), std::move(trace));
}

}  // namespace ecp::protocol
