#include "ecp/serialization.hpp"

namespace ecp {

Json to_json(const hilbert::StateVector& s) {
  Json terms = Json::array();
  for (const auto& [ket, amp] : s) {
    Json photon = nullptr;
    if (ket.photon) {
      photon = {{"polarization", hilbert::to_string(ket.photon->polarization)},
                {"direction", hilbert::to_string(ket.photon->direction)}};
    }
    terms.push_back({{"photon", photon}, {"spins", hilbert::spins_to_string(ket.spins)}, {"re", amp.real()},
                     {"im", amp.imag()}});
  }
  return terms;
}

Json to_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

Json to_json(const cavity::ScatterCoefficients& sc) {
  return {{"t", to_json(sc.t)}, {"r", to_json(sc.r)}, {"t0", to_json(sc.t0)}, {"r0", to_json(sc.r0)}};
}

Json to_json(const cavity::CavityParams& p) {
  return {{"kappa", p.kappa},   {"kappa_s", p.kappa_s}, {"gamma", p.gamma},    {"g", p.g},
          {"omega0", p.omega0}, {"omega_c", p.omega_c}, {"omega_x", p.omega_x}};
}

Json to_json(const protocol::WCoefficients& c) { return Json::array({c.a1, c.a2, c.a3}); }

Json to_json(const protocol::ProtocolConfig& cfg) {
  Json j = {{"max_rounds_alice", cfg.max_rounds_alice},
            {"max_rounds_charlie", cfg.max_rounds_charlie},
            {"rng_seed", cfg.rng_seed}};
  if (const auto* lossy = std::get_if<protocol::LossyCavity>(&cfg.gate_mode)) {
    Json cav = to_json(lossy->params);
    cav["convention"] = cavity::to_string(lossy->convention);
    if (lossy->omega) cav["omega"] = *lossy->omega;
    j["gate_mode"] = "lossy";
    j["cavity"] = cav;
  } else {
    j["gate_mode"] = "ideal";
  }
  if (const auto* mc = std::get_if<protocol::MonteCarlo>(&cfg.mode)) {
    j["mode"] = "mc";
    j["n_shots"] = mc->shots;
  } else {
    j["mode"] = "tree";
    j["merge_heralds"] = std::get<protocol::ExhaustiveTree>(cfg.mode).merge_heralds;
  }
  return j;
}

Json to_json(const protocol::ProtocolTrace& trace) {
  Json branches = Json::array();
  for (const auto& b : trace.branches) {
    Json path = Json::array();
    for (const auto& h : b.path) path.push_back(protocol::to_string(h));
    Json entry = {{"path", path}, {"probability", b.probability},
                  {"classification", protocol::to_string(b.classification)}};
    if (b.final_state) entry["state"] = to_json(*b.final_state);
    if (trace.shots > 0) entry["count"] = b.count;
    branches.push_back(std::move(entry));
  }
  Json j = {{"config", to_json(trace.config)},
            {"alpha", to_json(trace.initial)},
            {"branches", branches},
            {"total_success_probability", trace.total_success_probability}};
  if (trace.shots > 0) {
    Json counts = Json::object();
    for (const auto& [cls, n] : trace.class_counts) counts[protocol::to_string(cls)] = n;
    j["shots"] = trace.shots;
    j["class_counts"] = counts;
    j["rng_algorithm"] = trace.rng_algorithm;
  }
  return j;
}

Json to_json(const analytics::CurvePoint& p) {
  return {{"alpha1", p.alpha1},           {"alpha2", p.alpha2},
          {"alpha3", p.alpha3},           {"p1", p.p1},
          {"p2", p.p2},                   {"p_total", p.p_total},
          {"p1_practical", p.p1_practical}, {"p2_practical", p.p2_practical},
          {"p_practical", p.p_practical}};
}

Json to_json(const std::vector<analytics::CurvePoint>& points) {
  Json out = Json::array();
  for (const auto& p : points) out.push_back(to_json(p));
  return out;
}

Json to_json(const std::vector<oracle::ComparisonReport>& reports) {
  Json out = Json::array();
  for (const auto& r : reports) {
    out.push_back({{"quantity", r.quantity},
                   {"alpha", to_json(r.coefficients)},
                   {"analytic", r.analytic},
                   {"simulated", r.simulated},
                   {"abs_error", r.abs_error},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}});
  }
  return out;
}

}  // namespace ecp
