// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ecp/analytics.hpp"
#include "ecp/cavity.hpp"
#include "ecp/cli.hpp"
#include "ecp/oracle.hpp"
#include "ecp/protocol.hpp"

namespace {

using namespace ecp;
using protocol::WCoefficients;

const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void criterion(const char* id, const char* title, double budget_s, const std::function<Check()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs >= budget_s) c.require(false, "runtime " + fmt("%.3f", secs) + " s over budget");
  if (!c.ok) ++failures;
  std::printf("%s %s  %s  [%.3f s%s]%s%s\n", c.ok ? "PASS" : "FAIL", id, title, secs,
              budget_s > 0 ? (" < " + fmt("%g", budget_s) + " s").c_str() : "", c.detail.empty() ? "" : "  ",
              c.detail.c_str());
}

analytics::SweepSpec lossy_sweep(double ks) {
  analytics::SweepSpec spec;
  analytics::CavitySetting cav;
  cav.params.kappa_s = ks;
  cav.params.g = 0.5;
  cav.params.gamma = 0.1;
  cav.convention = cavity::DenominatorConvention::Verbatim;
  spec.cavity = cav;
  return spec;
}

Check ideal_peak() {
  Check c;
  const auto eq = WCoefficients::equal();
  const double analytic = analytics::pt_one_round(eq);
  c.require(std::abs(analytic - 0.25) <= 1e-12, "analytic " + fmt("%.17g", analytic));
  const double tree = protocol::run_protocol(eq, {}).total_success_probability;
  c.require(std::abs(tree - 0.25) <= 1e-12, "tree " + fmt("%.17g", tree));
  protocol::ProtocolConfig cfg;
  cfg.mode = protocol::MonteCarlo{1000000};
  cfg.rng_seed = 20240601;
  const double mc = protocol::run_protocol(eq, cfg).total_success_probability;
  c.require(std::abs(mc - 0.25) <= 0.002, "mc " + fmt("%.6f", mc));
  c.detail = c.ok ? "analytic=" + fmt("%.15g", analytic) + " tree=" + fmt("%.15g", tree) + " mc(1e6)=" +
                        fmt("%.5f", mc)
                  : c.detail;
  return c;
}

Check lossy_peak_weak() {
  Check c;
  const auto spec = lossy_sweep(0.1);
  const auto pts = analytics::sweep(spec);
  const analytics::CurvePoint* best = &pts[0];
  for (const auto& p : pts) {
    if (p.p_practical > best->p_practical) best = &p;
  }
  const double step = (spec.alpha1_hi - spec.alpha1_lo) / (spec.n_points - 1);
  c.require(best->p_practical >= 0.16 && best->p_practical <= 0.20, "max " + fmt("%.6f", best->p_practical));
  c.require(std::abs(best->alpha1 - kInvSqrt3) <= step, "argmax alpha1 " + fmt("%.6f", best->alpha1));
  if (c.ok) c.detail = "max P'=" + fmt("%.6f", best->p_practical) + " at alpha1=" + fmt("%.6f", best->alpha1);
  return c;
}

Check lossy_triple_strong() {
  Check c;
  const auto pts = analytics::sweep(lossy_sweep(0.5));
  double max_p1 = 0.0, max_pt = 0.0, plateau_lo = 1.0, plateau_hi = 0.0;
  for (const auto& p : pts) {
    max_p1 = std::max(max_p1, p.p1_practical);
    max_pt = std::max(max_pt, p.p_practical);
    if (p.alpha1 <= 0.2) {
      plateau_lo = std::min(plateau_lo, p.p2_practical);
      plateau_hi = std::max(plateau_hi, p.p2_practical);
    }
  }
  c.require(max_p1 >= 0.37 && max_p1 <= 0.41, "max P1' " + fmt("%.6f", max_p1));
  c.require(plateau_lo >= 0.41 && plateau_hi <= 0.45, "P2' plateau " + fmt("%.6f", plateau_lo));
  c.require(max_pt >= 0.15 && max_pt <= 0.18, "max P' " + fmt("%.6f", max_pt));
  if (c.ok) {
    c.detail = "max P1'=" + fmt("%.5f", max_p1) + " P2'(alpha1<=0.2) in [" + fmt("%.5f", plateau_lo) + ", " +
               fmt("%.5f", plateau_hi) + "] max P'=" + fmt("%.5f", max_pt);
  }
  return c;
}

Check plateau_shape() {
  Check c;
  const double edge = std::sqrt(2.0 / 3.0);
  auto p2_at = [](double a1) {
    const double a3 = std::sqrt(std::max(0.0, 1.0 - a1 * a1 - 1.0 / 3.0));
    return analytics::p2_round(1, {a1, kInvSqrt3, a3});
  };
  double worst = 0.0;
  const int n = 2000;
  for (int i = 1; i < n; ++i) {
    const double a1 = 0.6 * i / n;
    worst = std::max(worst, std::abs(p2_at(a1) - 0.5) / 0.5);
  }
  c.require(worst <= 0.05, "deviation " + fmt("%.4f", worst));
  double prev = p2_at(0.6);
  for (int i = 1; i < n; ++i) {
    const double v = p2_at(0.6 + (edge - 0.6) * i / n);
    c.require(v < prev, "not decreasing near " + fmt("%.4f", 0.6 + (edge - 0.6) * i / n));
    prev = v;
  }
  if (c.ok) c.detail = "max relative deviation from 0.5 on (0, 0.6) = " + fmt("%.4f", worst);
  return c;
}

Check oracle_equivalence() {
  Check c;
  std::ostringstream out, err;
  cli::Environment env;
  const int code = cli::run({"verify", "--grid", "20", "--depth", "4,4", "--tol", "1e-10"}, out, err, env);
  const std::string text = out.str();
  const auto tail = text.substr(text.rfind('\n', text.size() - 2) + 1);
  c.require(code == 0, "verify exit " + std::to_string(code) + " " + tail + err.str());
  c.require(oracle::simplex_grid(20).size() >= 100, "grid too small");
  if (c.ok) c.detail = std::to_string(oracle::simplex_grid(20).size()) + " points, " + tail.substr(0, tail.size() - 1);
  return c;
}

Check state_fidelities() {
  Check c;
  const auto equal = protocol::prepare_w_state(WCoefficients::equal());
  double worst_d5 = 1.0, worst_pattern = 0.0;
  std::size_t d5_leaves = 0;
  for (const auto& w : oracle::simplex_grid(12)) {
    oracle::visit(oracle::enumerate_tree(w, 3, 3), [&](const oracle::BranchNode& n) {
      if (!n.path.empty() && n.path.back() == cavity::DetectorLabel::D5) {
        ++d5_leaves;
        worst_d5 = std::min(worst_d5, hilbert::fidelity(n.state, equal));
      }
    });
    const auto outs = protocol::alice_round(protocol::prepare_w_state(w), w, protocol::IdealGate{});
    for (const auto& o : outs) {
      WCoefficients want;
      if (o.detector == cavity::DetectorLabel::D3) {
        want = WCoefficients::normalized(w.a2, w.a2, w.a3);
      } else if (o.detector == cavity::DetectorLabel::D1) {
        want = WCoefficients::normalized(w.a1 * w.a1, w.a2 * w.a2, w.a2 * w.a3);
      } else {
        continue;
      }
      const auto got = protocol::coefficients_of(o.post_state);
      worst_pattern = std::max({worst_pattern, std::abs(got.a1 - want.a1), std::abs(got.a2 - want.a2),
                                std::abs(got.a3 - want.a3)});
    }
  }
  c.require(worst_d5 >= 1.0 - 1e-12, "D5 fidelity " + fmt("%.17g", worst_d5));
  c.require(worst_pattern <= 1e-12, "D1/D3 pattern error " + fmt("%.3e", worst_pattern));
  if (c.ok) {
    c.detail = std::to_string(d5_leaves) + " D5 leaves, min fidelity " + fmt("%.16f", worst_d5) +
               "; D1/D3 coefficient error " + fmt("%.2e", worst_pattern);
  }
  return c;
}

hilbert::StateVector random_photon_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  hilbert::StateVector s;
  for (const char* spins : {"U", "D"}) {
    for (auto p : {hilbert::Polarization::R, hilbert::Polarization::L}) {
      for (auto d : {hilbert::Direction::PlusZ, hilbert::Direction::MinusZ}) {
        s.add(hilbert::photon_ket(p, d, spins), {g(rng), g(rng)});
      }
    }
  }
  return hilbert::normalize(s);
}

Check gate_invariants() {
  Check c;
  std::set<hilbert::BasisKet> images;
  for (auto p : {hilbert::Polarization::R, hilbert::Polarization::L}) {
    for (auto d : {hilbert::Direction::PlusZ, hilbert::Direction::MinusZ}) {
      for (const char* s : {"U", "D"}) {
        const auto ket = hilbert::photon_ket(p, d, s);
        const auto once = cavity::ideal_interaction(ket, 0);
        const auto twice = cavity::ideal_interaction(once.ket, 0);
        images.insert(once.ket);
        c.require(std::abs(once.sign) == 1, "sign not +-1");
        c.require(twice.ket == ket, "not an involution on " + hilbert::to_string(ket));
      }
    }
  }
  c.require(images.size() == 8, "map is not a bijection");
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_photon_state(rng), b = random_photon_state(rng);
    worst = std::max(worst, std::abs(hilbert::inner_product(cavity::hwp45(a), cavity::hwp45(b)) -
                                     hilbert::inner_product(a, b)));
    c.require(std::abs(cavity::apply_ebs_gate(a, 0).norm_squared() - 1.0) <= 1e-12, "gate changed the norm");
  }
  c.require(worst <= 1e-12, "hwp inner product error " + fmt("%.3e", worst));
  if (c.ok) c.detail = "8 images distinct, double application = identity, hwp error " + fmt("%.2e", worst);
  return c;
}

Check algebraic_identities() {
  Check c;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 3.0), w(-2.0, 2.0);
  double worst_rt = 0.0;
  for (int i = 0; i < 1000; ++i) {
    cavity::CavityParams p;
    p.kappa_s = u(rng);
    p.gamma = 0.01 + u(rng);
    p.g = u(rng);
    p.omega_c = w(rng);
    p.omega_x = w(rng);
    const auto sc = cavity::scatter_coefficients(p, w(rng));
    worst_rt = std::max({worst_rt, std::abs(sc.r - sc.t - 1.0), std::abs(sc.r0 - sc.t0 - 1.0)});
  }
  c.require(worst_rt <= 1e-12, "r - t error " + fmt("%.3e", worst_rt));

  double worst_prod = 0.0;
  for (double ks : {0.1, 0.5}) {
    cavity::CavityParams p;
    p.kappa_s = ks;
    p.g = 0.5;
    p.gamma = 0.1;
    const auto sc = cavity::scatter_coefficients(p, 0.0);
    for (const auto& coeffs : oracle::simplex_grid(20)) {
      worst_prod = std::max(worst_prod, std::abs(analytics::practical_total(coeffs, sc) -
                                                 analytics::practical_p1(coeffs, sc) *
                                                     analytics::practical_p2(coeffs, sc)));
    }
  }
  c.require(worst_prod <= 1e-15, "P' product error " + fmt("%.3e", worst_prod));

  double worst_simpl = 0.0;
  const int n = 2000;
  for (int i = 0; i <= n; ++i) {
    const double a1 = std::sqrt(2.0 / 3.0) * i / n;
    const double a3 = std::sqrt(std::max(0.0, 1.0 - a1 * a1 - 1.0 / 3.0));
    worst_simpl = std::max(worst_simpl, std::abs(analytics::p2_simplified(a1) -
                                                 analytics::p2_round(1, {a1, kInvSqrt3, a3})));
  }
  c.require(worst_simpl <= 1e-14, "simplified form error " + fmt("%.3e", worst_simpl));
  if (c.ok) {
    c.detail = "r-t " + fmt("%.1e", worst_rt) + ", P'=P1'P2' " + fmt("%.1e", worst_prod) + ", simplified P2 " +
               fmt("%.1e", worst_simpl);
  }
  return c;
}

Check series_convergence() {
  Check c;
  double worst_trunc = 0.0;
  for (const auto& w : oracle::simplex_grid(30)) {
    double s1 = 0.0, s2 = 0.0;
    for (int k = 1; k <= analytics::kMaxSeriesTerms; ++k) {
      const double t1 = analytics::p1_round(k, w), t2 = analytics::p2_round(k, w);
      c.require(t1 >= 0.0 && t2 >= 0.0, "negative term");
      s1 += t1;
      s2 += t2;
      c.require(s1 <= 1.0 + 1e-12 && s2 <= 1.0 + 1e-12, "partial sum above 1");
    }
    worst_trunc = std::max({worst_trunc, std::abs(analytics::p1_total(w) - s1), std::abs(analytics::p2_total(w) - s2)});
  }
  c.require(worst_trunc < 1e-10, "truncation changed totals by " + fmt("%.3e", worst_trunc));
  if (c.ok) c.detail = "465 grid points, truncation change " + fmt("%.2e", worst_trunc);
  return c;
}

}  // namespace

int main() {
  criterion("AC1", "ideal peak 0.25 (analytic 1e-12, MC 1e6 shots +-0.002)", 5.0, ideal_peak);
  criterion("AC2", "lossy peak ks=0.1: max P' in [0.16, 0.20] at 1/sqrt3 +- one step", 1.0, lossy_peak_weak);
  criterion("AC3", "lossy ks=0.5: P1' in [0.37, 0.41], P2' in [0.41, 0.45], P' in [0.15, 0.18]", 1.0,
            lossy_triple_strong);
  criterion("AC4", "P2 plateau within 5% of 0.5 on (0, 0.6), decreasing to sqrt(2/3)", 0.0, plateau_shape);
  criterion("AC5", "oracle equivalence, grid 20, depth 4,4, tol 1e-10", 30.0, oracle_equivalence);
  criterion("AC6", "D5 fidelity >= 1-1e-12, D1/D3 patterns to 1e-12", 0.0, state_fidelities);
  criterion("AC7", "gate is a signed involutive permutation, hwp inner products to 1e-12", 0.0, gate_invariants);
  criterion("AC8", "r-t=1, r0-t0=1 (1000 draws), P'=P1'P2' to 1e-15, simplified P2 to 1e-14", 0.0,
            algebraic_identities);
  criterion("AC9", "series monotone, bounded by 1, truncation < 1e-10", 0.0, series_convergence);
  std::printf("%d/9 criteria passed\n", 9 - failures);
  return failures;
}
