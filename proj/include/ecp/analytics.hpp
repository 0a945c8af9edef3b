#pragma once

// Closed-form success probabilities, ideal and with cavity leakage.

#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "ecp/cavity.hpp"
#include "ecp/protocol.hpp"

namespace ecp::analytics {

using protocol::WCoefficients;

/// Series are cut once a term drops below this, or after kMaxSeriesTerms terms.
inline constexpr double kSeriesTolerance = 1e-12;
inline constexpr int kMaxSeriesTerms = 64;

/// Alice succeeds exactly at round k (k-1 failures first).
double p1_round(int k, const WCoefficients& c);
double p1_total(const WCoefficients& c, int k_max = kMaxSeriesTerms, double tol = kSeriesTolerance);

/// Charlie succeeds exactly at round k, given Alice already succeeded.
double p2_round(int k, const WCoefficients& c);
double p2_total(const WCoefficients& c, int k_max = kMaxSeriesTerms, double tol = kSeriesTolerance);

/// Both parties get a single attempt.
double pt_one_round(const WCoefficients& c);
/// p1_total * p2_total.
double pt_total(const WCoefficients& c, int k_alice, int k_charlie, double tol = kSeriesTolerance);

double practical_p1(const WCoefficients& c, const cavity::ScatterCoefficients& sc);
double practical_p2(const WCoefficients& c, const cavity::ScatterCoefficients& sc);
double practical_total(const WCoefficients& c, const cavity::ScatterCoefficients& sc);

/// Charlie's single-round probability with a2 = 1/sqrt3 as a function of a1.
double p2_simplified(double alpha1);

struct CavitySetting {
  cavity::CavityParams params;
  cavity::DenominatorConvention convention = cavity::DenominatorConvention::Verbatim;
};

struct SweepSpec {
  double alpha2 = 0.57735026918962576;  // 1/sqrt3
  double alpha1_lo = 0.01;
  double alpha1_hi = 0.81;
  int n_points = 200;
  std::optional<CavitySetting> cavity;

  void validate() const;
};

struct CurvePoint {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double p_total = 0.0;
  double p1_practical = 0.0;
  double p2_practical = 0.0;
  double p_practical = 0.0;
};

std::vector<CurvePoint> sweep(const SweepSpec& spec);

/// Header line plus one row per point.
void write_csv(std::ostream& out, const std::vector<CurvePoint>& points);

/// At least 12 significant digits, and always enough to round-trip.
std::string format_number(double v);

}  // namespace ecp::analytics
