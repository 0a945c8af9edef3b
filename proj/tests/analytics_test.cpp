#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ecp/analytics.hpp"

namespace {

using namespace ecp::analytics;
using ecp::EcpError;
using ecp::ErrorKind;

const WCoefficients kSkewed{0.8, 0.36, 0.48};
const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

TEST(ClosedForm, EqualCoefficientsHalveEachRound) {
  const auto c = WCoefficients::equal();
  const double want[] = {0.5, 0.25, 0.125, 0.0625};
  for (int k = 1; k <= 4; ++k) {
    EXPECT_NEAR(p1_round(k, c), want[k - 1], 1e-14);
    EXPECT_NEAR(p2_round(k, c), want[k - 1], 1e-14);
  }
  EXPECT_NEAR(pt_one_round(c), 0.25, 1e-15);
  EXPECT_NEAR(pt_total(c, 64, 64, 0.0), 1.0, 1e-12);
}

TEST(ClosedForm, SkewedReferenceValues) {
  const double p1[] = {0.4071517671517671, 0.07920051666186714, 0.0032422642783267288, 5.451892623819373e-06};
  const double p2[] = {0.5082352941176469, 0.21716879036481057, 0.06246046350062707, 0.00619104869732967};
  for (int k = 1; k <= 4; ++k) {
    EXPECT_NEAR(p1_round(k, kSkewed), p1[k - 1], 1e-14) << k;
    EXPECT_NEAR(p2_round(k, kSkewed), p2[k - 1], 1e-14) << k;
  }
}

TEST(ClosedForm, OneRoundProductIdentity) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto c = WCoefficients::normalized(u(rng), u(rng), u(rng));
    EXPECT_NEAR(pt_one_round(c), p1_round(1, c) * p2_round(1, c), 1e-15);
  }
}

TEST(ClosedForm, DeepRoundsStayFiniteAndNonnegative) {
  const auto c = WCoefficients::normalized(0.9, 0.1, 0.4);
  for (int k = 1; k <= 64; ++k) {
    EXPECT_TRUE(std::isfinite(p1_round(k, c)));
    EXPECT_GE(p1_round(k, c), 0.0);
    EXPECT_GE(p2_round(k, c), 0.0);
  }
  EXPECT_THROW(p1_round(0, c), EcpError);
}

TEST(Series, PartialSumsMonotoneAndBounded) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto c = WCoefficients::normalized(u(rng), u(rng), u(rng));
    double s1 = 0.0, s2 = 0.0;
    for (int k = 1; k <= kMaxSeriesTerms; ++k) {
      const double n1 = s1 + p1_round(k, c), n2 = s2 + p2_round(k, c);
      EXPECT_GE(n1, s1);
      EXPECT_GE(n2, s2);
      s1 = n1;
      s2 = n2;
    }
    EXPECT_LE(s1, 1.0 + 1e-12);
    EXPECT_LE(s2, 1.0 + 1e-12);
    EXPECT_LT(std::abs(p1_total(c) - p1_total(c, kMaxSeriesTerms, 0.0)), 1e-10);
    EXPECT_LT(std::abs(p2_total(c) - p2_total(c, kMaxSeriesTerms, 0.0)), 1e-10);
  }
}

TEST(Simplified, MatchesFirstCharlieRound) {
  for (int i = 0; i <= 1000; ++i) {
    const double a1 = std::sqrt(2.0 / 3.0) * i / 1000.0;
    const double a3 = std::sqrt(std::max(0.0, 1.0 - a1 * a1 - 1.0 / 3.0));
    EXPECT_NEAR(p2_simplified(a1), p2_round(1, {a1, kInvSqrt3, a3}), 1e-14) << a1;
  }
  EXPECT_NEAR(p2_simplified(0.0), 0.5, 1e-15);
  EXPECT_EQ(p2_simplified(std::sqrt(2.0 / 3.0)), 0.0);
  try {
    p2_simplified(0.9);
    FAIL();
  } catch (const EcpError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainError);
  }
}

ecp::cavity::ScatterCoefficients reference(double ks) {
  ecp::cavity::CavityParams p;
  p.kappa_s = ks;
  p.g = 0.5;
  p.gamma = 0.1;
  return ecp::cavity::scatter_coefficients(p, 0.0);
}

TEST(Practical, EqualCoefficientReferenceValues) {
  const auto c = WCoefficients::equal();
  EXPECT_NEAR(practical_total(c, reference(0.1)), 0.1904724097916758, 1e-14);
  EXPECT_NEAR(practical_p1(c, reference(0.1)), 0.38897059010186075, 1e-14);
  EXPECT_NEAR(practical_p2(c, reference(0.1)), 0.48968331960983547, 1e-14);
  EXPECT_NEAR(practical_total(c, reference(0.5)), 0.16468607815914707, 1e-14);
  EXPECT_NEAR(practical_p1(c, reference(0.5)), 0.3841106397986879, 1e-14);
  EXPECT_NEAR(practical_p2(c, reference(0.5)), 0.4287464628562721, 1e-14);
}

TEST(Practical, TotalIsProductOfStations) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (double ks : {0.1, 0.5}) {
    const auto sc = reference(ks);
    for (int i = 0; i < 500; ++i) {
      const auto c = WCoefficients::normalized(u(rng), u(rng), u(rng));
      EXPECT_NEAR(practical_total(c, sc), practical_p1(c, sc) * practical_p2(c, sc), 1e-15);
    }
  }
}

TEST(Practical, IdealCavityChangesNothing) {
  const auto c = kSkewed;
  const auto sc = ecp::cavity::ScatterCoefficients::ideal();
  EXPECT_DOUBLE_EQ(practical_p1(c, sc), p1_round(1, c));
  EXPECT_DOUBLE_EQ(practical_p2(c, sc), p2_round(1, c));
}

TEST(Sweep, IdealCurveLandmarks) {
  SweepSpec spec;
  spec.alpha1_lo = 0.01;
  spec.alpha1_hi = 0.81;
  spec.n_points = 801;
  const auto pts = sweep(spec);
  ASSERT_EQ(pts.size(), 801u);
  const CurvePoint* best1 = &pts[0];
  const CurvePoint* best2 = &pts[0];
  const CurvePoint* best_t = &pts[0];
  for (const auto& p : pts) {
    EXPECT_NEAR(p.alpha1 * p.alpha1 + p.alpha2 * p.alpha2 + p.alpha3 * p.alpha3, 1.0, 1e-12);
    if (p.p1 > best1->p1) best1 = &p;
    if (p.p2 > best2->p2) best2 = &p;
    if (p.p_total > best_t->p_total) best_t = &p;
  }
  EXPECT_NEAR(best1->p1, 0.50929, 1e-4);
  EXPECT_NEAR(best1->alpha1, 0.642, 2e-3);
  EXPECT_NEAR(best2->p2, 0.51472, 1e-4);
  EXPECT_NEAR(best2->alpha1, 0.442, 2e-3);
  EXPECT_NEAR(best_t->p_total, 0.25, 1e-5);
  EXPECT_NEAR(best_t->alpha1, kInvSqrt3, 2e-3);
}

TEST(Sweep, RejectsBadRanges) {
  SweepSpec spec;
  spec.alpha1_hi = 0.9;
  EXPECT_THROW(sweep(spec), EcpError);
  spec = SweepSpec{};
  spec.n_points = 0;
  EXPECT_THROW(sweep(spec), EcpError);
  spec = SweepSpec{};
  spec.alpha1_lo = 0.5;
  spec.alpha1_hi = 0.4;
  EXPECT_THROW(sweep(spec), EcpError);
}

TEST(Csv, HeaderAndRoundTrip) {
  SweepSpec spec;
  spec.n_points = 5;
  const auto pts = sweep(spec);
  std::ostringstream out;
  write_csv(out, pts);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "alpha1,alpha2,alpha3,p1,p2,p_total,p1_practical,p2_practical,p_practical");
  for (const auto& p : pts) {
    ASSERT_TRUE(std::getline(in, line));
    EXPECT_EQ(std::stod(line.substr(0, line.find(','))), p.alpha1);
  }
  EXPECT_FALSE(std::getline(in, line));
}

TEST(FormatNumber, RoundTripsAndStaysShort) {
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(1.0), "1");
  for (double v : {0.1, 1.0 / 3.0, 5.451892623819373e-06, 0.20357588357588355}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

}  // namespace
