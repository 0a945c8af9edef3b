#include "ecp/analytics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace ecp::analytics {

namespace {

double sq(double x) { return x * x; }

// prod_{j=1..k} (1 + q^(2^j)) for 0 <= q <= 1.
double ratio_product(double q, int k) {
  double prod = 1.0;
  for (int j = 1; j <= k; ++j) prod *= 1.0 + std::pow(q, std::ldexp(1.0, j));
  return prod;
}

}  // namespace

// a1^(2^k) (a2^(2^k-2) a3^2 + 2 a2^(2^k)) / prod_{j<=k} (a1^(2^j) + a2^(2^j)),
// rescaled by the larger of a1, a2 so every power stays in [0, 1].
double p1_round(int k, const WCoefficients& c) {
  if (k < 1) throw EcpError(ErrorKind::DomainError, "round index starts at 1");
  if (c.a1 == 0.0) return 0.0;
  const double n = std::ldexp(1.0, k);
  const double tail = sq(c.a3) + 2.0 * sq(c.a2);
  if (c.a2 <= c.a1) {
    const double rho = c.a2 / c.a1;
    return std::pow(rho, n - 2.0) * tail / ratio_product(rho, k);
  }
  const double sigma = c.a1 / c.a2;
  return std::pow(sigma, n) * tail / ratio_product(sigma, k);
}

// 3 a2^(2^k) a3^(2^k) / [prod_{j<=k} (a3^(2^j) + a2^(2^j)) (a3^2 + 2 a2^2)]
double p2_round(int k, const WCoefficients& c) {
  if (k < 1) throw EcpError(ErrorKind::DomainError, "round index starts at 1");
  if (c.a2 == 0.0 || c.a3 == 0.0) return 0.0;
  const double hi = std::max(c.a2, c.a3), tau = std::min(c.a2, c.a3) / hi;
  const double n = std::ldexp(1.0, k);
  return 3.0 * std::pow(tau, n) * sq(hi) / ((sq(c.a3) + 2.0 * sq(c.a2)) * ratio_product(tau, k));
}

namespace {

template <typename Term>
double series(Term term, int k_max, double tol) {
  if (k_max < 1) throw EcpError(ErrorKind::DomainError, "k_max must be >= 1");
  double sum = 0.0;
  for (int k = 1; k <= std::min(k_max, kMaxSeriesTerms); ++k) {
    const double t = term(k);
    sum += t;
    if (t < tol) break;
  }
  return sum;
}

}  // namespace

double p1_total(const WCoefficients& c, int k_max, double tol) {
  return series([&](int k) { return p1_round(k, c); }, k_max, tol);
}

double p2_total(const WCoefficients& c, int k_max, double tol) {
  return series([&](int k) { return p2_round(k, c); }, k_max, tol);
}

double pt_one_round(const WCoefficients& c) {
  const double x = sq(c.a1), y = sq(c.a2), z = sq(c.a3);
  const double den = (x + y) * (z + y);
  return den > 0.0 ? 3.0 * x * y * z / den : 0.0;
}

double pt_total(const WCoefficients& c, int k_alice, int k_charlie, double tol) {
  return p1_total(c, k_alice, tol) * p2_total(c, k_charlie, tol);
}

namespace {

double weight(double wanted, double other) {
  const double den = std::sqrt(sq(wanted) + sq(other));
  return den > 0.0 ? wanted / den : 0.0;
}

}  // namespace

double practical_p1(const WCoefficients& c, const cavity::ScatterCoefficients& sc) {
  return p1_round(1, c) * weight(std::abs(sc.t0), std::abs(sc.t));
}

double practical_p2(const WCoefficients& c, const cavity::ScatterCoefficients& sc) {
  return p2_round(1, c) * weight(std::abs(sc.r), std::abs(sc.r0));
}

double practical_total(const WCoefficients& c, const cavity::ScatterCoefficients& sc) {
  const double t0 = std::abs(sc.t0), t = std::abs(sc.t), r0 = std::abs(sc.r0), r = std::abs(sc.r);
  const double den = std::sqrt((sq(t0) + sq(t)) * (sq(r0) + sq(r)));
  return den > 0.0 ? pt_one_round(c) * t0 * r / den : 0.0;
}

double p2_simplified(double alpha1) {
  const double x = sq(alpha1);
  if (!std::isfinite(alpha1) || alpha1 < 0.0 || x > 2.0 / 3.0 + 1e-15) {
    throw EcpError(ErrorKind::DomainError, "alpha1 must lie in [0, sqrt(2/3)]");
  }
  const double num = std::max(0.0, 2.0 / 3.0 - x);
  return num / ((1.0 - x) * (4.0 / 3.0 - x));
}

void SweepSpec::validate() const {
  if (!(alpha2 > 0.0 && alpha2 < 1.0)) throw EcpError(ErrorKind::DomainError, "alpha2 must lie in (0, 1)");
  if (n_points < 1) throw EcpError(ErrorKind::DomainError, "n_points must be >= 1");
  if (!(alpha1_lo > 0.0)) throw EcpError(ErrorKind::DomainError, "alpha1 range must start above 0");
  if (!(alpha1_hi >= alpha1_lo)) throw EcpError(ErrorKind::DomainError, "alpha1 range is reversed");
  if (!(sq(alpha1_hi) + sq(alpha2) < 1.0)) {
    throw EcpError(ErrorKind::DomainError, "alpha1 range must stay below sqrt(1 - alpha2^2) so alpha3 > 0");
  }
  if (cavity) cavity->params.validate();
}

std::vector<CurvePoint> sweep(const SweepSpec& spec) {
  spec.validate();
  std::optional<cavity::ScatterCoefficients> sc;
  if (spec.cavity) {
    sc = cavity::scatter_coefficients(spec.cavity->params, spec.cavity->params.omega0, spec.cavity->convention);
  }

  std::vector<CurvePoint> points(static_cast<std::size_t>(spec.n_points));
  for (int i = 0; i < spec.n_points; ++i) {
    const double a1 = spec.n_points == 1 ? spec.alpha1_lo
                                         : spec.alpha1_lo + (spec.alpha1_hi - spec.alpha1_lo) * i / (spec.n_points - 1);
    const double a3 = std::sqrt(1.0 - sq(a1) - sq(spec.alpha2));
    const WCoefficients c{a1, spec.alpha2, a3};

    CurvePoint& p = points[static_cast<std::size_t>(i)];
    p.alpha1 = a1;
    p.alpha2 = spec.alpha2;
    p.alpha3 = a3;
    p.p1 = p1_round(1, c);
    p.p2 = p2_round(1, c);
    p.p_total = pt_one_round(c);
    p.p1_practical = sc ? practical_p1(c, *sc) : p.p1;
    p.p2_practical = sc ? practical_p2(c, *sc) : p.p2;
    p.p_practical = sc ? practical_total(c, *sc) : p.p_total;
  }
  return points;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  if (std::strtod(buf, nullptr) == v) return buf;
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_csv(std::ostream& out, const std::vector<CurvePoint>& points) {
  out << "alpha1,alpha2,alpha3,p1,p2,p_total,p1_practical,p2_practical,p_practical\n";
  for (const auto& p : points) {
    out << format_number(p.alpha1) << ',' << format_number(p.alpha2) << ',' << format_number(p.alpha3) << ','
        << format_number(p.p1) << ',' << format_number(p.p2) << ',' << format_number(p.p_total) << ','
        << format_number(p.p1_practical) << ',' << format_number(p.p2_practical) << ','
        << format_number(p.p_practical) << '\n';
  }
}

}  // namespace ecp::analytics
