#include "metapred/rng.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace metapred::rng {

double normal(Stream& s) {
  static const boost::math::normal_distribution<> dist(0.0, 1.0);
  return boost::math::quantile(dist, s.uniform01());
}

double student_t(Stream& s, double df) {
  const boost::math::students_t_distribution<> dist(df);
  return boost::math::quantile(dist, s.uniform01());
}

double chi_squared(Stream& s, double df) {
  const boost::math::chi_squared_distribution<> dist(df);
  return boost::math::quantile(dist, s.uniform01());
}

int uniform_int(Stream& s, int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const auto span = static_cast<double>(hi - lo) + 1.0;
  const int offset = static_cast<int>(s.uniform01() * span);
  return lo + (offset > hi - lo ? hi - lo : offset);
}

namespace {

// Sequential inverse-CDF search; requires p <= 1/2 so the pmf at zero
// cannot underflow for the table sizes used here (n <= a few hundred).
int binomial_small_p(double u, int n, double p) {
  double pmf = std::pow(1.0 - p, n);
  double cdf = pmf;
  const double ratio = p / (1.0 - p);
  int k = 0;
  while (u > cdf && k < n) {
    pmf *= ratio * static_cast<double>(n - k) / static_cast<double>(k + 1);
    ++k;
    cdf += pmf;
  }
  return k;
}

}  // namespace

int binomial(Stream& s, int n, double p) {
  if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("binomial: bad parameters");
  if (n == 0 || p == 0.0) { s.uniform01(); return 0; }
  if (p == 1.0) { s.uniform01(); return n; }
  const double u = s.uniform01();
  if (p <= 0.5) return binomial_small_p(u, n, p);
  return n - binomial_small_p(u, n, 1.0 - p);
}

}  // namespace metapred::rng
