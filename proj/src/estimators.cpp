#include "metapred/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "metapred/errors.hpp"

namespace metapred {

namespace {

double weighted_mean(const std::vector<double>& y, const std::vector<double>& w) {
  double sw = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sw += w[i];
    swy += w[i] * y[i];
  }
  return swy / sw;
}

std::vector<double> weights_at(const std::vector<double>& sigma2, double tau2) {
  std::vector<double> w(sigma2.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / (sigma2[i] + tau2);
  return w;
}

}  // namespace

double cochran_q(const StudySet& s) {
  const auto v = weights_at(s.sigma2(), 0.0);
  const double ybar = weighted_mean(s.y(), v);
  double q = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = s.y()[i] - ybar;
    q += v[i] * d * d;
  }
  return q;
}

double tau2_udl(const StudySet& s) {
  const std::size_t k = s.size();
  double s1 = 0.0, s2 = 0.0;
  for (const double sig2 : s.sigma2()) {
    const double v = 1.0 / sig2;
    s1 += v;
    s2 += v * v;
  }
  const double denom = s1 - s2 / s1;
  if (!(denom > 0.0))
    throw data_error("tau2_udl: degenerate weight structure (K < 2?)");
  return (cochran_q(s) - static_cast<double>(k - 1)) / denom;
}

double tau2_dl(const StudySet& s) { return std::max(0.0, tau2_udl(s)); }

RemlResult tau2_reml(const StudySet& s, const RemlOptions& opt) {
  const auto& y = s.y();
  const auto& sig2 = s.sigma2();

  const auto update = [&](double t2) {
    const auto w = weights_at(sig2, t2);
    const double mu = weighted_mean(y, w);
    double sw = 0.0;
    for (const double wi : w) sw += wi;
    const double se2 = 1.0 / sw;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double d = y[i] - mu;
      num += w[i] * w[i] * (d * d + se2 - sig2[i]);
      den += w[i] * w[i];
    }
    return std::max(0.0, num / den);
  };

  double t2 = std::max(0.0, tau2_udl(s));
  int it = 0;
  bool converged = false;
  while (it < opt.max_iter) {
    const double next = update(t2);
    ++it;
    if (std::abs(next - t2) <= opt.tol) {
      t2 = next;
      converged = true;
      break;
    }
    t2 = next;
  }
  return {t2, it, converged};
}

PooledMean pooled_mean(const StudySet& s, double tau2) {
  const auto w = weights_at(s.sigma2(), tau2);
  double sw = 0.0;
  for (const double wi : w) sw += wi;
  return {weighted_mean(s.y(), w), std::sqrt(1.0 / sw)};
}

double se_hartung(const StudySet& s, double tau2, double mu_hat) {
  const std::size_t k = s.size();
  const auto w = weights_at(s.sigma2(), tau2);
  double sw = 0.0;
  for (const double wi : w) sw += wi;
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = s.y()[i] - mu_hat;
    acc += (w[i] / sw) * d * d;
  }
  return std::sqrt(acc / static_cast<double>(k - 1));
}

double se_hk(const StudySet& s, double tau2_reml) {
  const auto w = weights_at(s.sigma2(), tau2_reml);
  const double mu = weighted_mean(s.y(), w);
  return se_hartung(s, tau2_reml, mu);
}

double se_sj(const StudySet& s, double tau2_reml) {
  const std::size_t k = s.size();
  const auto& y = s.y();
  const auto& sig2 = s.sigma2();
  const auto w = weights_at(sig2, tau2_reml);
  const double mu = weighted_mean(y, w);

  double sw = 0.0, sw2 = 0.0, sw2v = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sw += w[i];
    sw2 += w[i] * w[i];
    sw2v += w[i] * w[i] * (sig2[i] + tau2_reml);
  }

  double num = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double h = 2.0 * w[i] / sw - sw2v / ((sig2[i] + tau2_reml) * sw2);
    const double lev = 1.0 - h;
    if (!(lev > 0.0)) {
      const std::string label = s.labels().empty() ? "study " + std::to_string(i + 1)
                                                   : "study '" + s.labels()[i] + "'";
      throw method_error("se_sj: degenerate leverage (1 - h <= 0) for " + label);
    }
    const double d = y[i] - mu;
    num += w[i] * w[i] * d * d / lev;
  }
  return std::sqrt(num) / sw;
}

double i_squared(double q, std::size_t k) {
  if (q <= 0.0) return 0.0;
  return std::max(0.0, (q - static_cast<double>(k - 1)) / q) * 100.0;
}

double q_test_pvalue(double q, std::size_t k) {
  if (q <= 0.0) return 1.0;
  const boost::math::chi_squared_distribution<> dist(static_cast<double>(k - 1));
  return boost::math::cdf(boost::math::complement(dist, q));
}

HeterogeneityFit fit_heterogeneity(const StudySet& s, const RemlOptions& opt) {
  HeterogeneityFit f{};
  f.q = cochran_q(s);
  f.tau2_udl = tau2_udl(s);
  f.tau2_dl = std::max(0.0, f.tau2_udl);

  const RemlResult r = tau2_reml(s, opt);
  f.tau2_reml = r.tau2;
  f.reml_iterations = r.iterations;
  f.reml_converged = r.converged;

  const PooledMean dl = pooled_mean(s, f.tau2_dl);
  f.mu_hat = dl.mu;
  f.se_mu = dl.se;
  const PooledMean reml = pooled_mean(s, f.tau2_reml);
  f.mu_reml = reml.mu;
  f.se_mu_reml = reml.se;

  f.se_hartung = se_hartung(s, f.tau2_dl, f.mu_hat);
  f.se_hk = se_hk(s, f.tau2_reml);
  try {
    f.se_sj = se_sj(s, f.tau2_reml);
    f.se_sj_valid = true;
  } catch (const method_error&) {
    f.se_sj = std::numeric_limits<double>::quiet_NaN();
    f.se_sj_valid = false;
  }

  f.i2 = i_squared(f.q, s.size());
  f.p_het = q_test_pvalue(f.q, s.size());
  return f;
}

}  // namespace metapred
