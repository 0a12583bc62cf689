#include "metapred/predint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "metapred/confdist.hpp"
#include "metapred/detail/parallel.hpp"
#include "metapred/errors.hpp"
#include "metapred/estimators.hpp"

namespace metapred {

const char* method_name(Method m) {
  switch (m) {
    case Method::hts: return "HTS";
    case Method::hts_hk: return "HTS-HK";
    case Method::hts_sj: return "HTS-SJ";
    case Method::proposed: return "Proposed";
  }
  return "?";
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must be in (0, 1]");
}

// Type-7 empirical quantile (linear interpolation between order stats).
double quantile_type7(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  const double h = static_cast<double>(n - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

Interval ci_mean_dl(const StudySet& s, double alpha) {
  check_alpha(alpha);
  const PooledMean pm = pooled_mean(s, tau2_dl(s));
  const boost::math::normal_distribution<> norm;
  const double zq = boost::math::quantile(norm, 1.0 - alpha / 2.0);
  return {pm.mu - zq * pm.se, pm.mu + zq * pm.se};
}

PredictionResult pi_hts(const StudySet& s, double alpha) {
  check_alpha(alpha);
  if (s.size() < 3) throw method_error("pi_hts: needs K >= 3 (t with K-2 df)");

  const double t2 = tau2_dl(s);
  const PooledMean pm = pooled_mean(s, t2);
  const boost::math::students_t_distribution<> tdist(static_cast<double>(s.size()) - 2.0);
  const double tq = boost::math::quantile(tdist, 1.0 - alpha / 2.0);
  const double half = tq * std::sqrt(t2 + pm.se * pm.se);

  PredictionResult r{};
  r.method = Method::hts;
  r.alpha = alpha;
  r.lower = pm.mu - half;
  r.upper = pm.mu + half;
  r.width = r.upper - r.lower;
  r.center = pm.mu;
  r.tau2_used = t2;
  return r;
}

PredictionResult pi_hts_reml(const StudySet& s, double alpha, SeVariant variant) {
  check_alpha(alpha);
  if (s.size() < 3) throw method_error("pi_hts_reml: needs K >= 3 (t with K-2 df)");

  const double t2 = tau2_reml(s).tau2;
  const PooledMean pm = pooled_mean(s, t2);
  const double se = variant == SeVariant::hk ? se_hk(s, t2) : se_sj(s, t2);
  const boost::math::students_t_distribution<> tdist(static_cast<double>(s.size()) - 2.0);
  const double tq = boost::math::quantile(tdist, 1.0 - alpha / 2.0);
  const double half = tq * std::sqrt(t2 + se * se);

  PredictionResult r{};
  r.method = variant == SeVariant::hk ? Method::hts_hk : Method::hts_sj;
  r.alpha = alpha;
  r.lower = pm.mu - half;
  r.upper = pm.mu + half;
  r.width = r.upper - r.lower;
  r.center = pm.mu;
  r.tau2_used = t2;
  return r;
}

PredictionResult pi_bootstrap(const StudySet& s, double alpha,
                              const BootstrapOptions& opt, rng::Stream stream) {
  check_alpha(alpha);
  if (opt.b < 100)
    throw std::invalid_argument("pi_bootstrap: B must be >= 100");

  const std::size_t k = s.size();
  const auto& y = s.y();
  const auto& sig2 = s.sigma2();
  const double df = static_cast<double>(k) - 1.0;

  const ConfDist cd = ConfDist::from_studies(s, opt.acc);

  const std::size_t n = static_cast<std::size_t>(opt.b);
  std::vector<double> theta(n);
  std::vector<unsigned char> truncated(n, 0);

  detail::parallel_for(n, opt.threads, [&](std::size_t bi) {
    auto sub = stream.substream(static_cast<std::uint64_t>(bi));
    auto u_stream = sub.substream(0);
    auto z_stream = sub.substream(1);
    auto t_stream = sub.substream(2);

    const double tau2_b = sample_tau2(cd, u_stream.uniform01());
    const double z_b = rng::normal(z_stream);
    const double t_b = rng::student_t(t_stream, df);
    truncated[bi] = tau2_b == 0.0 ? 1 : 0;

    double sw = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double w = 1.0 / (sig2[i] + tau2_b);
      sw += w;
      swy += w * y[i];
    }
    const double mu_b = swy / sw;
    double se2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double w = 1.0 / (sig2[i] + tau2_b);
      const double d = y[i] - mu_b;
      se2 += (w / sw) * d * d;
    }
    const double se_b = std::sqrt(se2 / df);

    theta[bi] = mu_b + z_b * std::sqrt(tau2_b) - t_b * se_b;
  });

  std::sort(theta.begin(), theta.end());
  std::size_t zero_count = 0;
  for (const unsigned char f : truncated) zero_count += f;

  PredictionResult r{};
  r.method = Method::proposed;
  r.alpha = alpha;
  r.lower = quantile_type7(theta, alpha / 2.0);
  r.upper = quantile_type7(theta, 1.0 - alpha / 2.0);
  r.width = r.upper - r.lower;
  r.center = pooled_mean(s, tau2_dl(s)).mu;  // DL center, for reporting
  r.tau2_used = tau2_dl(s);
  r.b = opt.b;
  r.zero_fraction = static_cast<double>(zero_count) / static_cast<double>(n);
  return r;
}

}  // namespace metapred
