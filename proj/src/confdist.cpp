#include "metapred/confdist.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "metapred/detail/brent.hpp"
#include "metapred/errors.hpp"
#include "metapred/estimators.hpp"

namespace metapred {

namespace {
constexpr double kInversionTol = 1e-9;  // on the u scale; total error stays under 1e-8
}

ConfDist::ConfDist(double q_obs, std::vector<double> sigma2, const AccuracyParams& acc)
    : q_obs_(q_obs), sigma2_(std::move(sigma2)), acc_(acc) {
  if (!(q_obs_ >= 0.0) || !std::isfinite(q_obs_))
    throw std::invalid_argument("ConfDist: q_obs must be finite and >= 0");
  if (sigma2_.size() < 2) throw std::invalid_argument("ConfDist: need K >= 2");

  h0_ = 1.0 - q_cdf(q_obs_, sigma2_, 0.0, acc_).value;

  // Untruncated DL estimate from q_obs and the weights alone.
  double s1 = 0.0, s2 = 0.0;
  for (const double sig2 : sigma2_) {
    const double v = 1.0 / sig2;
    s1 += v;
    s2 += v * v;
  }
  const double k1 = static_cast<double>(sigma2_.size()) - 1.0;
  const double udl = (q_obs_ - k1) / (s1 - s2 / s1);
  bracket_hint_ = std::max(1.0, 4.0 * std::max(0.0, udl));
}

ConfDist ConfDist::from_studies(const StudySet& s, const AccuracyParams& acc) {
  return ConfDist(cochran_q(s), s.sigma2(), acc);
}

double h_eval(const ConfDist& cd, double tau2) {
  if (tau2 < 0.0) throw std::invalid_argument("h_eval: tau2 must be >= 0");
  if (cd.q_obs() == 0.0) return 1.0;
  return 1.0 - q_cdf(cd.q_obs(), cd.sigma2(), tau2, cd.accuracy()).value;
}

double sample_tau2(const ConfDist& cd, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("sample_tau2: u must be in (0,1)");
  if (cd.h0() > u) return 0.0;

  double hi = cd.bracket_hint();
  double f_hi = h_eval(cd, hi) - u;
  int doublings = 0;
  while (f_hi <= 0.0) {
    if (++doublings > 200) {
      std::ostringstream msg;
      msg << "sample_tau2: bracket expansion failed (u=" << u << ", H(" << hi
          << ")=" << f_hi + u << ", q_obs=" << cd.q_obs() << ")";
      throw numeric_error(msg.str());
    }
    hi *= 2.0;
    f_hi = h_eval(cd, hi) - u;
  }

  const double f_lo = cd.h0() - u;  // <= 0 here
  return detail::brent_root([&](double t) { return h_eval(cd, t) - u; }, 0.0, hi,
                            f_lo, f_hi, kInversionTol);
}

std::vector<double> sample_tau2_batch(const ConfDist& cd, rng::Stream& stream,
                                      int count) {
  if (count < 1) throw std::invalid_argument("sample_tau2_batch: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int b = 0; b < count; ++b) {
    auto sub = stream.substream(static_cast<std::uint64_t>(b));
    out[static_cast<std::size_t>(b)] = sample_tau2(cd, sub.uniform01());
  }
  return out;
}

}  // namespace metapred
