#include "metapred/qdist.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "metapred/errors.hpp"

namespace metapred {

EigenSpectrum eigen_spectrum(const std::vector<double>& sigma2, double tau2) {
  const std::size_t k = sigma2.size();
  if (k < 2) throw std::invalid_argument("eigen_spectrum: need K >= 2");
  if (tau2 < 0.0) throw std::invalid_argument("eigen_spectrum: tau2 must be >= 0");
  for (const double s2 : sigma2)
    if (!(s2 > 0.0) || !std::isfinite(s2))
      throw std::invalid_argument("eigen_spectrum: sigma2 must be finite and > 0");

  Eigen::VectorXd v(k), sd(k);
  double v_plus = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    v[i] = 1.0 / sigma2[i];
    sd[i] = std::sqrt(sigma2[i] + tau2);
    v_plus += v[i];
  }

  // S_ij = sd_i (V - v v^T / v_+)_ij sd_j
  Eigen::MatrixXd s(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double a = (i == j ? v[i] : 0.0) - v[i] * v[j] / v_plus;
      s(i, j) = sd[i] * a * sd[j];
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw numeric_error("eigen_spectrum: eigendecomposition failed");

  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  const double lam_max = ev[static_cast<Eigen::Index>(k) - 1];
  const double threshold = 1e-10 * lam_max;

  EigenSpectrum out;
  out.trace = ev.sum();
  std::size_t dropped = 0;
  for (Eigen::Index i = static_cast<Eigen::Index>(k) - 1; i >= 0; --i) {
    if (ev[i] < threshold)
      ++dropped;
    else
      out.lambdas.push_back(ev[i]);
  }
  if (dropped != 1)
    throw numeric_error("eigen_spectrum: expected exactly one near-zero eigenvalue, found " +
                        std::to_string(dropped) + " (numerically degenerate input)");
  out.rank = out.lambdas.size();
  return out;
}

// Ruben's expansion: P(Q <= q) = A0 * sum_m a_m P(chi2(K + 2m) <= q/beta),
// a_0 = 1, with beta the harmonic mean of the extreme eigenvalues. The
// chi-square CDF/density pair is carried by the two-term recursion
// F_{k+2}(z) = F_k(z) - 2 f_{k+2}(z), f_{k+2}(z) = f_k(z) * z / k,
// kept in log space while the density is below exp(tol).
WchisqCdf wchisq_cdf(const std::vector<double>& lambdas, double q,
                     const AccuracyParams& acc) {
  const std::size_t n = lambdas.size();
  if (n == 0) throw std::invalid_argument("wchisq_cdf: empty spectrum");
  for (const double lam : lambdas)
    if (!(lam > 0.0) || !std::isfinite(lam))
      throw std::invalid_argument("wchisq_cdf: lambdas must be finite and > 0");
  if (!std::isfinite(q)) throw std::invalid_argument("wchisq_cdf: q must be finite");
  if (!(acc.eps > 0.0) || acc.max_terms < 1)
    throw std::invalid_argument("wchisq_cdf: bad accuracy parameters");

  if (q <= 0.0) return {0.0, 0.0, 0};

  const auto [lo_it, hi_it] = std::minmax_element(lambdas.begin(), lambdas.end());
  const double beta = 2.0 / (1.0 / *lo_it + 1.0 / *hi_it);

  std::vector<double> gamma(n);
  double log_a0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    gamma[i] = 1.0 - beta / lambdas[i];
    log_a0 += std::log(beta / lambdas[i]);
  }
  const double a0 = std::exp(0.5 * log_a0);
  if (a0 <= 0.0)
    throw numeric_error("wchisq_cdf: spectrum too spread for the mixture expansion");
  const double z = q / beta;

  constexpr double log_tol = -200.0;

  // chi2(n) CDF and 2x density at z
  double lans, dans, pans;
  int df = static_cast<int>(n);
  if (df % 2 == 0) {
    lans = -0.5 * z;
    dans = std::exp(lans);
    pans = 1.0 - dans;
    for (int i = 2; i <= df - 2; i += 2) {
      if (lans < log_tol) {
        lans += std::log(z / i);
        dans = std::exp(lans);
      } else {
        dans *= z / i;
      }
      pans -= dans;
    }
  } else {
    lans = -0.5 * (z + std::log(z)) - 0.5 * std::log(0.5 * M_PI);
    dans = std::exp(lans);
    pans = std::erf(std::sqrt(0.5 * z));
    for (int i = 1; i <= df - 2; i += 2) {
      if (lans < log_tol) {
        lans += std::log(z / i);
        dans = std::exp(lans);
      } else {
        dans *= z / i;
      }
      pans -= dans;
    }
  }

  double prob = pans;             // running A0-scaled probability
  const double eps_scaled = acc.eps / a0;
  double tail = 1.0 / a0 - 1.0;   // coefficient mass not yet consumed
  std::vector<double> theta(n, 1.0);
  std::vector<double> a, b;
  a.reserve(256);
  b.reserve(256);

  for (int m = 0; m < acc.max_terms; ++m) {
    double bm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      theta[i] *= gamma[i];
      bm += theta[i];
    }
    bm *= 0.5;
    double am = bm;
    for (int j = m - 1; j >= 0; --j) am += b[j] * a[m - j - 1];
    am /= m + 1;
    a.push_back(am);
    b.push_back(bm);

    // advance chi-square CDF from df to df + 2
    if (lans < log_tol) {
      lans += std::log(z / df);
      dans = std::exp(lans);
    } else {
      dans *= z / df;
    }
    df += 2;
    pans -= dans;

    tail -= am;
    prob += am * pans;

    const double tail_bound = std::abs(pans * tail);
    if (tail_bound < eps_scaled && std::abs(am * pans) < eps_scaled) {
      double value = a0 * prob;
      const double bound = a0 * tail_bound + acc.eps;
      if (value < -bound || value > 1.0 + bound)
        throw numeric_error("wchisq_cdf: series converged outside [0,1]");
      value = std::clamp(value, 0.0, 1.0);
      return {value, a0 * tail_bound, m + 1};
    }
  }

  std::ostringstream msg;
  msg << "wchisq_cdf: no convergence after " << acc.max_terms
      << " terms (partial sum " << a0 * prob << ", bound "
      << a0 * std::abs(pans * tail) << ")";
  throw numeric_error(msg.str());
}

WchisqCdf q_cdf(double q, const std::vector<double>& sigma2, double tau2,
                const AccuracyParams& acc) {
  return wchisq_cdf(eigen_spectrum(sigma2, tau2).lambdas, q, acc);
}

}  // namespace metapred
