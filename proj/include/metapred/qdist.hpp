#pragma once

#include <cstddef>
#include <vector>

namespace metapred {

struct AccuracyParams {
  double eps = 1e-8;       // target absolute accuracy of the CDF value
  int max_terms = 100000;  // series length cap
};

// Eigenvalues of S(tau2) = Sigma^{1/2} A Sigma^{1/2}, where
// A = V - v v^T / v_+ (V = diag(1/sigma2_k)) and
// Sigma = diag(sigma2_k + tau2). S has rank K-1; the structural zero
// eigenvalue is dropped.
struct EigenSpectrum {
  std::vector<double> lambdas;  // positive, sorted descending, size K-1
  std::size_t rank;             // lambdas.size()
  double trace;                 // sum of all K eigenvalues before the drop
};

EigenSpectrum eigen_spectrum(const std::vector<double>& sigma2, double tau2);

struct WchisqCdf {
  double value;        // P(sum_i lambda_i chi2_1,i <= q)
  double error_bound;  // bound on the absolute truncation error
  int terms;           // series terms used
};

// CDF of a positive linear combination of independent chi^2(1)
// variables, by Ruben's mixture expansion (Farebrother, algorithm
// AS 204, J. R. Stat. Soc. C 33, 1984). Throws numeric_error when the
// series does not reach acc.eps within acc.max_terms.
WchisqCdf wchisq_cdf(const std::vector<double>& lambdas, double q,
                     const AccuracyParams& acc = {});

// Exact distribution of Cochran's Q under the random-effects model:
// F_Q(q; tau2) = wchisq_cdf(eigen_spectrum(sigma2, tau2), q).
WchisqCdf q_cdf(double q, const std::vector<double>& sigma2, double tau2,
                const AccuracyParams& acc = {});

}  // namespace metapred
