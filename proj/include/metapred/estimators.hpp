#pragma once

#include <cstddef>

#include "metapred/study_set.hpp"

namespace metapred {

struct PooledMean {
  double mu;  // inverse-variance weighted mean at the given tau2
  double se;  // sqrt(1 / sum w_k)
};

struct RemlOptions {
  double tol = 1e-10;  // on successive iterates
  int max_iter = 100;
};

struct RemlResult {
  double tau2;
  int iterations;
  bool converged;
};

// Cochran's Q = sum v_k (y_k - ybar)^2 with v_k = 1/sigma2_k.
double cochran_q(const StudySet& s);

// Untruncated DerSimonian-Laird moment estimator; may be negative.
double tau2_udl(const StudySet& s);

// max(0, tau2_udl).
double tau2_dl(const StudySet& s);

// REML estimator by fixed-point iteration, iterates clamped at 0.
RemlResult tau2_reml(const StudySet& s, const RemlOptions& opt = {});

PooledMean pooled_mean(const StudySet& s, double tau2);

// Hartung's weighted standard error of the pooled mean,
// SE^2 = 1/(K-1) * sum (w_k/w_+) (y_k - mu)^2.
double se_hartung(const StudySet& s, double tau2, double mu_hat);

// Hartung-Knapp variance estimator under REML weights.
double se_hk(const StudySet& s, double tau2_reml);

// Sidik-Jonkman bias-corrected variance estimator under REML weights.
// Throws method_error if some leverage correction 1 - h_k <= 0.
double se_sj(const StudySet& s, double tau2_reml);

// Higgins-Thompson I^2 from Q, in percent; 0 when Q == 0.
double i_squared(double q, std::size_t k);

// Cochran heterogeneity test p-value, P(chi2(K-1) >= Q).
double q_test_pvalue(double q, std::size_t k);

// All of the above evaluated once for a data set.
struct HeterogeneityFit {
  double q;
  double tau2_udl;
  double tau2_dl;
  double tau2_reml;
  double mu_hat;       // pooled mean at tau2_dl
  double se_mu;        // plain SE of mu_hat
  double mu_reml;      // pooled mean at tau2_reml
  double se_mu_reml;
  double se_hartung;   // Hartung SE at tau2_dl and mu_hat
  double se_hk;
  double se_sj;        // NaN if the leverage correction degenerates
  bool se_sj_valid;
  double i2;           // percent
  double p_het;
  int reml_iterations;
  bool reml_converged;
};

HeterogeneityFit fit_heterogeneity(const StudySet& s, const RemlOptions& opt = {});

}  // namespace metapred
