#pragma once

#include <cstdint>
#include <string>

#include "metapred/qdist.hpp"
#include "metapred/rng.hpp"
#include "metapred/study_set.hpp"

namespace metapred {

enum class Method { hts, hts_hk, hts_sj, proposed };

// Display names as reported: "HTS", "HTS-HK", "HTS-SJ", "Proposed".
const char* method_name(Method m);

struct Interval {
  double lower;
  double upper;
  double width() const { return upper - lower; }
};

struct PredictionResult {
  Method method;
  double alpha;
  double lower;
  double upper;
  double width;      // upper - lower
  double center;     // pooled mean used for reporting
  double tau2_used;  // heterogeneity estimate behind the interval
  // bootstrap metadata (proposed method only)
  int b = 0;
  std::uint64_t seed = 0;
  double zero_fraction = 0.0;  // share of tau2 draws truncated to zero
};

// Wald confidence interval for the mean, mu_dl +/- z_{1-alpha/2} SE.
Interval ci_mean_dl(const StudySet& s, double alpha);

// Higgins-Thompson-Spiegelhalter prediction interval,
// mu_dl +/- t_{K-2} sqrt(tau2_dl + SE^2). Requires K >= 3.
PredictionResult pi_hts(const StudySet& s, double alpha);

enum class SeVariant { hk, sj };

// HTS-type interval after REML, with the Hartung-Knapp or Sidik-Jonkman
// variance estimator. Requires K >= 3.
PredictionResult pi_hts_reml(const StudySet& s, double alpha, SeVariant variant);

struct BootstrapOptions {
  int b = 5000;
  int threads = 1;
  AccuracyParams acc = {1e-10, 100000};  // passed to the confidence distribution
};

// Parametric bootstrap prediction interval. Per draw: tau2 from the
// confidence distribution of the untruncated DL estimator (zero
// truncated), z ~ N(0,1), t ~ t(K-1); theta_b = mu(w_b) + z*tau_b -
// t*SE_H(w_b); the limits are type-7 empirical quantiles. Draws are
// keyed by bootstrap index, so results do not depend on opt.threads.
PredictionResult pi_bootstrap(const StudySet& s, double alpha,
                              const BootstrapOptions& opt, rng::Stream stream);

}  // namespace metapred
