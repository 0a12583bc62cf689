#pragma once

#include <vector>

#include "metapred/qdist.hpp"
#include "metapred/rng.hpp"
#include "metapred/study_set.hpp"

namespace metapred {

// Confidence distribution for the heterogeneity variance,
// H(tau2) = 1 - F_Q(q_obs; tau2), nondecreasing in tau2 on [0, inf).
// Immutable; safe to share across threads.
class ConfDist {
 public:
  // Defaults tighten the CDF accuracy so the inversion tolerance below
  // dominates the total error.
  ConfDist(double q_obs, std::vector<double> sigma2,
           const AccuracyParams& acc = {1e-10, 100000});

  static ConfDist from_studies(const StudySet& s,
                               const AccuracyParams& acc = {1e-10, 100000});

  double q_obs() const { return q_obs_; }
  const std::vector<double>& sigma2() const { return sigma2_; }
  double h0() const { return h0_; }                    // H(0), cached
  double bracket_hint() const { return bracket_hint_; }  // max(1, 4 * tau2_dl)
  const AccuracyParams& accuracy() const { return acc_; }

 private:
  double q_obs_;
  std::vector<double> sigma2_;
  AccuracyParams acc_;
  double h0_;
  double bracket_hint_;
};

// H(tau2) = 1 - F_Q(q_obs; tau2).
double h_eval(const ConfDist& cd, double tau2);

// Solve H(t) = u for t >= 0; returns 0 when H(0) > u (zero truncation).
// The non-truncated branch satisfies |H(t) - u| <= 1e-8.
double sample_tau2(const ConfDist& cd, double u);

// count draws u_b from per-index substreams of `stream`, mapped through
// sample_tau2. Deterministic given the stream's seed and independent of
// any work partitioning.
std::vector<double> sample_tau2_batch(const ConfDist& cd, rng::Stream& stream,
                                      int count);

}  // namespace metapred
