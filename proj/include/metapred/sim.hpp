#pragma once

#include <cstdint>
#include <vector>

#include "metapred/predint.hpp"
#include "metapred/rng.hpp"
#include "metapred/study_set.hpp"

namespace metapred {

enum class Scenario { i, ii, iii };
enum class IiVariant { a, b, c };  // balanced / one large study / one small study

const char* scenario_name(Scenario s);

// Generative model for one simulated meta-analysis.
struct ScenarioSpec {
  Scenario scenario;
  int k;
  double tau2;
  double mu;
  IiVariant variant = IiVariant::a;  // scenario ii only

  // design constants for scenario ii
  static constexpr double kMeanWithinVariance = 0.1;  // sigma^2
  static constexpr int kStudySampleSize = 30;         // n
};

// mu used when the caller does not set one: 0 for i, 1 for ii, 0 for iii.
double default_mu(Scenario s);

struct GeneratedMeta {
  StudySet studies;
  double theta_new;                 // independent draw from N(mu, tau2)
  std::vector<double> true_sigma2;  // design within-study variances
};

GeneratedMeta gen_scenario_i(const ScenarioSpec& spec, rng::Stream& stream);
GeneratedMeta gen_scenario_ii(const ScenarioSpec& spec, rng::Stream& stream);
GeneratedMeta gen_scenario_iii(const ScenarioSpec& spec, rng::Stream& stream);
GeneratedMeta generate(const ScenarioSpec& spec, rng::Stream& stream);

struct CoverageReport {
  Method method;
  ScenarioSpec spec;
  int reps;
  int b;
  double alpha;
  std::uint64_t seed;
  double coverage;    // fraction of applicable replications covering theta_new
  double mc_se;       // sqrt(cov (1-cov) / n_applicable)
  double mean_width;  // over applicable replications
  // Mean population-form I^2 of the design, in percent: the average over
  // replications of tau2 / (tau2 + s2_typical) with s2_typical the
  // Higgins typical within-study variance of that replication's true
  // sigma2_k. (The Q-based I^2 statistic of each generated data set is
  // a different, noisier quantity.)
  double mean_i2;
  int n_failed;  // replications where the method was not applicable
};

struct CoverageOptions {
  int reps = 1000;
  int b = 5000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Runs `reps` replications; replication r uses the substream keyed by
// (seed, r), so reports are deterministic and independent of threading.
// Method failures (K too small, degenerate SJ leverage) are counted and
// excluded from that method's coverage denominator.
std::vector<CoverageReport> coverage_study(const ScenarioSpec& spec,
                                           const std::vector<Method>& methods,
                                           const CoverageOptions& opt);

}  // namespace metapred
