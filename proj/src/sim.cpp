#include "metapred/sim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "metapred/detail/parallel.hpp"
#include "metapred/errors.hpp"
#include "metapred/estimators.hpp"

namespace metapred {

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::i: return "i";
    case Scenario::ii: return "ii";
    case Scenario::iii: return "iii";
  }
  return "?";
}

double default_mu(Scenario s) { return s == Scenario::ii ? 1.0 : 0.0; }

namespace {

void check_spec(const ScenarioSpec& spec) {
  if (spec.k < 2) throw std::invalid_argument("ScenarioSpec: K must be >= 2");
  if (!(spec.tau2 >= 0.0)) throw std::invalid_argument("ScenarioSpec: tau2 must be >= 0");
  if (!std::isfinite(spec.mu)) throw std::invalid_argument("ScenarioSpec: mu must be finite");
}

}  // namespace

GeneratedMeta gen_scenario_i(const ScenarioSpec& spec, rng::Stream& stream) {
  check_spec(spec);
  const std::size_t k = static_cast<std::size_t>(spec.k);

  // chi2(1) draw rejected into [0.009, 0.6], then scaled by 0.25.
  std::vector<double> s2(k);
  for (std::size_t i = 0; i < k; ++i) {
    double x;
    do {
      x = rng::chi_squared(stream, 1.0);
    } while (x < 0.009 || x > 0.6);
    s2[i] = 0.25 * x;
  }

  std::vector<double> y(k);
  for (std::size_t i = 0; i < k; ++i)
    y[i] = spec.mu + rng::normal(stream) * std::sqrt(s2[i] + spec.tau2);
  const double theta_new = spec.mu + rng::normal(stream) * std::sqrt(spec.tau2);

  return {StudySet(std::move(y), s2), theta_new, std::move(s2)};
}

GeneratedMeta gen_scenario_ii(const ScenarioSpec& spec, rng::Stream& stream) {
  check_spec(spec);
  const std::size_t k = static_cast<std::size_t>(spec.k);
  const double df = static_cast<double>(ScenarioSpec::kStudySampleSize - 1);

  std::vector<double> s2(k);
  for (std::size_t i = 0; i < k; ++i)
    s2[i] = ScenarioSpec::kMeanWithinVariance * rng::chi_squared(stream, df) / df;

  if (spec.variant != IiVariant::a) {
    const int j = rng::uniform_int(stream, 0, spec.k - 1);
    if (spec.variant == IiVariant::b)
      s2[static_cast<std::size_t>(j)] /= 10.0;  // one large study
    else
      s2[static_cast<std::size_t>(j)] *= 10.0;  // one small study
  }

  std::vector<double> y(k);
  for (std::size_t i = 0; i < k; ++i)
    y[i] = spec.mu + rng::normal(stream) * std::sqrt(s2[i] + spec.tau2);
  const double theta_new = spec.mu + rng::normal(stream) * std::sqrt(spec.tau2);

  return {StudySet(std::move(y), s2), theta_new, std::move(s2)};
}

GeneratedMeta gen_scenario_iii(const ScenarioSpec& spec, rng::Stream& stream) {
  check_spec(spec);
  const std::size_t k = static_cast<std::size_t>(spec.k);
  const double tau = std::sqrt(spec.tau2);

  std::vector<double> theta(k), p0(k), p1(k);
  std::vector<std::int64_t> n(k), x0(k), x1(k);
  for (std::size_t i = 0; i < k; ++i) theta[i] = spec.mu + rng::normal(stream) * tau;
  for (std::size_t i = 0; i < k; ++i) n[i] = rng::uniform_int(stream, 20, 200);
  for (std::size_t i = 0; i < k; ++i) {
    p0[i] = 0.05 + 0.60 * stream.uniform01();
    // odds-ratio link: odds(p1) = exp(theta) * odds(p0)
    const double e = std::exp(theta[i]);
    p1[i] = p0[i] * e / (1.0 - p0[i] + p0[i] * e);
  }
  for (std::size_t i = 0; i < k; ++i)
    x0[i] = rng::binomial(stream, static_cast<int>(n[i]), p0[i]);
  for (std::size_t i = 0; i < k; ++i)
    x1[i] = rng::binomial(stream, static_cast<int>(n[i]), p1[i]);
  const double theta_new = spec.mu + rng::normal(stream) * tau;

  std::vector<double> true_s2(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double nn = static_cast<double>(n[i]);
    true_s2[i] = 1.0 / (nn * p0[i] * (1.0 - p0[i])) + 1.0 / (nn * p1[i] * (1.0 - p1[i]));
  }

  TwoByTwoSet tables(std::move(x1), n, std::move(x0), n);
  return {from_counts(tables), theta_new, std::move(true_s2)};
}

GeneratedMeta generate(const ScenarioSpec& spec, rng::Stream& stream) {
  switch (spec.scenario) {
    case Scenario::i: return gen_scenario_i(spec, stream);
    case Scenario::ii: return gen_scenario_ii(spec, stream);
    case Scenario::iii: return gen_scenario_iii(spec, stream);
  }
  throw std::invalid_argument("generate: unknown scenario");
}

namespace {

// Higgins typical within-study variance, (K-1) S1 / (S1^2 - S2).
double typical_within_variance(const std::vector<double>& sigma2) {
  double s1 = 0.0, s2 = 0.0;
  for (const double v2 : sigma2) {
    const double v = 1.0 / v2;
    s1 += v;
    s2 += v * v;
  }
  const double k1 = static_cast<double>(sigma2.size()) - 1.0;
  return k1 * s1 / (s1 * s1 - s2);
}

struct RepOutcome {
  bool ok = false;
  bool covered = false;
  double width = 0.0;
};

}  // namespace

std::vector<CoverageReport> coverage_study(const ScenarioSpec& spec,
                                           const std::vector<Method>& methods,
                                           const CoverageOptions& opt) {
  check_spec(spec);
  if (opt.reps < 1) throw std::invalid_argument("coverage_study: reps must be >= 1");

  const std::size_t n_methods = methods.size();
  const std::size_t reps = static_cast<std::size_t>(opt.reps);
  const rng::Stream master(opt.seed);

  std::vector<std::vector<RepOutcome>> outcomes(n_methods,
                                                std::vector<RepOutcome>(reps));
  std::vector<double> i2_pop(reps);

  detail::parallel_for(reps, opt.threads, [&](std::size_t r) {
    auto rep = master.substream(r);
    auto data_stream = rep.substream(0);
    const GeneratedMeta gen = generate(spec, data_stream);

    i2_pop[r] = spec.tau2 <= 0.0
                    ? 0.0
                    : 100.0 * spec.tau2 /
                          (spec.tau2 + typical_within_variance(gen.true_sigma2));

    for (std::size_t m = 0; m < n_methods; ++m) {
      RepOutcome& out = outcomes[m][r];
      try {
        PredictionResult pr;
        switch (methods[m]) {
          case Method::hts: pr = pi_hts(gen.studies, opt.alpha); break;
          case Method::hts_hk: pr = pi_hts_reml(gen.studies, opt.alpha, SeVariant::hk); break;
          case Method::hts_sj: pr = pi_hts_reml(gen.studies, opt.alpha, SeVariant::sj); break;
          case Method::proposed: {
            BootstrapOptions bo;
            bo.b = opt.b;
            bo.threads = 1;  // parallelism lives at the replication level
            pr = pi_bootstrap(gen.studies, opt.alpha, bo, rep.substream(1));
            break;
          }
        }
        out.ok = true;
        out.covered = pr.lower <= gen.theta_new && gen.theta_new <= pr.upper;
        out.width = pr.width;
      } catch (const method_error&) {
        out.ok = false;  // counted, excluded from the denominator
      }
    }
  });

  double i2_sum = 0.0;
  for (const double v : i2_pop) i2_sum += v;
  const double mean_i2 = i2_sum / static_cast<double>(reps);

  std::vector<CoverageReport> reports;
  reports.reserve(n_methods);
  for (std::size_t m = 0; m < n_methods; ++m) {
    std::size_t ok = 0, covered = 0;
    double width_sum = 0.0;
    for (const RepOutcome& out : outcomes[m]) {
      if (!out.ok) continue;
      ++ok;
      covered += out.covered ? 1 : 0;
      width_sum += out.width;
    }
    CoverageReport rep{};
    rep.method = methods[m];
    rep.spec = spec;
    rep.reps = opt.reps;
    rep.b = opt.b;
    rep.alpha = opt.alpha;
    rep.seed = opt.seed;
    rep.n_failed = static_cast<int>(reps - ok);
    rep.mean_i2 = mean_i2;
    if (ok > 0) {
      rep.coverage = static_cast<double>(covered) / static_cast<double>(ok);
      rep.mc_se = std::sqrt(rep.coverage * (1.0 - rep.coverage) / static_cast<double>(ok));
      rep.mean_width = width_sum / static_cast<double>(ok);
    }
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace metapred
