#include <doctest.h>

#include <cmath>
#include <vector>

#include "metapred/errors.hpp"
#include "metapred/estimators.hpp"
#include "metapred/predint.hpp"
#include "metapred/rng.hpp"
#include "metapred/sim.hpp"

using namespace metapred;

TEST_SUITE_BEGIN("predint");

namespace {
const StudySet kThree({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0});
}

TEST_CASE("ci_mean_dl hand-computed example") {
  const Interval ci = ci_mean_dl(kThree, 0.05);
  CHECK(ci.lower == doctest::Approx(-0.13159).epsilon(1e-4));
  CHECK(ci.upper == doctest::Approx(2.13159).epsilon(1e-4));
}

TEST_CASE("ci_mean_dl centers on a constant data set") {
  const StudySet s({3.2, 3.2, 3.2}, {0.5, 1.0, 2.0});
  const Interval ci = ci_mean_dl(s, 0.05);
  CHECK((ci.lower + ci.upper) / 2.0 == doctest::Approx(3.2).epsilon(1e-12));
  const double se = pooled_mean(s, 0.0).se;
  CHECK(ci.upper - ci.lower == doctest::Approx(2.0 * 1.959963985 * se).epsilon(1e-6));
}

TEST_CASE("ci_mean_dl degenerates at alpha = 1") {
  const Interval ci = ci_mean_dl(kThree, 1.0);
  CHECK(ci.width() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pi_hts hand-computed example (t with 1 df)") {
  const PredictionResult r = pi_hts(kThree, 0.05);
  CHECK(r.lower == doctest::Approx(-6.3362).epsilon(1e-4));
  CHECK(r.upper == doctest::Approx(8.3362).epsilon(1e-4));
  CHECK(r.width == doctest::Approx(r.upper - r.lower).epsilon(1e-12));
  CHECK(std::abs((r.lower + r.upper) / 2.0 - r.center) <= 1e-12);
}

TEST_CASE("pi_hts reduces to a t-scaled CI when tau2_dl = 0") {
  // kThree has tau2_dl = 0, so the HTS radicand is just SE^2
  const PredictionResult r = pi_hts(kThree, 0.05);
  const double se = pooled_mean(kThree, 0.0).se;
  CHECK(r.width == doctest::Approx(2.0 * 12.7062 * se).epsilon(1e-4));
}

TEST_CASE("pi_hts width grows with tau2_dl at fixed SE") {
  // same weights, increasing spread
  const StudySet narrow({0.0, 0.5, 1.0}, {1.0, 1.0, 1.0});
  const StudySet wide({0.0, 2.0, 4.0}, {1.0, 1.0, 1.0});
  CHECK(pi_hts(wide, 0.05).width > pi_hts(narrow, 0.05).width);
}

TEST_CASE("HTS-family intervals need K >= 3") {
  const StudySet two({0.0, 2.0}, {1.0, 1.0});
  CHECK_THROWS_AS(pi_hts(two, 0.05), method_error);
  CHECK_THROWS_AS(pi_hts_reml(two, 0.05, SeVariant::hk), method_error);
  CHECK_THROWS_AS(pi_hts_reml(two, 0.05, SeVariant::sj), method_error);
}

TEST_CASE("pi_hts_reml: HK variant on the derived example") {
  // tau2_reml = 0 for kThree, so the interval is mu +/- t(1) * SE_HK(0)
  const PredictionResult r = pi_hts_reml(kThree, 0.05, SeVariant::hk);
  CHECK(r.center == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.lower == doctest::Approx(1.0 - 12.7062 * 0.57735).epsilon(1e-4));
  CHECK(r.upper == doctest::Approx(1.0 + 12.7062 * 0.57735).epsilon(1e-4));
}

TEST_CASE("HK and SJ share the REML center and differ only in width") {
  const StudySet s({0.3, -0.4, 1.1, 0.8, 0.2}, {0.2, 0.4, 0.3, 0.6, 0.25});
  const PredictionResult hk = pi_hts_reml(s, 0.05, SeVariant::hk);
  const PredictionResult sj = pi_hts_reml(s, 0.05, SeVariant::sj);
  CHECK(hk.center == doctest::Approx(sj.center).epsilon(1e-12));
  CHECK((hk.lower + hk.upper) / 2.0 == doctest::Approx((sj.lower + sj.upper) / 2.0)
                                           .epsilon(1e-10));
  CHECK(hk.width != sj.width);
}

TEST_CASE("pi_bootstrap rejects tiny B") {
  BootstrapOptions opt;
  opt.b = 50;
  CHECK_THROWS(pi_bootstrap(kThree, 0.05, opt, rng::Stream(1)));
}

TEST_CASE("pi_bootstrap is deterministic given the seed") {
  BootstrapOptions opt;
  opt.b = 400;
  const PredictionResult a = pi_bootstrap(kThree, 0.05, opt, rng::Stream(99));
  const PredictionResult b = pi_bootstrap(kThree, 0.05, opt, rng::Stream(99));
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
  const PredictionResult c = pi_bootstrap(kThree, 0.05, opt, rng::Stream(100));
  CHECK(a.lower != c.lower);
}

TEST_CASE("pi_bootstrap is invariant to the thread count") {
  const StudySet s({0.1, 0.6, -0.2, 0.9, 0.4}, {0.3, 0.2, 0.5, 0.4, 0.35});
  BootstrapOptions one;
  one.b = 500;
  one.threads = 1;
  BootstrapOptions four = one;
  four.threads = 4;
  const PredictionResult a = pi_bootstrap(s, 0.05, one, rng::Stream(7));
  const PredictionResult b = pi_bootstrap(s, 0.05, four, rng::Stream(7));
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
  CHECK(a.zero_fraction == b.zero_fraction);
}

TEST_CASE("bootstrap intervals nest across levels on shared draws") {
  BootstrapOptions opt;
  opt.b = 2000;
  const PredictionResult wide = pi_bootstrap(kThree, 0.05, opt, rng::Stream(11));
  const PredictionResult narrow = pi_bootstrap(kThree, 0.10, opt, rng::Stream(11));
  CHECK(narrow.lower >= wide.lower);
  CHECK(narrow.upper <= wide.upper);
}

TEST_CASE("location-scale equivariance of all four intervals") {
  const StudySet s({0.25, -0.11, 0.72, 0.4}, {0.18, 0.42, 0.3, 0.51});
  const double a = 3.0, b = 1.25;
  std::vector<double> y2, v2;
  for (const double yi : s.y()) y2.push_back(a * yi + b);
  for (const double vi : s.sigma2()) v2.push_back(a * a * vi);
  const StudySet t(y2, v2);

  const Interval ci_s = ci_mean_dl(s, 0.05);
  const Interval ci_t = ci_mean_dl(t, 0.05);
  CHECK(ci_t.lower == doctest::Approx(a * ci_s.lower + b).epsilon(1e-10));
  CHECK(ci_t.upper == doctest::Approx(a * ci_s.upper + b).epsilon(1e-10));

  for (const SeVariant v : {SeVariant::hk, SeVariant::sj}) {
    const PredictionResult ps = pi_hts_reml(s, 0.05, v);
    const PredictionResult pt = pi_hts_reml(t, 0.05, v);
    CHECK(pt.lower == doctest::Approx(a * ps.lower + b).epsilon(1e-7));
    CHECK(pt.upper == doctest::Approx(a * ps.upper + b).epsilon(1e-7));
  }
  {
    const PredictionResult ps = pi_hts(s, 0.05);
    const PredictionResult pt = pi_hts(t, 0.05);
    CHECK(pt.lower == doctest::Approx(a * ps.lower + b).epsilon(1e-10));
    CHECK(pt.upper == doctest::Approx(a * ps.upper + b).epsilon(1e-10));
  }
  {
    // the tau2 inversion carries a small numerical tolerance, so the
    // bootstrap limits map with a looser epsilon
    BootstrapOptions opt;
    opt.b = 1500;
    const PredictionResult ps = pi_bootstrap(s, 0.05, opt, rng::Stream(55));
    const PredictionResult pt = pi_bootstrap(t, 0.05, opt, rng::Stream(55));
    CHECK(pt.lower == doctest::Approx(a * ps.lower + b).epsilon(1e-4));
    CHECK(pt.upper == doctest::Approx(a * ps.upper + b).epsilon(1e-4));
    CHECK(pt.zero_fraction == ps.zero_fraction);
  }
}

TEST_CASE("bootstrap interval runs wider than HTS under small heterogeneity") {
  // stochastic-dominance smoke test on scenario (i), K = 5, tau2 = 0.01
  const ScenarioSpec spec{Scenario::i, 5, 0.01, 0.0, IiVariant::a};
  rng::Stream master(606);
  int wider = 0;
  const int reps = 60;
  double width_boot = 0.0, width_hts = 0.0;
  for (int r = 0; r < reps; ++r) {
    auto rep = master.substream(r);
    auto data_stream = rep.substream(0);
    const GeneratedMeta gen = gen_scenario_i(spec, data_stream);
    BootstrapOptions opt;
    opt.b = 400;
    const PredictionResult boot = pi_bootstrap(gen.studies, 0.05, opt, rep.substream(1));
    const PredictionResult hts = pi_hts(gen.studies, 0.05);
    width_boot += boot.width;
    width_hts += hts.width;
    wider += boot.width > hts.width ? 1 : 0;
  }
  CHECK(width_boot > width_hts);
  CHECK(wider > reps / 2);
}

TEST_CASE("zero_fraction reflects the truncation share") {
  // strongly heterogeneous data: H(0) is small, few truncated draws
  const StudySet spread({-2.0, 0.0, 2.0, 4.0}, {0.05, 0.05, 0.05, 0.05});
  BootstrapOptions opt;
  opt.b = 400;
  const PredictionResult r = pi_bootstrap(spread, 0.05, opt, rng::Stream(2));
  CHECK(r.zero_fraction < 0.05);

  // homogeneous data: H(0) is large, most draws truncate
  const StudySet flat({0.5, 0.5, 0.5, 0.5}, {1.0, 1.0, 1.0, 1.0});
  const PredictionResult f = pi_bootstrap(flat, 0.05, opt, rng::Stream(2));
  CHECK(f.zero_fraction > 0.5);
}

TEST_SUITE_END();
