#include <doctest.h>

#include <cmath>
#include <vector>

#include "metapred/confdist.hpp"
#include "metapred/errors.hpp"
#include "metapred/estimators.hpp"
#include "metapred/rng.hpp"
#include "metapred/sim.hpp"

#include "test_util.hpp"

using namespace metapred;

TEST_SUITE_BEGIN("confdist");

TEST_CASE("h_eval closed forms for K = 2") {
  const ConfDist cd(2.0, {1.0, 1.0});
  CHECK(h_eval(cd, 0.0) == doctest::Approx(1.0 - std::erf(1.0)).epsilon(1e-7));
  CHECK(h_eval(cd, 1.0) ==
        doctest::Approx(1.0 - std::erf(std::sqrt(0.5))).epsilon(1e-7));
  CHECK(cd.h0() == doctest::Approx(1.0 - std::erf(1.0)).epsilon(1e-7));
}

TEST_CASE("h_eval against an independent reference value") {
  // H value computed independently via Imhof's integral
  const ConfDist cd(5.0, {0.04, 0.09, 0.16});
  CHECK(h_eval(cd, 0.05) == doctest::Approx(0.2078118373607).epsilon(1e-7));
}

TEST_CASE("h_eval is 1 when q_obs = 0") {
  const ConfDist cd(0.0, {0.5, 0.8});
  CHECK(h_eval(cd, 0.0) == 1.0);
  CHECK(h_eval(cd, 3.0) == 1.0);
}

TEST_CASE("h_eval is nondecreasing in tau2") {
  const ConfDist cd(7.4, {0.11, 0.31, 0.06, 0.52});
  double prev = -1.0;
  for (double t = 0.0; t <= 6.0; t += 0.25) {
    const double h = h_eval(cd, t);
    CHECK(h >= prev - 1e-10);
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
    prev = h;
  }
}

TEST_CASE("sample_tau2 inverts h_eval") {
  const ConfDist cd(2.0, {1.0, 1.0});
  const double u = 1.0 - std::erf(std::sqrt(0.5));  // = H(1.0)
  CHECK(sample_tau2(cd, u) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sample_tau2 truncates to zero below H(0)") {
  const ConfDist cd(2.0, {1.0, 1.0});
  REQUIRE(cd.h0() == doctest::Approx(0.157299).epsilon(1e-5));
  CHECK(sample_tau2(cd, 0.10) == 0.0);
  CHECK(sample_tau2(cd, cd.h0() * 0.999) == 0.0);
}

TEST_CASE("sample_tau2 is continuous at the truncation boundary") {
  const ConfDist cd(2.0, {1.0, 1.0});
  const double t = sample_tau2(cd, cd.h0() + 1e-9);
  CHECK(t >= 0.0);
  CHECK(t <= 1e-4);
}

TEST_CASE("inversion residual stays within 1e-8") {
  const ConfDist cd(11.3, {0.05, 0.21, 0.13, 0.34, 0.08});
  rng::Stream stream(31);
  for (int i = 0; i < 50; ++i) {
    const double u = stream.uniform01();
    const double t = sample_tau2(cd, u);
    if (t > 0.0) CHECK(std::abs(h_eval(cd, t) - u) <= 1e-8);
  }
}

TEST_CASE("sample_tau2 rejects u outside (0,1)") {
  const ConfDist cd(2.0, {1.0, 1.0});
  CHECK_THROWS_AS(sample_tau2(cd, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_tau2(cd, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_tau2(cd, -0.2), std::invalid_argument);
}

TEST_CASE("sample_tau2 is monotone in u") {
  const ConfDist cd(9.0, {0.1, 0.4, 0.25});
  double prev = -1.0;
  for (double u = 0.05; u < 1.0; u += 0.05) {
    const double t = sample_tau2(cd, u);
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("sample_tau2_batch is deterministic and keyed per index") {
  const ConfDist cd(6.2, {0.2, 0.5, 0.9});
  rng::Stream a(123), b(123), c(77);
  const auto d1 = sample_tau2_batch(cd, a, 10);
  const auto d2 = sample_tau2_batch(cd, b, 10);
  CHECK(d1 == d2);
  const auto d3 = sample_tau2_batch(cd, c, 10);
  CHECK(d1 != d3);
}

TEST_CASE("sample_tau2_batch returns zeros when q_obs = 0") {
  const ConfDist cd(0.0, {1.0, 2.0});
  rng::Stream stream(5);
  for (const double t : sample_tau2_batch(cd, stream, 50)) CHECK(t == 0.0);
}

TEST_CASE("batch zero fraction matches H(0)") {
  const StudySet s({0.3, -0.2, 0.9, 0.4, 0.05}, {0.15, 0.21, 0.4, 0.1, 0.3});
  const ConfDist cd = ConfDist::from_studies(s);
  rng::Stream stream(424242);
  const int n = 100000;
  const auto draws = sample_tau2_batch(cd, stream, n);
  std::size_t zeros = 0;
  for (const double t : draws) zeros += t == 0.0 ? 1 : 0;
  const double frac = static_cast<double>(zeros) / n;
  const double se = std::sqrt(cd.h0() * (1.0 - cd.h0()) / n);
  CHECK(std::abs(frac - cd.h0()) <= 3.0 * se);
}

TEST_CASE("PIT smoke test: H(tau2_true) looks uniform") {
  // full-strength version (M = 2000, level 0.01) runs in the acceptance
  // suite; this is a reduced-size guard
  const ScenarioSpec spec{Scenario::i, 10, 0.1, 0.0, IiVariant::a};
  rng::Stream master(2024);
  const int m = 400;
  std::vector<double> h(m);
  for (int r = 0; r < m; ++r) {
    auto stream = master.substream(r);
    const GeneratedMeta gen = gen_scenario_i(spec, stream);
    const ConfDist cd = ConfDist::from_studies(gen.studies);
    h[r] = h_eval(cd, spec.tau2);
  }
  const auto ks = test_util::ks_uniform(h);
  CHECK(ks.p_value > 0.005);
}

TEST_SUITE_END();
