// Golden-file checks: the JSON document for a fixed input and seed is
// frozen in tests/golden/ and must reproduce byte-for-byte.

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "metapred/analysis.hpp"
#include "metapred/csv.hpp"

using namespace metapred;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing golden file ", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

AnalysisReport fixed_report(const StudySet& s) {
  AnalyzeOptions opt;
  opt.alpha = 0.05;
  opt.b = 2000;
  opt.seed = 42;
  opt.threads = 1;
  return analyze(s, opt);
}

StudySet fixed_studies() {
  std::istringstream in(
      "study,y,se\nA,0.10,0.40\nB,0.50,0.30\nC,-0.20,0.50\nD,0.90,0.35\nE,0.30,0.45\n");
  return read_effects_csv(in, "golden-input");
}

}  // namespace

TEST_SUITE_BEGIN("golden");

TEST_CASE("analysis JSON matches the frozen document") {
  const StudySet s = fixed_studies();
  const std::string got = render_json(fixed_report(s), s);
  const std::string want = slurp(std::string(METAPREDICT_GOLDEN_DIR) +
                                 "/analyze_seed42.json");
  CHECK(got == want);
}

TEST_CASE("forest CSV matches the frozen document") {
  const StudySet s = fixed_studies();
  const std::string got = render_forest_csv(fixed_report(s), s);
  const std::string want = slurp(std::string(METAPREDICT_GOLDEN_DIR) +
                                 "/forest_seed42.csv");
  CHECK(got == want);
}

TEST_SUITE_END();
