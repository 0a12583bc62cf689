// End-to-end checks of the command-line surface: exit codes, output
// formats and the qcdf utility. These exec the built binary.

#include <doctest.h>

#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(METAPREDICT_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe) != nullptr) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() /
                    ("metapredict-cli-" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name, const std::string& contents) const {
    const fs::path p = path_ / name;
    std::ofstream f(p);
    f << contents;
    return p;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

TEST_SUITE_BEGIN("cli");

double parse_probability(const std::string& out) {
  const auto pos = out.find(") = ");
  REQUIRE(pos != std::string::npos);
  return std::stod(out.substr(pos + 4));
}

TEST_CASE("qcdf closed forms and trivial cases") {
  CliResult r = run_cli("qcdf --lambdas 1,1 --q 1.38629");
  CHECK(r.exit_code == 0);
  CHECK(parse_probability(r.out) == doctest::Approx(0.500).epsilon(1e-3));

  r = run_cli("qcdf --sigma2 1,1 --tau2 0 --q 2");
  CHECK(r.exit_code == 0);
  CHECK(parse_probability(r.out) == doctest::Approx(0.84270).epsilon(1e-4));

  r = run_cli("qcdf --lambdas 2,1 --q -1");
  CHECK(r.exit_code == 0);
  CHECK(parse_probability(r.out) == 0.0);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli("qcdf --lambdas 1,1 --sigma2 1,1 --tau2 0 --q 1").exit_code == 2);
  CHECK(run_cli("qcdf --q 1").exit_code == 2);
  CHECK(run_cli("analyze").exit_code == 2);
  CHECK(run_cli("simulate --scenario ii --K 5 --tau2 0.1 --reps 2 --B 100 --seed 1")
            .exit_code == 2);  // missing --variant
  CHECK(run_cli("simulate --scenario i --variant b --K 5 --tau2 0.1 --reps 2 "
                "--B 100 --seed 1")
            .exit_code == 2);  // variant without scenario ii
  CHECK(run_cli("nonsense").exit_code == 2);
}

TEST_CASE("data errors exit with 3") {
  TempDir dir;
  const fs::path bad = dir.file("bad.csv", "study,y,se\nA,0.5,oops\nB,1,0.4\n");
  CHECK(run_cli("analyze --input " + bad.string() + " --seed 1 --B 200").exit_code == 3);

  const fs::path negative = dir.file("neg.csv", "study,y,se\nA,0.5,-1\nB,1,0.4\n");
  CHECK(run_cli("analyze --input " + negative.string() + " --seed 1 --B 200").exit_code ==
        3);

  CHECK(run_cli("analyze --input /does/not/exist.csv --seed 1 --B 200").exit_code == 3);
}

TEST_CASE("numerical failures exit with 4") {
  // an impossible accuracy target forces the series to give up
  CHECK(run_cli("qcdf --lambdas 5,0.01 --q 1 --eps 1e-13 --max-terms 3").exit_code == 4);
}

TEST_CASE("analyze on counts notes the continuity correction") {
  TempDir dir;
  const fs::path counts = dir.file(
      "counts.csv", "study,x1,n1,x0,n0\nA,5,10,0,10\nB,8,20,6,20\nC,9,15,7,15\n");
  const CliResult r = run_cli("analyze --input " + counts.string() +
                              " --format counts --seed 5 --B 200");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("continuity correction") != std::string::npos);

  const CliResult j = run_cli("analyze --input " + counts.string() +
                              " --format counts --seed 5 --B 200 --out json");
  CHECK(j.exit_code == 0);
  CHECK(j.out.find("\"continuity_corrected\": true") != std::string::npos);
}

TEST_CASE("analyze table carries the report rows") {
  TempDir dir;
  const fs::path f = dir.file("in.csv", "study,y,se\nA,0,1\nB,1,1\nC,2,1\n");
  const CliResult r = run_cli("analyze --input " + f.string() + " --seed 42 --B 200");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("mu (DL)") != std::string::npos);
  CHECK(r.out.find("1.0000") != std::string::npos);
  CHECK(r.out.find("95% CI (DL)") != std::string::npos);
  CHECK(r.out.find("[-0.1316, 2.1316]") != std::string::npos);
  CHECK(r.out.find("tau2 (REML)") != std::string::npos);
  CHECK(r.out.find("95% PI Proposed") != std::string::npos);
  CHECK(r.out.find("95% PI HTS-SJ") != std::string::npos);
  CHECK(r.out.find("length HTS") != std::string::npos);
}

TEST_CASE("forest output ends up in the requested file") {
  TempDir dir;
  const fs::path f = dir.file("in.csv", "study,y,se\nA,0,1\nB,1,1\nC,2,1\n");
  const fs::path out = dir.path() / "forest.csv";
  const CliResult r = run_cli("analyze --input " + f.string() +
                              " --seed 42 --B 200 --out forest-csv --output " +
                              out.string());
  CHECK(r.exit_code == 0);
  std::ifstream in(out);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "kind,label,estimate,lower,upper,method");
}

TEST_CASE("simulate appends rows with a header once") {
  TempDir dir;
  const fs::path out = dir.path() / "cov.csv";
  const std::string base =
      "simulate --scenario iii --K 4 --tau2 0.1 --reps 4 --B 150 --seed 3 --out " +
      out.string();
  CHECK(run_cli(base).exit_code == 0);
  CHECK(run_cli(base).exit_code == 0);

  std::ifstream in(out);
  std::string line;
  int lines = 0, headers = 0;
  while (std::getline(in, line)) {
    ++lines;
    if (line.rfind("scenario,", 0) == 0) ++headers;
  }
  CHECK(headers == 1);
  CHECK(lines == 1 + 2 * 4);  // header + 4 methods per run
}

TEST_SUITE_END();
