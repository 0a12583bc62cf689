// metapredict: confidence and prediction intervals for random-effects
// meta-analysis, plus a coverage-simulation driver.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "metapred/analysis.hpp"
#include "metapred/csv.hpp"
#include "metapred/errors.hpp"
#include "metapred/qdist.hpp"
#include "metapred/sim.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int default_threads() {
  if (const char* env = std::getenv("METAPREDICT_THREADS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (...) {
      return 0;
    }
  }
  return 0;  // auto
}

std::uint64_t draw_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw CLI::ValidationError("cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

struct AnalyzeArgs {
  std::string input;
  std::string format = "effects";
  std::string out = "table";
  std::string output_path;
  double alpha = 0.05;
  int b = 50000;
  std::optional<std::uint64_t> seed;
  int threads = default_threads();
};

int run_analyze(const AnalyzeArgs& args) {
  std::ifstream in(args.input);
  if (!in) throw metapred::data_error("cannot open input file '" + args.input + "'");

  bool corrected = false;
  std::optional<metapred::StudySet> studies;
  if (args.format == "effects") {
    studies = metapred::read_effects_csv(in, args.input);
  } else {
    const metapred::TwoByTwoSet tables = metapred::read_counts_csv(in, args.input);
    corrected = tables.has_zero_cell();
    studies = metapred::from_counts(tables);
  }

  metapred::AnalyzeOptions opt;
  opt.alpha = args.alpha;
  opt.b = args.b;
  opt.threads = args.threads;
  if (args.seed) {
    opt.seed = *args.seed;
  } else {
    opt.seed = draw_seed();
    std::cerr << "seed: " << opt.seed << " (auto-drawn; pass --seed to reproduce)\n";
  }

  const metapred::AnalysisReport report = metapred::analyze(*studies, opt, corrected);

  std::string text;
  if (args.out == "table")
    text = metapred::render_table(report);
  else if (args.out == "json")
    text = metapred::render_json(report, *studies);
  else
    text = metapred::render_forest_csv(report, *studies);

  if (args.output_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.output_path, std::ios::binary);
    if (!out) throw metapred::data_error("cannot open output file '" + args.output_path + "'");
    out << text;
  }
  return 0;
}

struct SimulateArgs {
  std::string scenario;
  int k = 10;
  double tau2 = 0.1;
  std::optional<double> mu;
  std::string variant;
  int reps = 1000;
  int b = 5000;
  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = default_threads();
};

int run_simulate(const SimulateArgs& args) {
  metapred::ScenarioSpec spec{};
  if (args.scenario == "i")
    spec.scenario = metapred::Scenario::i;
  else if (args.scenario == "ii")
    spec.scenario = metapred::Scenario::ii;
  else
    spec.scenario = metapred::Scenario::iii;
  spec.k = args.k;
  spec.tau2 = args.tau2;
  spec.mu = args.mu ? *args.mu : metapred::default_mu(spec.scenario);
  if (spec.scenario == metapred::Scenario::ii) {
    spec.variant = args.variant == "b"   ? metapred::IiVariant::b
                   : args.variant == "c" ? metapred::IiVariant::c
                                         : metapred::IiVariant::a;
  }

  metapred::CoverageOptions opt;
  opt.reps = args.reps;
  opt.b = args.b;
  opt.alpha = args.alpha;
  opt.threads = args.threads;
  if (args.seed) {
    opt.seed = *args.seed;
  } else {
    opt.seed = draw_seed();
    std::cerr << "seed: " << opt.seed << " (auto-drawn; pass --seed to reproduce)\n";
  }

  const std::vector<metapred::Method> methods = {
      metapred::Method::proposed, metapred::Method::hts, metapred::Method::hts_hk,
      metapred::Method::hts_sj};
  const auto reports = metapred::coverage_study(spec, methods, opt);

  std::cout << "scenario " << metapred::scenario_name(spec.scenario);
  if (spec.scenario == metapred::Scenario::ii)
    std::cout << "-" << (spec.variant == metapred::IiVariant::a   ? "a"
                         : spec.variant == metapred::IiVariant::b ? "b"
                                                                  : "c");
  std::cout << "  K=" << spec.k << "  tau2=" << spec.tau2 << "  mu=" << spec.mu
            << "  reps=" << opt.reps << "  B=" << opt.b << "  seed=" << opt.seed << "\n";
  std::cout << std::left << std::setw(10) << "method" << std::right << std::setw(10)
            << "coverage" << std::setw(10) << "mc_se" << std::setw(12) << "mean_width"
            << std::setw(10) << "mean_i2" << std::setw(8) << "failed" << "\n";
  std::cout << std::fixed;
  for (const auto& r : reports) {
    std::cout << std::left << std::setw(10) << metapred::method_name(r.method)
              << std::right << std::setprecision(4) << std::setw(10) << r.coverage
              << std::setw(10) << r.mc_se << std::setw(12) << r.mean_width
              << std::setprecision(1) << std::setw(9) << r.mean_i2 << "%"
              << std::setw(8) << r.n_failed << "\n";
  }
  std::cout.unsetf(std::ios::fixed);

  if (!args.out.empty()) {
    const bool fresh = !std::filesystem::exists(args.out);
    std::ofstream out(args.out, std::ios::binary | std::ios::app);
    if (!out) throw metapred::data_error("cannot open output file '" + args.out + "'");
    if (fresh)
      out << "scenario,variant,K,tau2,mu,method,coverage,mc_se,mean_width,mean_i2,"
             "n_failed,reps,B,alpha,seed\n";
    out << std::setprecision(17);
    for (const auto& r : reports) {
      out << metapred::scenario_name(spec.scenario) << ",";
      if (spec.scenario == metapred::Scenario::ii)
        out << (spec.variant == metapred::IiVariant::a   ? "a"
                : spec.variant == metapred::IiVariant::b ? "b"
                                                         : "c");
      out << "," << spec.k << "," << spec.tau2 << "," << spec.mu << ","
          << metapred::method_name(r.method) << "," << r.coverage << "," << r.mc_se
          << "," << r.mean_width << "," << r.mean_i2 << "," << r.n_failed << ","
          << r.reps << "," << r.b << "," << r.alpha << "," << r.seed << "\n";
    }
  }
  return 0;
}

struct QcdfArgs {
  std::string lambdas;
  std::string sigma2;
  std::optional<double> tau2;
  double q = 0.0;
  double eps = 1e-8;
  int max_terms = 100000;
};

int run_qcdf(const QcdfArgs& args) {
  metapred::AccuracyParams acc{args.eps, args.max_terms};
  metapred::WchisqCdf result{};
  if (!args.lambdas.empty()) {
    result = metapred::wchisq_cdf(parse_double_list(args.lambdas), args.q, acc);
  } else {
    result = metapred::q_cdf(args.q, parse_double_list(args.sigma2),
                             args.tau2.value_or(0.0), acc);
  }
  std::cout << std::setprecision(10) << "P(Q <= " << args.q << ") = " << result.value
            << "   (error bound " << std::setprecision(2) << std::scientific
            << result.error_bound << ", " << result.terms << " terms)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence and prediction intervals for random-effects meta-analysis"};
  app.require_subcommand(1);

  AnalyzeArgs a;
  CLI::App* analyze = app.add_subcommand("analyze", "Analyze a meta-analysis CSV");
  analyze->add_option("--input", a.input, "input CSV path")->required();
  analyze->add_option("--format", a.format, "input format")
      ->check(CLI::IsMember({"effects", "counts"}));
  analyze->add_option("--alpha", a.alpha, "two-sided level (default 0.05)")
      ->check(CLI::Range(1e-6, 1.0));
  analyze->add_option("--B", a.b, "bootstrap draws (default 50000)")
      ->check(CLI::Range(100, 100000000));
  analyze->add_option("--seed", a.seed, "RNG seed (auto-drawn and echoed if omitted)");
  analyze->add_option("--out", a.out, "output kind")
      ->check(CLI::IsMember({"table", "json", "forest-csv"}));
  analyze->add_option("--output", a.output_path, "write output to this file");
  analyze->add_option("--threads", a.threads,
                      "worker threads, 0 = auto (env METAPREDICT_THREADS)");

  SimulateArgs s;
  CLI::App* simulate = app.add_subcommand("simulate", "Estimate coverage by simulation");
  simulate->add_option("--scenario", s.scenario, "design: i, ii or iii")
      ->required()
      ->check(CLI::IsMember({"i", "ii", "iii"}));
  simulate->add_option("--K", s.k, "number of studies")->check(CLI::Range(2, 100000));
  simulate->add_option("--tau2", s.tau2, "heterogeneity variance")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--mu", s.mu, "mean effect (default 0 for i/iii, 1 for ii)");
  simulate->add_option("--variant", s.variant, "scenario ii variant")
      ->check(CLI::IsMember({"a", "b", "c"}));
  simulate->add_option("--reps", s.reps, "replications (default 1000)")
      ->check(CLI::Range(1, 10000000));
  simulate->add_option("--B", s.b, "bootstrap draws (default 5000)")
      ->check(CLI::Range(100, 100000000));
  simulate->add_option("--alpha", s.alpha, "two-sided level")->check(CLI::Range(1e-6, 1.0));
  simulate->add_option("--seed", s.seed, "RNG seed (auto-drawn and echoed if omitted)");
  simulate->add_option("--out", s.out, "append CSV rows to this file");
  simulate->add_option("--threads", s.threads,
                       "worker threads, 0 = auto (env METAPREDICT_THREADS)");

  QcdfArgs q;
  CLI::App* qcdf = app.add_subcommand(
      "qcdf", "CDF of a nonnegative linear combination of chi-square(1) variables");
  auto* lam_opt = qcdf->add_option("--lambdas", q.lambdas, "comma-separated weights");
  auto* sig_opt = qcdf->add_option("--sigma2", q.sigma2,
                                   "comma-separated within-study variances");
  auto* tau_opt = qcdf->add_option("--tau2", q.tau2, "heterogeneity variance");
  qcdf->add_option("--q", q.q, "evaluation point")->required();
  qcdf->add_option("--eps", q.eps, "target absolute accuracy");
  qcdf->add_option("--max-terms", q.max_terms, "series cap");
  lam_opt->excludes(sig_opt)->excludes(tau_opt);
  sig_opt->needs(tau_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*analyze) return run_analyze(a);
    if (*simulate) {
      if (s.scenario == "ii" && s.variant.empty())
        throw CLI::ValidationError("--variant is required for scenario ii");
      if (s.scenario != "ii" && !s.variant.empty())
        throw CLI::ValidationError("--variant only applies to scenario ii");
      return run_simulate(s);
    }
    if (*qcdf) {
      if (q.lambdas.empty() && q.sigma2.empty())
        throw CLI::ValidationError("pass either --lambdas or --sigma2/--tau2");
      return run_qcdf(q);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const metapred::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const metapred::numeric_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
