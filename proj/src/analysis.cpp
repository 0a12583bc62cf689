#include "metapred/analysis.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include <json.hpp>

#include "metapred/errors.hpp"

namespace metapred {

namespace {

std::string fmt4(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << x;
  return os.str();
}

std::string fmt_interval(double lo, double hi) {
  return "[" + fmt4(lo) + ", " + fmt4(hi) + "]";
}

std::string fmt_pvalue(double p) {
  if (p < 0.001) return "<0.001";
  return fmt4(p);
}

}  // namespace

AnalysisReport analyze(const StudySet& s, const AnalyzeOptions& opt,
                       bool continuity_corrected) {
  AnalysisReport rep;
  rep.k = s.size();
  rep.continuity_corrected = continuity_corrected;
  rep.settings = opt;
  rep.fit = fit_heterogeneity(s);
  rep.ci_dl = ci_mean_dl(s, opt.alpha);

  {
    MethodEntry e{Method::proposed, std::nullopt, {}};
    BootstrapOptions bo;
    bo.b = opt.b;
    bo.threads = opt.threads;
    PredictionResult pr = pi_bootstrap(s, opt.alpha, bo, rng::Stream(opt.seed));
    pr.seed = opt.seed;
    e.result = pr;
    rep.intervals.push_back(std::move(e));
  }
  const auto add_hts = [&](Method m) {
    MethodEntry e{m, std::nullopt, {}};
    try {
      switch (m) {
        case Method::hts: e.result = pi_hts(s, opt.alpha); break;
        case Method::hts_hk: e.result = pi_hts_reml(s, opt.alpha, SeVariant::hk); break;
        case Method::hts_sj: e.result = pi_hts_reml(s, opt.alpha, SeVariant::sj); break;
        default: break;
      }
    } catch (const method_error& err) {
      e.unavailable_reason = err.what();
    }
    rep.intervals.push_back(std::move(e));
  };
  add_hts(Method::hts);
  add_hts(Method::hts_hk);
  add_hts(Method::hts_sj);
  return rep;
}

std::string render_table(const AnalysisReport& r) {
  const int pct = 100 - static_cast<int>(std::lround(r.settings.alpha * 100.0));
  std::ostringstream os;
  os << "K                      : " << r.k << "\n";
  if (r.continuity_corrected)
    os << "note                   : continuity correction (+0.5 to all cells) applied\n";
  os << "mu (DL)                : " << fmt4(r.fit.mu_hat) << "\n";
  os << std::left << std::setw(23) << (std::to_string(pct) + "% CI (DL)") << std::right
     << ": " << fmt_interval(r.ci_dl.lower, r.ci_dl.upper) << "\n";
  os << "tau2 (DL)              : " << fmt4(r.fit.tau2_dl) << "\n";
  os << "tau2 (REML)            : " << fmt4(r.fit.tau2_reml);
  if (!r.fit.reml_converged) os << "  (not converged)";
  os << "\n";
  os << "I2 (DL)                : " << fmt4(r.fit.i2) << "%\n";
  os << "P-value heterogeneity  : " << fmt_pvalue(r.fit.p_het) << "\n";
  for (const MethodEntry& e : r.intervals) {
    std::ostringstream label;
    label << pct << "% PI " << method_name(e.method);
    os << std::left << std::setw(23) << label.str() << std::right << ": ";
    if (e.result)
      os << fmt_interval(e.result->lower, e.result->upper);
    else
      os << "n/a (" << e.unavailable_reason << ")";
    os << "\n";
  }
  for (const MethodEntry& e : r.intervals) {
    std::ostringstream label;
    label << "length " << method_name(e.method);
    os << std::left << std::setw(23) << label.str() << std::right << ": ";
    if (e.result)
      os << fmt4(e.result->width);
    else
      os << "n/a";
    os << "\n";
  }
  return os.str();
}

std::string render_json(const AnalysisReport& r, const StudySet& s) {
  nlohmann::ordered_json j;
  j["schema"] = "metapredict-analysis/1";

  nlohmann::ordered_json input;
  input["k"] = r.k;
  input["continuity_corrected"] = r.continuity_corrected;
  if (!s.labels().empty()) input["studies"] = s.labels();
  j["input_summary"] = input;

  nlohmann::ordered_json est;
  est["mu_dl"] = r.fit.mu_hat;
  est["se_mu_dl"] = r.fit.se_mu;
  est["mu_reml"] = r.fit.mu_reml;
  est["q"] = r.fit.q;
  est["tau2_udl"] = r.fit.tau2_udl;
  est["tau2_dl"] = r.fit.tau2_dl;
  est["tau2_reml"] = r.fit.tau2_reml;
  est["reml_converged"] = r.fit.reml_converged;
  est["i2_percent"] = r.fit.i2;
  est["p_heterogeneity"] = r.fit.p_het;
  j["estimates"] = est;

  nlohmann::ordered_json intervals = nlohmann::ordered_json::array();
  {
    nlohmann::ordered_json ci;
    ci["kind"] = "ci_mean";
    ci["method"] = "DL";
    ci["lower"] = r.ci_dl.lower;
    ci["upper"] = r.ci_dl.upper;
    ci["width"] = r.ci_dl.width();
    intervals.push_back(ci);
  }
  for (const MethodEntry& e : r.intervals) {
    nlohmann::ordered_json pi;
    pi["kind"] = "prediction";
    pi["method"] = method_name(e.method);
    if (e.result) {
      pi["available"] = true;
      pi["lower"] = e.result->lower;
      pi["upper"] = e.result->upper;
      pi["width"] = e.result->width;
      pi["center"] = e.result->center;
      pi["tau2_used"] = e.result->tau2_used;
      if (e.method == Method::proposed) {
        pi["b"] = e.result->b;
        pi["zero_fraction"] = e.result->zero_fraction;
      }
    } else {
      pi["available"] = false;
      pi["reason"] = e.unavailable_reason;
    }
    intervals.push_back(pi);
  }
  j["intervals"] = intervals;

  nlohmann::ordered_json settings;
  settings["alpha"] = r.settings.alpha;
  settings["B"] = r.settings.b;
  settings["seed"] = r.settings.seed;
  j["settings"] = settings;

  return j.dump(2) + "\n";
}

std::string render_forest_csv(const AnalysisReport& r, const StudySet& s) {
  const boost::math::normal_distribution<> norm;
  const double zq = boost::math::quantile(norm, 1.0 - r.settings.alpha / 2.0);

  std::ostringstream os;
  os << "kind,label,estimate,lower,upper,method\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::string label =
        s.labels().empty() ? "study " + std::to_string(i + 1) : s.labels()[i];
    const double se = std::sqrt(s.sigma2()[i]);
    os << "study," << label << "," << s.y()[i] << "," << s.y()[i] - zq * se << ","
       << s.y()[i] + zq * se << ",\n";
  }
  os << "summary,mean CI (DL)," << r.fit.mu_hat << "," << r.ci_dl.lower << ","
     << r.ci_dl.upper << ",CI-DL\n";
  for (const MethodEntry& e : r.intervals) {
    if (!e.result) continue;
    os << "summary,PI " << method_name(e.method) << "," << e.result->center << ","
       << e.result->lower << "," << e.result->upper << "," << method_name(e.method)
       << "\n";
  }
  return os.str();
}

}  // namespace metapred
