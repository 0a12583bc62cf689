#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metapred/estimators.hpp"
#include "metapred/predint.hpp"
#include "metapred/study_set.hpp"

namespace metapred {

struct AnalyzeOptions {
  double alpha = 0.05;
  int b = 50000;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct MethodEntry {
  Method method;
  std::optional<PredictionResult> result;  // empty when not applicable
  std::string unavailable_reason;
};

// One analysis run: point estimates, heterogeneity measures, the mean
// confidence interval and all four prediction intervals.
struct AnalysisReport {
  std::size_t k = 0;
  bool continuity_corrected = false;
  HeterogeneityFit fit;
  Interval ci_dl;
  std::vector<MethodEntry> intervals;  // Proposed, HTS, HTS-HK, HTS-SJ
  AnalyzeOptions settings;
};

AnalysisReport analyze(const StudySet& s, const AnalyzeOptions& opt,
                       bool continuity_corrected = false);

// Plain-text summary table (four decimal places).
std::string render_table(const AnalysisReport& report);

// Stable JSON document; schema field "metapredict-analysis/1".
std::string render_json(const AnalysisReport& report, const StudySet& s);

// Forest-plot data: kind,label,estimate,lower,upper,method. One "study"
// row per study (estimate and its normal-theory CI at the report's
// alpha) followed by "summary" rows for the mean CI and each interval.
std::string render_forest_csv(const AnalysisReport& report, const StudySet& s);

}  // namespace metapred
