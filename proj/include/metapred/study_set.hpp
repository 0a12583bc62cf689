#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace metapred {

// One meta-analysis data set: per-study effect estimates y_k and
// within-study variances sigma2_k, treated as known constants.
// Immutable after construction.
class StudySet {
 public:
  StudySet(std::vector<double> y, std::vector<double> sigma2,
           std::vector<std::string> labels = {});

  std::size_t size() const { return y_.size(); }
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& sigma2() const { return sigma2_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<double> y_;
  std::vector<double> sigma2_;
  std::vector<std::string> labels_;  // empty, or one per study
};

// Per-study 2x2 event counts: x events out of n in each arm.
struct TwoByTwoSet {
  std::vector<std::int64_t> x1, n1, x0, n0;

  TwoByTwoSet(std::vector<std::int64_t> x1, std::vector<std::int64_t> n1,
              std::vector<std::int64_t> x0, std::vector<std::int64_t> n0,
              std::vector<std::string> labels = {});

  std::size_t size() const { return x1.size(); }

  // True if any of the four cells (events / non-events per arm) of any
  // table is zero.
  bool has_zero_cell() const;

  std::vector<std::string> labels;
};

// Log odds-ratio effects from 2x2 tables, with the all-tables
// continuity rule: if any cell of any table is zero, 0.5 is added to
// every cell of all K tables before computing both y_k and sigma2_k.
StudySet from_counts(const TwoByTwoSet& tables);

}  // namespace metapred
