#include "metapred/study_set.hpp"

#include <cassert>
#include <cmath>

#include "metapred/errors.hpp"

namespace metapred {

StudySet::StudySet(std::vector<double> y, std::vector<double> sigma2,
                   std::vector<std::string> labels)
    : y_(std::move(y)), sigma2_(std::move(sigma2)), labels_(std::move(labels)) {
  if (y_.size() != sigma2_.size())
    throw data_error("StudySet: y and sigma2 lengths differ");
  if (y_.size() < 2)
    throw data_error("StudySet: need at least 2 studies");
  if (!labels_.empty() && labels_.size() != y_.size())
    throw data_error("StudySet: label count does not match study count");
  for (std::size_t i = 0; i < y_.size(); ++i) {
    if (!std::isfinite(y_[i]))
      throw data_error("StudySet: non-finite effect in study " + std::to_string(i + 1));
    if (!std::isfinite(sigma2_[i]) || sigma2_[i] <= 0.0)
      throw data_error("StudySet: within-study variance must be finite and > 0 (study " +
                       std::to_string(i + 1) + ")");
  }
}

TwoByTwoSet::TwoByTwoSet(std::vector<std::int64_t> x1_, std::vector<std::int64_t> n1_,
                         std::vector<std::int64_t> x0_, std::vector<std::int64_t> n0_,
                         std::vector<std::string> labels_)
    : x1(std::move(x1_)), n1(std::move(n1_)), x0(std::move(x0_)), n0(std::move(n0_)),
      labels(std::move(labels_)) {
  const std::size_t k = x1.size();
  if (n1.size() != k || x0.size() != k || n0.size() != k)
    throw data_error("TwoByTwoSet: column lengths differ");
  if (!labels.empty() && labels.size() != k)
    throw data_error("TwoByTwoSet: label count does not match table count");
  for (std::size_t i = 0; i < k; ++i) {
    if (n1[i] < 1 || n0[i] < 1)
      throw data_error("TwoByTwoSet: group sizes must be >= 1 (table " +
                       std::to_string(i + 1) + ")");
    if (x1[i] < 0 || x0[i] < 0 || x1[i] > n1[i] || x0[i] > n0[i])
      throw data_error("TwoByTwoSet: event counts must satisfy 0 <= x <= n (table " +
                       std::to_string(i + 1) + ")");
  }
}

bool TwoByTwoSet::has_zero_cell() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (x1[i] == 0 || x0[i] == 0 || x1[i] == n1[i] || x0[i] == n0[i]) return true;
  }
  return false;
}

StudySet from_counts(const TwoByTwoSet& tables) {
  const std::size_t k = tables.size();
  if (k < 2) throw data_error("from_counts: need at least 2 tables");

  const double add = tables.has_zero_cell() ? 0.5 : 0.0;
  std::vector<double> y(k), s2(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double a = static_cast<double>(tables.x1[i]) + add;
    const double b = static_cast<double>(tables.n1[i] - tables.x1[i]) + add;
    const double c = static_cast<double>(tables.x0[i]) + add;
    const double d = static_cast<double>(tables.n0[i] - tables.x0[i]) + add;
    assert(a > 0.0 && b > 0.0 && c > 0.0 && d > 0.0);
    y[i] = std::log((a * d) / (b * c));
    s2[i] = 1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d;
  }
  return StudySet(std::move(y), std::move(s2), tables.labels);
}

}  // namespace metapred
