#pragma once

#include <stdexcept>
#include <string>

namespace metapred {

// Invalid or inconsistent input data (bad CSV, bad study values).
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine failed to reach its accuracy target.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// An interval method does not apply to this data set (e.g. K too small,
// degenerate leverage).
class method_error : public std::runtime_error {
 public:
  explicit method_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace metapred
