#include "metapred/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <map>
#include <vector>

#include "metapred/errors.hpp"

namespace metapred {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::string& name, std::size_t line, const std::string& what) {
  throw data_error(name + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& field, const std::string& name, std::size_t line) {
  double value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    fail(name, line, "cannot parse number '" + field + "'");
  return value;
}

std::int64_t parse_int(const std::string& field, const std::string& name, std::size_t line) {
  std::int64_t value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    fail(name, line, "cannot parse integer '" + field + "'");
  return value;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Maps header names to column indices; all expected names must be
// present and nothing else.
std::map<std::string, std::size_t> read_header(std::istream& in, const std::string& name,
                                               std::size_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) fail(name, 1, "empty file, expected a header row");
  line_no = 1;
  std::map<std::string, std::size_t> cols;
  const auto fields = split_fields(line);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string key = lower(fields[i]);
    if (key.empty()) fail(name, 1, "empty header column");
    if (!cols.emplace(key, i).second) fail(name, 1, "duplicate header column '" + key + "'");
  }
  return cols;
}

}  // namespace

StudySet read_effects_csv(std::istream& in, const std::string& name) {
  std::size_t line_no = 0;
  const auto cols = read_header(in, name, line_no);

  if (!cols.count("study") || !cols.count("y"))
    fail(name, 1, "expected header study,y,se or study,y,v");
  const bool has_se = cols.count("se") > 0;
  const bool has_v = cols.count("v") > 0;
  if (has_se == has_v)
    fail(name, 1, "exactly one of the columns 'se' and 'v' must be present");
  if (cols.size() != 3) fail(name, 1, "unexpected extra columns");
  const std::size_t scale_col = has_se ? cols.at("se") : cols.at("v");

  std::vector<std::string> labels;
  std::vector<double> y, s2;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) fail(name, line_no, "expected 3 fields");
    labels.push_back(fields[cols.at("study")]);
    y.push_back(parse_double(fields[cols.at("y")], name, line_no));
    const double scale = parse_double(fields[scale_col], name, line_no);
    if (!(scale > 0.0))
      fail(name, line_no, std::string(has_se ? "se" : "v") + " must be > 0");
    s2.push_back(has_se ? scale * scale : scale);
  }
  if (y.size() < 2) fail(name, line_no, "need at least 2 studies");
  try {
    return StudySet(std::move(y), std::move(s2), std::move(labels));
  } catch (const data_error& e) {
    throw data_error(name + ": " + e.what());
  }
}

TwoByTwoSet read_counts_csv(std::istream& in, const std::string& name) {
  std::size_t line_no = 0;
  const auto cols = read_header(in, name, line_no);

  for (const char* key : {"study", "x1", "n1", "x0", "n0"})
    if (!cols.count(key)) fail(name, 1, "expected header study,x1,n1,x0,n0");
  if (cols.size() != 5) fail(name, 1, "unexpected extra columns");

  std::vector<std::string> labels;
  std::vector<std::int64_t> x1, n1, x0, n0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 5) fail(name, line_no, "expected 5 fields");
    labels.push_back(fields[cols.at("study")]);
    x1.push_back(parse_int(fields[cols.at("x1")], name, line_no));
    n1.push_back(parse_int(fields[cols.at("n1")], name, line_no));
    x0.push_back(parse_int(fields[cols.at("x0")], name, line_no));
    n0.push_back(parse_int(fields[cols.at("n0")], name, line_no));
  }
  try {
    return TwoByTwoSet(std::move(x1), std::move(n1), std::move(x0), std::move(n0),
                       std::move(labels));
  } catch (const data_error& e) {
    throw data_error(name + ": " + e.what());
  }
}

}  // namespace metapred
