#pragma once

#include <iosfwd>
#include <string>

#include "metapred/study_set.hpp"

namespace metapred {

// Effects CSV: header `study,y,se` or `study,y,v` (exactly one of
// se/v), comma separated, '.' decimal. Parse errors carry file and
// line numbers.
StudySet read_effects_csv(std::istream& in, const std::string& name);

// Counts CSV: header `study,x1,n1,x0,n0`.
TwoByTwoSet read_counts_csv(std::istream& in, const std::string& name);

}  // namespace metapred
