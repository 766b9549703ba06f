#pragma once

#include <cstdint>
#include <vector>

namespace mumimo::acceptance {

struct Options {
  std::vector<int> only;  // criterion numbers to run; empty = all (1..11)
  bool quick = false;     // smoke profile: shrunken grids and trial counts
  std::uint64_t seed = 2026;
};

// Runs the acceptance criteria, printing one PASS/FAIL line per criterion
// with timing. Returns the number of failed criteria.
int run_criteria(const Options& opts);

}  // namespace mumimo::acceptance
