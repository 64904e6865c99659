#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "relflow/surface.hpp"

namespace relflow {

struct ExploreOptions {
  int trials = 100;
  uint64_t seed = 0;
  Rational length2 = Rational(4);  // bigon search bound (squared length)
  int workers = 0;                 // 0 = hardware concurrency
};

// Randomized principal-boundary probe: each trial perturbs the base surface
// by a random GL+(2,Q) matrix and a random REL displacement (half the
// predicted collapse time), then finds isolated bigons and collapses each,
// tallying the face types reached. Trials derive independent generators
// from (seed, index), so the report is reproducible bit for bit regardless
// of scheduling.
struct ExploreReport {
  int trials = 0;
  uint64_t seed = 0;
  std::map<std::pair<int, int>, int> face_counts;  // (g1, g2) -> collapses
  int trials_with_bigon = 0;
  int budget_errors = 0;

  std::string table() const;
  std::string to_json() const;
};

ExploreReport explore(const FlatSurfaceQ& base, const ExploreOptions& opt);

}  // namespace relflow
