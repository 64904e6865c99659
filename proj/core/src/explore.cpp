#include "relflow/explore.hpp"

#include <future>
#include <random>
#include <sstream>
#include <thread>

#include "relflow/flex.hpp"
#include "relflow/flow.hpp"

namespace relflow {

namespace {

struct TrialResult {
  std::map<std::pair<int, int>, int> face_counts;
  bool found_bigon = false;
  bool budget_error = false;
};

Rational small_rational(std::mt19937_64& rng, int num_lo, int num_hi, int den_hi) {
  std::uniform_int_distribution<int> num(num_lo, num_hi);
  std::uniform_int_distribution<int> den(1, den_hi);
  return Rational(num(rng), den(rng));
}

TrialResult run_trial(const FlatSurfaceQ& base, uint64_t seed, int index,
                      const Rational& length2) {
  std::seed_seq seq{seed, static_cast<uint64_t>(index)};
  std::mt19937_64 rng(seq);
  TrialResult out;

  // Random GL+(2,Q): shear * shear * positive diagonal.
  Rational p = small_rational(rng, -1, 1, 3);
  Rational q = small_rational(rng, -1, 1, 3);
  Rational d1 = 1 + small_rational(rng, 0, 1, 4);
  Rational d2 = 1 + small_rational(rng, 0, 1, 4);
  // M = [[1, p], [0, 1]] * [[1, 0], [q, 1]] * diag(d1, d2)
  Rational a = (1 + p * q) * d1, b = p * d2, c = q * d1, d = d2;
  FlatSurfaceQ s = gl2_action(a, b, c, d, base);

  // Random REL displacement to half the predicted collapse time.
  std::vector<Rational> weights;
  Rational sum(0);
  for (int i = 0; i + 1 < s.n_vertices(); ++i) {
    Rational wi = small_rational(rng, -2, 2, 3);
    weights.push_back(wi);
    sum += wi;
  }
  weights.push_back(-sum);
  RelVector rel{std::move(weights)};
  try {
    if (!rel.is_zero()) {
      auto tc = collapse_time(s, rel, length2);
      Rational t = tc ? *tc / 2 : Rational(1, 8);
      FlowOutcome fo = rel_flow(s, rel, t);
      if (!fo.boundary) s = *fo.surface;
    }
    for (const IsolatedBigon& bg : find_isolated_bigons(s, length2)) {
      out.found_bigon = true;
      std::pair<int, int> type{bg.genus1, bg.genus2};
      out.face_counts[type] += 1;
    }
  } catch (const BudgetError&) {
    out.budget_error = true;
  }
  return out;
}

}  // namespace

ExploreReport explore(const FlatSurfaceQ& base, const ExploreOptions& opt) {
  require_valid(base);
  ExploreReport rep;
  rep.trials = opt.trials;
  rep.seed = opt.seed;

  int workers = opt.workers > 0 ? opt.workers
                                : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, std::max(1, opt.trials));

  std::vector<std::future<std::vector<TrialResult>>> futures;
  for (int w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      std::vector<TrialResult> results;
      for (int i = w; i < opt.trials; i += workers)
        results.push_back(run_trial(base, opt.seed, i, opt.length2));
      return results;
    }));
  }
  for (auto& f : futures) {
    for (TrialResult& r : f.get()) {
      for (auto& [type, count] : r.face_counts) rep.face_counts[type] += count;
      if (r.found_bigon) ++rep.trials_with_bigon;
      if (r.budget_error) ++rep.budget_errors;
    }
  }
  return rep;
}

std::string ExploreReport::table() const {
  std::ostringstream os;
  os << "trials: " << trials << "\n";
  os << "seed: " << seed << "\n";
  os << "trials with isolated bigon: " << trials_with_bigon << "\n";
  os << "budget errors: " << budget_errors << "\n";
  os << "face type   collapses\n";
  for (const auto& [type, count] : face_counts)
    os << "(" << type.first << "," << type.second << ")       " << count << "\n";
  return os.str();
}

std::string ExploreReport::to_json() const {
  std::ostringstream os;
  os << "{\"trials\":" << trials << ",\"seed\":" << seed << ",\"trials_with_bigon\":"
     << trials_with_bigon << ",\"budget_errors\":" << budget_errors << ",\"faces\":[";
  bool first = true;
  for (const auto& [type, count] : face_counts) {
    if (!first) os << ",";
    first = false;
    os << "{\"type\":[" << type.first << "," << type.second << "],\"count\":" << count << "}";
  }
  os << "]}";
  return os.str();
}

}  // namespace relflow
