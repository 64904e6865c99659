#include "relflow/flex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace relflow {

std::optional<Rational> weighted_length(const SaddleConnectionQ& sc, const RelVector& a) {
  if (sign(sc.holonomy.y) != 0)
    throw ValidationError("NotHorizontal: weighted length needs a horizontal connection");
  Rational b = rel_cocycle_eval(a, sc.from_label, sc.to_label);
  if (sign(b) == 0) return std::nullopt;
  Rational len = abs(sc.holonomy.x);
  return len / b;
}

namespace {

// Canonical primitive integer vector spanning the same oriented ray.
Vec2<Rational> primitive_direction(const Vec2<Rational>& v) {
  BigInt den_lcm;
  mpz_lcm(den_lcm.get_mpz_t(), v.x.get_den().get_mpz_t(), v.y.get_den().get_mpz_t());
  Rational f(den_lcm);
  BigInt nx = BigInt(Rational(v.x * f).get_num());
  BigInt ny = BigInt(Rational(v.y * f).get_num());
  BigInt g;
  mpz_gcd(g.get_mpz_t(), nx.get_mpz_t(), ny.get_mpz_t());
  return {Rational(nx / g), Rational(ny / g)};
}

bool lex_less(const Vec2<Rational>& a, const Vec2<Rational>& b) {
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}
bool lex_less(const Vec2<double>& a, const Vec2<double>& b) {
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

}  // namespace

template <>
std::vector<DirectionClass<Rational>> direction_classes(
    const std::vector<SaddleConnectionQ>& all) {
  std::map<std::pair<std::string, std::string>, DirectionClass<Rational>> groups;
  for (size_t i = 0; i < all.size(); ++i) {
    Vec2<Rational> d = primitive_direction(all[i].holonomy);
    auto key = std::make_pair(to_string(d.x), to_string(d.y));
    auto it = groups.find(key);
    if (it == groups.end()) {
      DirectionClass<Rational> cls;
      cls.direction = d;
      cls.min_length2 = all[i].length2();
      cls.members = {static_cast<int>(i)};
      groups.emplace(key, std::move(cls));
    } else {
      it->second.members.push_back(static_cast<int>(i));
      it->second.min_length2 = std::min(it->second.min_length2, all[i].length2());
    }
  }
  std::vector<DirectionClass<Rational>> out;
  for (auto& [_, cls] : groups) out.push_back(std::move(cls));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.min_length2 != b.min_length2) return a.min_length2 < b.min_length2;
    return lex_less(a.direction, b.direction);
  });
  return out;
}

template <>
std::vector<DirectionClass<double>> direction_classes(const std::vector<SaddleConnectionD>& all) {
  // Sort by angle and sweep-merge within the fixed relative tolerance.
  std::vector<int> idx(all.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto angle = [&](int i) { return std::atan2(all[i].holonomy.y, all[i].holonomy.x); };
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    double da = angle(a), db = angle(b);
    if (da != db) return da < db;
    return a < b;
  });
  std::vector<DirectionClass<double>> out;
  for (int i : idx) {
    bool merged = false;
    if (!out.empty()) {
      DirectionClass<double>& last = out.back();
      if (cross_sign(last.direction, all[i].holonomy) == 0 &&
          dot(last.direction, all[i].holonomy) > 0) {
        last.members.push_back(i);
        last.min_length2 = std::min(last.min_length2, all[i].length2());
        if (norm2(all[i].holonomy) > norm2(last.direction)) last.direction = all[i].holonomy;
        merged = true;
      }
    }
    if (!merged) {
      DirectionClass<double> cls;
      cls.direction = all[i].holonomy;
      cls.min_length2 = all[i].length2();
      cls.members = {i};
      out.push_back(std::move(cls));
    }
  }
  // Wrap-around: the first and last angular groups may be one class.
  if (out.size() > 1) {
    DirectionClass<double>& first = out.front();
    DirectionClass<double>& last = out.back();
    if (cross_sign(first.direction, last.direction) == 0 &&
        dot(first.direction, last.direction) > 0) {
      for (int m : last.members) first.members.push_back(m);
      first.min_length2 = std::min(first.min_length2, last.min_length2);
      if (norm2(last.direction) > norm2(first.direction)) first.direction = last.direction;
      out.pop_back();
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.min_length2 != b.min_length2) return a.min_length2 < b.min_length2;
    return lex_less(a.direction, b.direction);
  });
  return out;
}

bool has_cycle(const WeightGraph& g) {
  std::map<int, int> parent;
  std::function<int(int)> find = [&](int x) {
    auto it = parent.find(x);
    if (it == parent.end() || it->second == x) {
      parent[x] = x;
      return x;
    }
    return parent[x] = find(it->second);
  };
  for (const auto& [u, v] : g.edges) {
    if (u == v) return true;
    int ru = find(u), rv = find(v);
    if (ru == rv) return true;
    parent[ru] = rv;
  }
  return false;
}

template <class R>
WeightGraph minimal_weight_graph(const FlatSurface<R>& s, const RelVector& a,
                                 const DirectionClass<R>& cls,
                                 const std::vector<SaddleConnection<R>>& all) {
  // Compare w = (hol . d) / b among members with b > 0; the common positive
  // factor 1/|d| does not affect the ordering.
  WeightGraph g;
  g.k = s.n_vertices();
  struct Entry {
    int index;
    R num;  // hol . d  (positive for members)
    R den;  // b
  };
  std::vector<Entry> candidates;
  for (int m : cls.members) {
    const SaddleConnection<R>& sc = all[m];
    Rational b = rel_cocycle_eval(a, sc.from_label, sc.to_label);
    if (sign(b) <= 0) continue;  // infinite, or grows under the flow
    R num = dot(sc.holonomy, cls.direction);
    R den;
    if constexpr (is_exact_v<R>)
      den = b;
    else
      den = to_double(b);
    candidates.push_back({m, num, den});
  }
  if (candidates.empty()) return g;

  auto weight_less = [](const Entry& x, const Entry& y) {
    // x.num/x.den < y.num/y.den with positive denominators
    return x.num * y.den < y.num * x.den;
  };
  auto weight_tie = [](const Entry& x, const Entry& y) {
    if constexpr (is_exact_v<R>) {
      return x.num * y.den == y.num * x.den;
    } else {
      double l = x.num * y.den, r = y.num * x.den;
      return std::fabs(l - r) <= kFloatTol * std::max(std::fabs(l), std::fabs(r));
    }
  };
  const Entry* best = &candidates[0];
  for (const Entry& e : candidates)
    if (weight_less(e, *best)) best = &e;
  for (const Entry& e : candidates) {
    if (!weight_tie(e, *best)) continue;
    const SaddleConnection<R>& sc = all[e.index];
    g.edges.push_back({sc.from_label, sc.to_label});
    g.members.push_back(e.index);
  }
  return g;
}

template <class R>
FlexibilityWitness flexibility_witness(const FlatSurface<R>& s, const RelVector& a,
                                       const R& length2, const TraceBudget& budget) {
  require_valid(s);
  if (a.k() != s.n_vertices())
    throw UsageError("RelVector length does not match the number of labeled points");
  if (a.is_zero()) throw UsageError("NoAdmissibleRelVector: the REL direction must be nonzero");

  std::vector<SaddleConnection<R>> all = saddle_connections(s, length2, budget);
  std::vector<DirectionClass<R>> classes = direction_classes(all);
  FlexibilityWitness w;
  if constexpr (is_exact_v<R>)
    w.length2_bound = length2;
  else
    w.length2_bound_d = length2;
  for (const DirectionClass<R>& cls : classes) {
    WeightGraph g = minimal_weight_graph(s, a, cls, all);
    if (g.empty() || has_cycle(g)) continue;
    w.flexible = true;
    if constexpr (is_exact_v<R>)
      w.direction_q = cls.direction;
    else
      w.direction_d = cls.direction;
    w.graph = std::move(g);
    return w;
  }
  return w;
}

std::vector<IsolatedBigon> find_isolated_bigons(const FlatSurfaceQ& s, const Rational& length2,
                                                const TraceBudget& budget) {
  require_valid(s);
  std::vector<SaddleConnectionQ> all = saddle_connections(s, length2, budget);
  std::vector<IsolatedBigon> out;

  // Families keyed by endpoints and exact holonomy; east-side orientation
  // only, so each geometric pair is considered once.
  auto east = [](const Vec2<Rational>& v) {
    return sign(v.x) > 0 || (sign(v.x) == 0 && sign(v.y) > 0);
  };
  std::map<std::tuple<int, int, std::string, std::string>, std::vector<int>> families;
  for (size_t i = 0; i < all.size(); ++i) {
    const SaddleConnectionQ& sc = all[i];
    if (sc.from_label == sc.to_label || !east(sc.holonomy)) continue;
    families[{sc.from_label, sc.to_label, to_string(sc.holonomy.x), to_string(sc.holonomy.y)}]
        .push_back(static_cast<int>(i));
  }

  for (auto& [key, members] : families) {
    if (members.size() != 2) continue;
    const SaddleConnectionQ& sc1 = all[members[0]];
    // Isolation: no other connection between the same ordered endpoints,
    // parallel to the pair and at most as long, may collapse first.
    bool isolated = true;
    for (size_t i = 0; i < all.size() && isolated; ++i) {
      if (static_cast<int>(i) == members[0] || static_cast<int>(i) == members[1]) continue;
      const SaddleConnectionQ& sc = all[i];
      if (sc.from_label != sc1.from_label || sc.to_label != sc1.to_label) continue;
      if (!same_direction(sc.holonomy, sc1.holonomy)) continue;
      if (sc.length2() <= sc1.length2()) isolated = false;
    }
    if (!isolated) continue;

    // Normalize the direction to horizontal with an exact rotation-scaling
    // and collapse; the pair is the unique minimal shrinking family.
    const Vec2<Rational>& d = sc1.holonomy;
    FlatSurfaceQ normalized = gl2_action(d.x, d.y, -d.y, d.x, s);
    std::vector<Rational> weights(s.n_vertices(), Rational(0));
    weights[sc1.from_label - 1] = -1;
    weights[sc1.to_label - 1] = 1;
    RelVector a{std::move(weights)};
    Rational horizontal_len = norm2(d);  // image of the pair: (|d|^2, 0)
    FlowOutcome fo = rel_flow(normalized, a, horizontal_len, FlowOptions{});
    if (!fo.boundary || fo.degeneration.kind != Degeneration::Kind::InfiniteFace) continue;
    if (fo.elapsed * 2 != horizontal_len)
      throw ValidationError("internal: bigon collapse time disagrees with its length");

    IsolatedBigon b;
    b.sc1 = members[0];
    b.sc2 = members[1];
    b.holonomy = sc1.holonomy;
    b.from_label = sc1.from_label;
    b.to_label = sc1.to_label;
    b.genus1 = fo.degeneration.genus1;
    b.genus2 = fo.degeneration.genus2;
    b.collapse = std::move(fo.degeneration);
    out.push_back(std::move(b));
  }
  return out;
}

template WeightGraph minimal_weight_graph(const FlatSurfaceQ&, const RelVector&,
                                          const DirectionClass<Rational>&,
                                          const std::vector<SaddleConnectionQ>&);
template WeightGraph minimal_weight_graph(const FlatSurfaceD&, const RelVector&,
                                          const DirectionClass<double>&,
                                          const std::vector<SaddleConnectionD>&);
template FlexibilityWitness flexibility_witness(const FlatSurfaceQ&, const RelVector&,
                                                const Rational&, const TraceBudget&);
template FlexibilityWitness flexibility_witness(const FlatSurfaceD&, const RelVector&,
                                                const double&, const TraceBudget&);

}  // namespace relflow
