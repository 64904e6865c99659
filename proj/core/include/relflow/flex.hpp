#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "relflow/flow.hpp"
#include "relflow/homology.hpp"
#include "relflow/surface.hpp"
#include "relflow/tracing.hpp"

namespace relflow {

// Oriented a-weighted length of a horizontal saddle connection: length / b
// with b the weight of the head minus the weight of the tail. std::nullopt
// encodes infinity (b = 0, e.g. loops); negative values mean the connection
// grows under the flow. Throws NotHorizontal when hol.y != 0.
std::optional<Rational> weighted_length(const SaddleConnectionQ& sc, const RelVector& a);

// Saddle connections grouped by oriented direction. In the exact backend
// classes are exact projective rational rays; in the float backend two
// directions merge when |cross| <= 1e-9 |u||v|.
template <class R>
struct DirectionClass {
  Vec2<R> direction;             // primitive representative
  std::vector<int> members;      // indices into the connection list
  R min_length2;                 // shortest member, for deterministic order
};

template <class R>
std::vector<DirectionClass<R>> direction_classes(const std::vector<SaddleConnection<R>>& all);
template <>
std::vector<DirectionClass<Rational>> direction_classes(const std::vector<SaddleConnectionQ>& all);
template <>
std::vector<DirectionClass<double>> direction_classes(const std::vector<SaddleConnectionD>& all);

// Multigraph on zero labels used by the flexibility test.
struct WeightGraph {
  int k = 0;
  std::vector<std::pair<int, int>> edges;  // (from_label, to_label)
  std::vector<int> members;                // connection indices, parallel to edges
  bool empty() const { return edges.empty(); }
};

// Undirected cycle test; parallel edges count as a 2-cycle, self-loops as a
// 1-cycle.
bool has_cycle(const WeightGraph& g);

// The subgraph of the class achieving the minimal positive a-weighted
// length (the tie set enters whole); empty when no member has finite
// positive weight. Weighted lengths for a general direction use the
// component of the holonomy along the class direction.
template <class R>
WeightGraph minimal_weight_graph(const FlatSurface<R>& s, const RelVector& a,
                                 const DirectionClass<R>& cls,
                                 const std::vector<SaddleConnection<R>>& all);

struct FlexibilityWitness {
  bool flexible = false;
  Vec2<Rational> direction_q;  // exact backend
  Vec2<double> direction_d;    // float backend
  WeightGraph graph;
  Rational length2_bound;      // the scanned bound (RigidUpTo when !flexible)
  double length2_bound_d = 0;
};

// Scans every direction class with length <= sqrt(length2) in deterministic
// order (min length^2, then lexicographic direction) and returns the first
// whose minimal weight graph is nonempty and acyclic. A rigid verdict only
// certifies rigidity up to the bound.
template <class R>
FlexibilityWitness flexibility_witness(const FlatSurface<R>& s, const RelVector& a,
                                       const R& length2, const TraceBudget& budget = {});

struct IsolatedBigon {
  int sc1 = -1, sc2 = -1;       // connection indices (from the enumeration)
  Vec2<Rational> holonomy;
  int from_label = 0, to_label = 0;
  int genus1 = 0, genus2 = 0;   // type, genus1 >= genus2
  Degeneration collapse;        // InfiniteFace carrying the two components
};

// Pairs of saddle connections with the same endpoints and holonomy, no
// third parallel connection between the same endpoints that is at most as
// long, whose collapse separates the surface. Each pair is reported once
// (east-side orientation) with its type, obtained by normalizing the
// direction with an exact rotation-scaling and flowing to the boundary.
std::vector<IsolatedBigon> find_isolated_bigons(const FlatSurfaceQ& s, const Rational& length2,
                                                const TraceBudget& budget = {});

extern template FlexibilityWitness flexibility_witness(const FlatSurfaceQ&, const RelVector&,
                                                       const Rational&, const TraceBudget&);
extern template FlexibilityWitness flexibility_witness(const FlatSurfaceD&, const RelVector&,
                                                       const double&, const TraceBudget&);

}  // namespace relflow
