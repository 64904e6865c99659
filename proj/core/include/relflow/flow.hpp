#pragma once

#include <optional>
#include <vector>

#include "relflow/homology.hpp"
#include "relflow/surface.hpp"
#include "relflow/tracing.hpp"

namespace relflow {

// Classification of a boundary hit. A forest of collapsing saddle
// connections merges groups of zeros (a finite face of the principal
// boundary); a separating homologous pair splits the surface at a node into
// two components (an infinite core face). Anything else is reported as
// Unclassified with a reason.
struct Degeneration {
  enum class Kind { FiniteFace, InfiniteFace, Unclassified };
  Kind kind = Kind::Unclassified;
  std::string reason;  // Unclassified only

  // FiniteFace: groups of original labels that coalesced (size >= 2) with
  // the resulting zero order per group, and the collapsed surface.
  std::vector<std::vector<int>> merged_groups;
  std::vector<int> merged_orders;
  std::optional<FlatSurfaceQ> collapsed;

  // InfiniteFace: two components with the node as a marked point; type
  // (genus1, genus2) with genus1 >= genus2.
  int genus1 = 0, genus2 = 0;
  std::vector<FlatSurfaceQ> components;
  std::vector<int> node_vertex;      // node vertex id per component
  std::vector<bool> node_regular;    // node is not a zero of the component
};

struct FlowOutcome {
  bool boundary = false;
  // Finished: t_target and the deformed surface. BoundaryHit: t* and the
  // collapse data; the surface at t* is not returned because its collapsing
  // edges have length zero.
  Rational elapsed;
  std::optional<FlatSurfaceQ> surface;

  std::vector<int> collapsing;  // canonical edge ids in the final combinatorics
  Degeneration degeneration;
  std::optional<FlatSurfaceQ> before;  // valid surface strictly before t*
  Rational dt_before;                  // t* minus the time of `before`

  std::vector<FlipRecord> flips;  // transcript for homology transport
  long events = 0;
};

struct FlowOptions {
  long event_budget = 1'000'000;
  bool classify = true;
  // Deformation direction of the Schiffer slide; (1,0) is the real REL flow,
  // other exact unit-circle points realize the rotated flows.
  Vec2<Rational> direction{1, 0};
};

// Event-driven flow of the REL vector field: each half-edge holonomy moves
// linearly, hol(h)(t) = hol(h) - t * (a(head) - a(tail)) * direction, so an
// east-oriented horizontal connection between labels with weight difference
// b > 0 shrinks at rate b. Triangle areas are linear in t; at each event
// either a triangulation edge reaches zero length (boundary hit at t*,
// collapsing edges collected and classified) or the degenerate triangles
// are repaired by flips and the flow continues.
FlowOutcome rel_flow(const FlatSurfaceQ& s, const RelVector& a, const Rational& t_target,
                     const FlowOptions& opt = {});

// Independent oracle for the boundary-hit time: the minimum positive
// oriented a-weighted length over east-pointing horizontal saddle
// connections of squared length at most length2. std::nullopt means no
// horizontal connection shrinks (the flow line is complete up to length2).
std::optional<Rational> collapse_time(const FlatSurfaceQ& s, const RelVector& a,
                                      const Rational& length2, const TraceBudget& budget = {});

// The rotated flow: conjugation of the REL flow by an exact rotation,
// implemented natively by flowing along direction (r.c, -r.s). Equals
// rotate(r^-1) . rel_flow . rotate(r) exactly.
FlowOutcome conjugated_rel_flow(const FlatSurfaceQ& s, const RelVector& a,
                                const UnitRotation& r, const Rational& t_target,
                                const FlowOptions& opt = {});

// Classifies a boundary hit from a valid surface strictly before the
// collapse: holonomies advance by dt (along `direction`, with weights a),
// after which every edge in `collapsing` must have zero holonomy.
Degeneration classify_degeneration(const FlatSurfaceQ& before, const RelVector& a,
                                   const Vec2<Rational>& direction, const Rational& dt,
                                   const std::vector<int>& collapsing);

}  // namespace relflow
