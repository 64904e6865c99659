#pragma once

#include <optional>
#include <vector>

#include "relflow/homology.hpp"
#include "relflow/surface.hpp"

namespace relflow {

template <class R>
struct PathStep {
  int entry_half_edge;  // half-edge of the entered triangle crossed by the segment
  R u;                  // crossing point = tail + u * hol(entry_half_edge), u in (0,1)
};

// Straight flat geodesic segment between cone points with no cone point in
// its interior. Oriented; the reverse orientation is a distinct value.
template <class R>
struct SaddleConnection {
  Vec2<R> holonomy;
  int from_vertex = -1, to_vertex = -1;  // vertex ids
  int from_label = 0, to_label = 0;
  int start_corner = -1;  // outgoing half-edge whose sector contains the direction
  std::vector<PathStep<R>> path;
  // Edge path from tail to head homotopic to the segment (its left
  // boundary); evaluates to `holonomy` on the holonomy cocycle.
  Chain left_chain;
  R length2() const { return norm2(holonomy); }
};

using SaddleConnectionQ = SaddleConnection<Rational>;
using SaddleConnectionD = SaddleConnection<double>;

struct TraceBudget {
  long max_steps = 2'000'000;
};

// The corner at vertex v whose half-open sector [hol(h), -hol(prev h))
// contains direction d, as its outgoing half-edge.
template <class R>
int corner_containing(const FlatSurface<R>& s, int v, const Vec2<R>& d);

// Follows the ray from vertex v through the given corner sector and returns
// the first cone point on it when its squared distance is at most length2,
// std::nullopt (NoHit) otherwise.
template <class R>
std::optional<SaddleConnection<R>> trace_separatrix(const FlatSurface<R>& s, int v,
                                                    int corner, const Vec2<R>& dir,
                                                    const R& length2,
                                                    const TraceBudget& budget = {});

// All saddle connections of squared length <= length2, each reported once
// per orientation, in deterministic order (by start vertex, corner, and
// discovery). Wedge expansion of developed triangles with exact pruning.
template <class R>
std::vector<SaddleConnection<R>> saddle_connections(const FlatSurface<R>& s,
                                                    const R& length2,
                                                    const TraceBudget& budget = {});

// East-pointing horizontal saddle connections (positive x, zero y holonomy),
// one per oriented connection; used by the collapse-time oracle.
std::vector<SaddleConnectionQ> horizontal_connections(const FlatSurfaceQ& s,
                                                      const Rational& length2,
                                                      const TraceBudget& budget = {});

// Exact trace of the segment from vertex v with displacement w (the slit
// machinery's path query). Reports the crossings and where the far endpoint
// lands; a cone point on the closed segment interior or endpoint is
// reported, not an error, so callers can decide.
struct SegmentTrace {
  enum class End { Interior, OnEdge, AtVertex };
  End end = End::Interior;
  int start_corner = -1;                       // outgoing half-edge at the start vertex
  std::vector<PathStep<Rational>> crossings;   // entry half-edges with entry params
  std::vector<Rational> segment_params;        // t along the segment per crossing
  // Developed positions of tail/head of each crossing's entry half-edge, in
  // the walk chart anchored at the start vertex (the segment is t * w).
  std::vector<Vec2<Rational>> entry_left, entry_right;
  int end_half_edge = -1;   // OnEdge: the entry half-edge carrying the endpoint
  Rational end_u;           // OnEdge: param along end_half_edge
  int end_triangle_entry = -1;  // Interior: entry half-edge of the final triangle
  int hit_vertex = -1;      // AtVertex: vertex id
  Rational hit_param;       // AtVertex: t along the segment, in (0, 1]
  bool along_edge = false;  // the segment leaves v along an existing edge
  int along_half_edge = -1;
};

SegmentTrace trace_segment(const FlatSurfaceQ& s, int v, const Vec2<Rational>& w,
                           const TraceBudget& budget = {});

extern template std::optional<SaddleConnectionQ> trace_separatrix(
    const FlatSurfaceQ&, int, int, const Vec2<Rational>&, const Rational&, const TraceBudget&);
extern template std::optional<SaddleConnectionD> trace_separatrix(
    const FlatSurfaceD&, int, int, const Vec2<double>&, const double&, const TraceBudget&);
extern template std::vector<SaddleConnectionQ> saddle_connections(const FlatSurfaceQ&,
                                                                  const Rational&,
                                                                  const TraceBudget&);
extern template std::vector<SaddleConnectionD> saddle_connections(const FlatSurfaceD&,
                                                                  const double&,
                                                                  const TraceBudget&);

}  // namespace relflow
