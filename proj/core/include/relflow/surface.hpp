#pragma once

#include <optional>
#include <vector>

#include "relflow/geometry.hpp"

namespace relflow {

// Half-edge combinatorics of a triangulated closed oriented surface.
// `next` is a permutation of order 3 whose orbits are the triangle
// boundaries in counterclockwise order; `twin` is a fixed-point-free
// involution pairing the two sides of each edge. Vertex orbits are derived
// from the composition of the two.
class Triangulation {
 public:
  Triangulation() = default;
  Triangulation(std::vector<int32_t> next, std::vector<int32_t> twin);

  int n_half_edges() const { return static_cast<int>(twin_.size()); }
  int n_triangles() const { return n_half_edges() / 3; }
  int n_edges() const { return n_half_edges() / 2; }

  int next(int h) const { return next_[h]; }
  int prev(int h) const { return next_[next_[h]]; }
  int twin(int h) const { return twin_[h]; }
  int triangle_of(int h) const { return tri_of_[h]; }
  // Representative (minimal) half-edge of triangle t.
  int triangle_rep(int t) const { return tri_rep_[t]; }

  // Canonical representative of the undirected edge {h, twin(h)}.
  int edge_id(int h) const { return h < twin_[h] ? h : twin_[h]; }

  // Counterclockwise rotation of an outgoing half-edge about its tail.
  int rotate_ccw(int h) const { return twin_[prev(h)]; }
  // Clockwise rotation (orbits of this map group half-edges by tail vertex).
  int rotate_cw(int h) const { return next_[twin_[h]]; }

  // Checks next^3 = id with 3-cycles, twin^2 = id without fixed points,
  // and connectivity of the triangle adjacency graph.
  std::optional<std::string> combinatorial_defect() const;

  bool operator==(const Triangulation& o) const {
    return next_ == o.next_ && twin_ == o.twin_;
  }

 private:
  std::vector<int32_t> next_;
  std::vector<int32_t> twin_;
  std::vector<int32_t> tri_of_;
  std::vector<int32_t> tri_rep_;
};

struct StratumSignature {
  std::vector<int> orders;  // sorted descending, one per labeled vertex
  int genus = 0;
  bool operator==(const StratumSignature& o) const {
    return orders == o.orders && genus == o.genus;
  }
};

// A triangulated translation surface: combinatorics plus one exact (or
// float-backend) holonomy vector per half-edge, with hol(twin(h)) = -hol(h),
// and a fixed numbering of the vertices by labels 1..k. Order-0 vertices are
// marked regular points; they participate in the labeling like zeros.
// Immutable after construction: all operations return new values, so
// surfaces are safe to share read-only across threads.
template <class R>
class FlatSurface {
 public:
  FlatSurface() = default;
  FlatSurface(Triangulation tri, std::vector<Vec2<R>> hol, std::vector<int> labels);

  const Triangulation& tri() const { return tri_; }
  const Vec2<R>& hol(int h) const { return hol_[h]; }
  const std::vector<Vec2<R>>& holonomies() const { return hol_; }

  int n_half_edges() const { return tri_.n_half_edges(); }
  int n_triangles() const { return tri_.n_triangles(); }
  int n_vertices() const { return n_vertices_; }

  // Vertex id (0-based, ordered by minimal outgoing half-edge) at the tail
  // of half-edge h.
  int vertex_at_tail(int h) const { return vertex_of_[h]; }
  int vertex_at_head(int h) const { return vertex_of_[tri_.next(h)]; }
  // Label 1..k of a vertex id.
  int label(int v) const { return labels_[v]; }
  const std::vector<int>& labels() const { return labels_; }
  int vertex_with_label(int lab) const;
  // Minimal outgoing half-edge of vertex v.
  int outgoing_half_edge(int v) const { return vertex_rep_[v]; }

  bool operator==(const FlatSurface& o) const {
    return tri_ == o.tri_ && hol_ == o.hol_ && labels_ == o.labels_;
  }

 private:
  Triangulation tri_;
  std::vector<Vec2<R>> hol_;
  std::vector<int> labels_;         // per vertex id
  std::vector<int32_t> vertex_of_;  // tail vertex id per half-edge
  std::vector<int32_t> vertex_rep_; // minimal outgoing half-edge per vertex
  int n_vertices_ = 0;
};

using FlatSurfaceQ = FlatSurface<Rational>;
using FlatSurfaceD = FlatSurface<double>;

// Returns std::nullopt when all FlatSurface invariants hold, otherwise a
// description of the first violated invariant and the offending half-edge
// or triangle. Checks, in order: twin/next algebra, hol(twin) = -hol,
// triangle closure, positive orientation, connectivity, label bijection.
template <class R>
std::optional<std::string> validation_defect(const FlatSurface<R>& s);

template <class R>
void require_valid(const FlatSurface<R>& s);

template <class R>
R area(const FlatSurface<R>& s);

// Order m of the cone point at vertex v: m+1 counts the corners at v whose
// half-open angular sector contains the positive horizontal direction.
// Cone angle is 2*pi*(m+1); m = 0 is a marked regular point.
template <class R>
int vertex_order(const FlatSurface<R>& s, int v);

template <class R>
StratumSignature stratum(const FlatSurface<R>& s);

// Replaces edge h (and its twin) by the opposite diagonal of the adjacent
// quadrilateral. Requires the quadrilateral to be strictly convex; the
// underlying flat surface is unchanged and all half-edge ids persist. With
// h: A->B, apex C over h and apex D over twin(h), the flipped h runs C->D.
template <class R>
FlatSurface<R> flip(const FlatSurface<R>& s, int h);

template <class R>
bool flippable(const FlatSurface<R>& s, int h);

// hol(x,y) -> (a*x + b*y, c*x + d*y) on every half-edge; combinatorics and
// labels unchanged. Requires det > 0.
template <class R>
FlatSurface<R> gl2_action(const R& a, const R& b, const R& c, const R& d,
                          const FlatSurface<R>& s);

FlatSurfaceQ rotate(const FlatSurfaceQ& s, const UnitRotation& r);

extern template class FlatSurface<Rational>;
extern template class FlatSurface<double>;

}  // namespace relflow
