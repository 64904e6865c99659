#pragma once

#include <array>
#include <map>
#include <vector>

#include "relflow/surface.hpp"

namespace relflow {

// Zero-sum weight vector indexed by zero labels: a tangent direction to the
// absolute period foliation. Entry i is the weight of the vertex labeled i+1.
class RelVector {
 public:
  explicit RelVector(std::vector<Rational> weights);
  int k() const { return static_cast<int>(w_.size()); }
  const Rational& at_label(int lab) const { return w_[lab - 1]; }
  const std::vector<Rational>& weights() const { return w_; }
  bool is_zero() const;
  RelVector scaled(const Rational& c) const;

 private:
  std::vector<Rational> w_;
};

// Pairing of a REL direction with a relative cycle running between two
// labeled points: weight of the head minus weight of the tail. Vanishes on
// closed cycles; linear in the weight vector. A positive value is the rate
// at which an east-oriented saddle connection between the two labels
// shrinks under the flow of the direction.
Rational rel_cocycle_eval(const RelVector& a, int from_label, int to_label);

// Integer 1-chain over undirected edges. Keys are canonical edge ids
// (minimal half-edge of the pair); a positive coefficient traverses the
// canonical half-edge forward.
using Chain = std::map<int, BigInt>;

// Adds c traversals of the oriented half-edge h to the chain.
void chain_add(Chain& chain, const Triangulation& tri, int h, const BigInt& c);

template <class R>
Vec2<R> chain_period(const FlatSurface<R>& s, const Chain& chain);

// Boundary of the chain as vertex -> multiplicity (head counted +1).
template <class R>
std::map<int, BigInt> chain_boundary(const FlatSurface<R>& s, const Chain& chain);

// Basis data for H_1(X, Z(omega)): a primal spanning tree of the vertex
// graph, a dual spanning tree of the triangle adjacency graph chosen among
// the remaining edges, and the 2g + k - 1 edges outside the dual tree as
// relative cycle generators. abs_coeffs gives an integer basis of the
// kernel of the endpoint-boundary map (rank 2g) in terms of the generators.
// Construction is greedy over ascending edge ids, hence deterministic.
struct PeriodChart {
  std::vector<int> tree;        // canonical edge ids, |V| - 1 entries
  std::vector<int> dual_tree;   // canonical edge ids, |F| - 1 entries
  std::vector<int> generators;  // canonical edge ids, ascending, 2g + k - 1
  std::vector<std::vector<BigInt>> abs_coeffs;  // 2g rows over generators
  int n_half_edges = 0;
  int n_vertices = 0;
};

template <class R>
PeriodChart period_chart(const FlatSurface<R>& s);

// Periods of the chart generators; entry j evaluates the j-th relative
// cycle on the holonomy cocycle. Throws ChartMismatch when the chart was
// built from different combinatorics.
template <class R>
std::vector<Vec2<R>> periods(const FlatSurface<R>& s, const PeriodChart& chart);

// The absolute period sub-vector: abs_coeffs applied to periods().
template <class R>
std::vector<Vec2<R>> absolute_periods(const FlatSurface<R>& s, const PeriodChart& chart);

// Rank of the span of the REL cocycles {e_i - e_1} evaluated on the chart
// generators; equals k - 1 on every valid surface.
template <class R>
int rel_rank(const FlatSurface<R>& s);

// One recorded flip: the flipped edge (pre-flip geometry A->B with apexes C
// over h and D over the twin) is homologous to the path A->D->B. Chains
// mentioning `edge` are rewritten onto r1 = {A->D} and r2 = {D->B}; signs
// translate the canonical orientations.
struct FlipRecord {
  int edge;        // canonical edge id of the flipped edge
  int r1, r2;      // canonical edge ids of the replacement path
  int s1, s2;      // +1 when the canonical half-edge runs A->D resp. D->B
  int edge_sign;   // +1 when the canonical half-edge of `edge` ran A->B
};

FlipRecord flip_record(const Triangulation& tri, int h);

// Rewrites a chain across an ordered flip sequence so that it denotes the
// same relative homology class in the post-flip combinatorics.
Chain transport_chain(Chain chain, const std::vector<FlipRecord>& flips);

// Finitely generated subgroup of Q^2 spanned by a list of period vectors;
// canonical form for exact comparisons across charts and retriangulations.
struct PeriodModule {
  BigInt den;                               // common denominator
  std::vector<std::array<BigInt, 2>> rows;  // Hermite normal form, den-scaled
  bool operator==(const PeriodModule& o) const;
};

PeriodModule period_module(const std::vector<Vec2<Rational>>& vectors);

// Integer matrix helpers (exact, fraction free).
int integer_rank(std::vector<std::vector<BigInt>> m);
// Returns a basis of the left kernel of m: rows u with u * m = 0 and the
// rows unimodularly completable (the kernel is saturated).
std::vector<std::vector<BigInt>> integer_left_kernel(const std::vector<std::vector<BigInt>>& m);

extern template std::vector<Vec2<Rational>> periods(const FlatSurfaceQ&, const PeriodChart&);
extern template std::vector<Vec2<double>> periods(const FlatSurfaceD&, const PeriodChart&);

}  // namespace relflow
