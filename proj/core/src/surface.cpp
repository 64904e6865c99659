#include "relflow/surface.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace relflow {

Rational rational_from_string(const std::string& s) {
  std::string t = s;
  auto dotpos = t.find('.');
  if (dotpos != std::string::npos) {
    // decimal literal: shift the point into a power-of-ten denominator
    std::string digits = t.substr(0, dotpos) + t.substr(dotpos + 1);
    size_t frac_len = t.size() - dotpos - 1;
    std::string den = "1" + std::string(frac_len, '0');
    mpq_class q;
    if (digits.empty() || q.set_str(digits + "/" + den, 10) != 0)
      throw UsageError("cannot parse rational literal '" + s + "'");
    q.canonicalize();
    return q;
  }
  mpq_class q;
  if (q.set_str(t, 10) != 0)
    throw UsageError("cannot parse rational literal '" + s + "'");
  if (q.get_den() == 0) throw UsageError("zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_string(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

UnitRotation::UnitRotation(Rational cc, Rational ss) : c(std::move(cc)), s(std::move(ss)) {
  if (c * c + s * s != 1)
    throw UsageError("(" + to_string(c) + "," + to_string(s) + ") is not on the unit circle");
}

UnitRotation UnitRotation::pythagorean(long m, long n) {
  if (!(m > n && n > 0)) throw UsageError("pythagorean parameters need m > n > 0");
  Rational den(m * m + n * n);
  return {Rational(m * m - n * n) / den, Rational(2 * m * n) / den};
}

Triangulation::Triangulation(std::vector<int32_t> next, std::vector<int32_t> twin)
    : next_(std::move(next)), twin_(std::move(twin)) {
  int n = n_half_edges();
  tri_of_.assign(n, -1);
  if (static_cast<int>(next_.size()) != n) return;  // defect reported later
  for (int h = 0; h < n; ++h) {
    if (tri_of_[h] != -1) continue;
    int t = static_cast<int>(tri_rep_.size());
    tri_rep_.push_back(h);
    int cur = h;
    for (int i = 0; i < 3 && tri_of_[cur] == -1; ++i) {
      tri_of_[cur] = t;
      cur = next_[cur] >= 0 && next_[cur] < n ? next_[cur] : h;
    }
  }
}

std::optional<std::string> Triangulation::combinatorial_defect() const {
  int n = n_half_edges();
  if (n == 0) return "empty triangulation";
  if (n % 6 != 0) return "half-edge count must be a positive multiple of 6";
  if (static_cast<int>(next_.size()) != n) return "next table size mismatch";
  for (int h = 0; h < n; ++h) {
    if (next_[h] < 0 || next_[h] >= n)
      return "next out of range at half-edge " + std::to_string(h);
    if (next_[h] == h || next_[next_[h]] == h)
      return "next orbit at half-edge " + std::to_string(h) + " is not a 3-cycle";
    if (next_[next_[next_[h]]] != h)
      return "next^3 != id at half-edge " + std::to_string(h);
    if (twin_[h] < 0 || twin_[h] >= n)
      return "TwinMismatch: twin out of range at half-edge " + std::to_string(h);
    if (twin_[h] == h)
      return "TwinMismatch: twin fixed point at half-edge " + std::to_string(h);
    if (twin_[twin_[h]] != h)
      return "TwinMismatch: twin not an involution at half-edge " + std::to_string(h);
  }
  std::vector<char> seen(n_triangles(), 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    int h = tri_rep_[t];
    for (int i = 0; i < 3; ++i) {
      int u = tri_of_[twin_[h]];
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
      h = next_[h];
    }
  }
  if (count != n_triangles()) return "Disconnected: surface has multiple components";
  return std::nullopt;
}

namespace {

// Orbits of clockwise rotation about the tail group outgoing half-edges by
// vertex. Vertex ids are assigned in order of minimal member half-edge.
void compute_vertices(const Triangulation& tri, std::vector<int32_t>& vertex_of,
                      std::vector<int32_t>& rep) {
  int n = tri.n_half_edges();
  vertex_of.assign(n, -1);
  rep.clear();
  for (int h = 0; h < n; ++h) {
    if (vertex_of[h] != -1) continue;
    int v = static_cast<int>(rep.size());
    rep.push_back(h);
    int cur = h;
    do {
      vertex_of[cur] = v;
      cur = tri.rotate_cw(cur);
    } while (cur != h);
  }
}

}  // namespace

template <class R>
FlatSurface<R>::FlatSurface(Triangulation tri, std::vector<Vec2<R>> hol, std::vector<int> labels)
    : tri_(std::move(tri)), hol_(std::move(hol)), labels_(std::move(labels)) {
  if (auto defect = tri_.combinatorial_defect()) throw ValidationError(*defect);
  if (static_cast<int>(hol_.size()) != tri_.n_half_edges())
    throw ValidationError("holonomy count does not match half-edge count");
  compute_vertices(tri_, vertex_of_, vertex_rep_);
  n_vertices_ = static_cast<int>(vertex_rep_.size());
  if (static_cast<int>(labels_.size()) != n_vertices_)
    throw ValidationError("label count (" + std::to_string(labels_.size()) +
                          ") does not match vertex count (" + std::to_string(n_vertices_) + ")");
}

template <class R>
int FlatSurface<R>::vertex_with_label(int lab) const {
  for (int v = 0; v < n_vertices_; ++v)
    if (labels_[v] == lab) return v;
  throw UsageError("no vertex with label " + std::to_string(lab));
}

template <class R>
std::optional<std::string> validation_defect(const FlatSurface<R>& s) {
  const Triangulation& tri = s.tri();
  if (auto defect = tri.combinatorial_defect()) return defect;
  for (int h = 0; h < s.n_half_edges(); ++h) {
    Vec2<R> sum = s.hol(h) + s.hol(tri.twin(h));
    if constexpr (is_exact_v<R>) {
      if (!sum.is_zero())
        return "TwinMismatch: hol(twin) != -hol at half-edge " + std::to_string(h);
    } else {
      double scale = std::sqrt(to_double(norm2(s.hol(h)))) + 1.0;
      if (std::sqrt(to_double(norm2(sum))) > kFloatTol * scale)
        return "TwinMismatch: hol(twin) != -hol at half-edge " + std::to_string(h);
    }
  }
  for (int t = 0; t < s.n_triangles(); ++t) {
    int h = tri.triangle_rep(t);
    Vec2<R> sum = s.hol(h) + s.hol(tri.next(h)) + s.hol(tri.prev(h));
    if constexpr (is_exact_v<R>) {
      if (!sum.is_zero()) return "NonClosedTriangle: triangle " + std::to_string(t);
    } else {
      double scale = std::sqrt(to_double(norm2(s.hol(h)))) + 1.0;
      if (std::sqrt(to_double(norm2(sum))) > kFloatTol * scale)
        return "NonClosedTriangle: triangle " + std::to_string(t);
    }
    R a = cross(s.hol(h), s.hol(tri.next(h)));
    if (sign(a) <= 0) return "NonPositiveTriangle: triangle " + std::to_string(t);
  }
  std::vector<int> labs = s.labels();
  std::sort(labs.begin(), labs.end());
  for (int i = 0; i < static_cast<int>(labs.size()); ++i)
    if (labs[i] != i + 1) return "labels are not a bijection onto 1..k";
  return std::nullopt;
}

template <class R>
void require_valid(const FlatSurface<R>& s) {
  if (auto defect = validation_defect(s)) throw ValidationError(*defect);
}

template <class R>
R area(const FlatSurface<R>& s) {
  R two_a{};
  for (int t = 0; t < s.n_triangles(); ++t) {
    int h = s.tri().triangle_rep(t);
    two_a += cross(s.hol(h), s.hol(s.tri().next(h)));
  }
  return two_a / 2;
}

template <class R>
int vertex_order(const FlatSurface<R>& s, int v) {
  // Count corners whose sector [outgoing, -incoming) contains east. The
  // count equals (cone angle) / 2pi; sector tests are exact sign tests,
  // never inverse trigonometry.
  const Vec2<R> east{R(1), R(0)};
  int crossings = 0;
  int h0 = s.outgoing_half_edge(v);
  int h = h0;
  do {
    const Vec2<R>& u = s.hol(h);
    Vec2<R> w = -s.hol(s.tri().prev(h));
    if (sector_contains(u, w, east)) ++crossings;
    h = s.tri().rotate_cw(h);
  } while (h != h0);
  return crossings - 1;
}

template <class R>
StratumSignature stratum(const FlatSurface<R>& s) {
  StratumSignature sig;
  for (int v = 0; v < s.n_vertices(); ++v) sig.orders.push_back(vertex_order(s, v));
  std::sort(sig.orders.rbegin(), sig.orders.rend());
  int V = s.n_vertices();
  int E = s.tri().n_edges();
  int F = s.n_triangles();
  int chi = V - E + F;
  if (chi % 2 != 0) throw ValidationError("odd Euler characteristic");
  sig.genus = (2 - chi) / 2;
  int order_sum = std::accumulate(sig.orders.begin(), sig.orders.end(), 0);
  if (order_sum != 2 * sig.genus - 2)
    throw ValidationError("GaussBonnetMismatch: zero orders sum to " +
                          std::to_string(order_sum) + " but 2g-2 = " +
                          std::to_string(2 * sig.genus - 2));
  return sig;
}

template <class R>
bool flippable(const FlatSurface<R>& s, int h) {
  const Triangulation& tri = s.tri();
  int t = tri.twin(h);
  // Quad corners: A = tail(h), B = head(h), C = apex over h, D = apex over
  // twin. New diagonal C -> D; both new triangles must be strictly positive.
  Vec2<R> f = s.hol(tri.prev(h)) + s.hol(tri.next(t));  // C -> A -> D
  return sign(cross(f, s.hol(tri.prev(t)))) > 0 &&      // (C->D, D->B)
         sign(cross(-f, s.hol(tri.prev(h)))) > 0;       // (D->C, C->A)
}

template <class R>
FlatSurface<R> flip(const FlatSurface<R>& s, int h) {
  if (!flippable(s, h))
    throw ValidationError("NonConvexFlip: flip of half-edge " + std::to_string(h) +
                          " would create a non-positive triangle");
  const Triangulation& tri = s.tri();
  int t = tri.twin(h);
  int n1 = tri.next(h), n2 = tri.prev(h);  // h: A->B, n1: B->C, n2: C->A
  int m1 = tri.next(t), m2 = tri.prev(t);  // t: B->A, m1: A->D, m2: D->B
  Vec2<R> f = s.hol(n2) + s.hol(m1);       // new diagonal C -> D

  // New triangle cycles: h(C->D) -> m2(D->B) -> n1(B->C) and
  // t(D->C) -> n2(C->A) -> m1(A->D). Only next pointers and the diagonal
  // holonomy change; every side half-edge keeps its id, twin and holonomy.
  std::vector<int32_t> nx(s.n_half_edges()), tw(s.n_half_edges());
  for (int i = 0; i < s.n_half_edges(); ++i) {
    nx[i] = tri.next(i);
    tw[i] = tri.twin(i);
  }
  nx[h] = m2;
  nx[m2] = n1;
  nx[n1] = h;
  nx[t] = n2;
  nx[n2] = m1;
  nx[m1] = t;
  std::vector<Vec2<R>> hol = s.holonomies();
  hol[h] = f;
  hol[t] = -f;

  Triangulation new_tri(std::move(nx), std::move(tw));
  std::vector<int32_t> vertex_of, rep;
  compute_vertices(new_tri, vertex_of, rep);
  std::vector<int> labels(rep.size(), 0);
  for (int i = 0; i < s.n_half_edges(); ++i) {
    if (i == h || i == t) continue;  // the diagonal's tail moved
    labels[vertex_of[i]] = s.label(s.vertex_at_tail(i));
  }
  labels[vertex_of[h]] = s.label(s.vertex_at_tail(n2));  // tail C
  labels[vertex_of[t]] = s.label(s.vertex_at_tail(m2));  // tail D
  return FlatSurface<R>(std::move(new_tri), std::move(hol), std::move(labels));
}

template <class R>
FlatSurface<R> gl2_action(const R& a, const R& b, const R& c, const R& d,
                          const FlatSurface<R>& s) {
  if (sign(a * d - b * c) <= 0)
    throw ValidationError("NonPositiveDeterminant: gl2 action requires det > 0");
  std::vector<Vec2<R>> hol;
  hol.reserve(s.n_half_edges());
  for (int h = 0; h < s.n_half_edges(); ++h) {
    const Vec2<R>& u = s.hol(h);
    hol.push_back({a * u.x + b * u.y, c * u.x + d * u.y});
  }
  return FlatSurface<R>(s.tri(), std::move(hol), s.labels());
}

FlatSurfaceQ rotate(const FlatSurfaceQ& s, const UnitRotation& r) {
  return gl2_action(r.c, -r.s, r.s, r.c, s);
}

template class FlatSurface<Rational>;
template class FlatSurface<double>;

template std::optional<std::string> validation_defect(const FlatSurfaceQ&);
template std::optional<std::string> validation_defect(const FlatSurfaceD&);
template void require_valid(const FlatSurfaceQ&);
template void require_valid(const FlatSurfaceD&);
template Rational area(const FlatSurfaceQ&);
template double area(const FlatSurfaceD&);
template int vertex_order(const FlatSurfaceQ&, int);
template int vertex_order(const FlatSurfaceD&, int);
template StratumSignature stratum(const FlatSurfaceQ&);
template StratumSignature stratum(const FlatSurfaceD&);
template bool flippable(const FlatSurfaceQ&, int);
template bool flippable(const FlatSurfaceD&, int);
template FlatSurfaceQ flip(const FlatSurfaceQ&, int);
template FlatSurfaceD flip(const FlatSurfaceD&, int);
template FlatSurfaceQ gl2_action(const Rational&, const Rational&, const Rational&,
                                 const Rational&, const FlatSurfaceQ&);
template FlatSurfaceD gl2_action(const double&, const double&, const double&,
                                 const double&, const FlatSurfaceD&);

}  // namespace relflow
