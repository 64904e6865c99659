#include "relflow/tracing.hpp"

#include <algorithm>

namespace relflow {

namespace {

// Crossing parameter of the ray {t*d : t>0} with the segment X + u*(Y-X),
// valid when X and Y lie strictly on opposite sides of the ray.
template <class R>
R crossing_param(const Vec2<R>& d, const Vec2<R>& X, const Vec2<R>& Y) {
  R cx = cross(d, X);
  R cy = cross(d, Y);
  return cx / (cx - cy);
}

template <class R>
Vec2<R> lerp(const Vec2<R>& X, const Vec2<R>& Y, const R& u) {
  return {X.x + u * (Y.x - X.x), X.y + u * (Y.y - X.y)};
}

}  // namespace

template <class R>
int corner_containing(const FlatSurface<R>& s, int v, const Vec2<R>& d) {
  int h0 = s.outgoing_half_edge(v);
  int h = h0;
  do {
    const Vec2<R>& u = s.hol(h);
    Vec2<R> w = -s.hol(s.tri().prev(h));
    if (sector_contains(u, w, d)) return h;
    h = s.tri().rotate_cw(h);
  } while (h != h0);
  throw ValidationError("no corner sector contains the given direction");
}

template <class R>
std::optional<SaddleConnection<R>> trace_separatrix(const FlatSurface<R>& s, int v,
                                                    int corner, const Vec2<R>& dir,
                                                    const R& length2,
                                                    const TraceBudget& budget) {
  if (dir.is_zero()) throw UsageError("trace direction must be nonzero");
  if (s.vertex_at_tail(corner) != v)
    throw UsageError("corner half-edge does not start at the given vertex");
  const Triangulation& tri = s.tri();

  SaddleConnection<R> sc;
  sc.from_vertex = v;
  sc.from_label = s.label(v);
  sc.start_corner = corner;

  auto finish = [&](const Vec2<R>& holonomy, int to_vertex) -> std::optional<SaddleConnection<R>> {
    if (sign(norm2(holonomy) - length2) > 0) return std::nullopt;
    sc.holonomy = holonomy;
    sc.to_vertex = to_vertex;
    sc.to_label = s.label(to_vertex);
    return sc;
  };

  int h = corner;
  if (same_direction(s.hol(h), dir)) {
    chain_add(sc.left_chain, tri, h, 1);
    return finish(s.hol(h), s.vertex_at_head(h));
  }
  {
    Vec2<R> w = -s.hol(tri.prev(h));
    if (!sector_contains(s.hol(h), w, dir) && !same_direction(w, dir))
      throw UsageError("direction does not lie in the given corner sector");
  }

  // First triangle: corner at the origin, B = head(h), apex C0.
  Vec2<R> p_right = s.hol(h);
  Vec2<R> apex = p_right + s.hol(tri.next(h));
  if (same_direction(dir, apex)) {
    chain_add(sc.left_chain, tri, tri.twin(tri.prev(h)), 1);
    return finish(apex, s.vertex_at_tail(tri.prev(h)));
  }
  // The ray exits through next(h); enter the neighbor.
  R u = crossing_param(dir, p_right, apex);
  Vec2<R> crossing = lerp(p_right, apex, u);
  if (sign(norm2(crossing) - length2) > 0) return std::nullopt;
  chain_add(sc.left_chain, tri, tri.twin(tri.prev(h)), 1);
  int he = tri.twin(tri.next(h));
  sc.path.push_back({he, R(1) - u});
  Vec2<R> p_left = apex;  // tail of he

  for (long step = 0; step < budget.max_steps; ++step) {
    Vec2<R> c = p_right + s.hol(tri.next(he));
    int apex_vertex = s.vertex_at_tail(tri.prev(he));
    int cs = cross_sign(dir, c);
    if (cs == 0 && sign(dot(dir, c)) > 0) {
      chain_add(sc.left_chain, tri, tri.twin(tri.prev(he)), 1);
      return finish(c, apex_vertex);
    }
    int exit;
    Vec2<R> X, Y;
    if (cs > 0) {
      // apex on the left: exit between head and apex, apex becomes the left
      exit = tri.next(he);
      X = p_right;
      Y = c;
      chain_add(sc.left_chain, tri, tri.twin(tri.prev(he)), 1);
      p_left = c;
    } else {
      exit = tri.prev(he);
      X = c;
      Y = p_left;
      p_right = c;
    }
    u = crossing_param(dir, X, Y);
    crossing = lerp(X, Y, u);
    if (sign(norm2(crossing) - length2) > 0) return std::nullopt;
    he = tri.twin(exit);
    sc.path.push_back({he, R(1) - u});
  }
  throw BudgetError("BudgetExceeded: separatrix trace exceeded step budget");
}

namespace {

template <class R>
struct WedgeState {
  int he;            // entry half-edge; tail on the ray's left
  Vec2<R> p_left;    // developed tail(he)
  Vec2<R> p_right;   // developed head(he)
  Vec2<R> wr, wl;    // exclusive directional bounds (right, left)
};

// Minimal squared distance from the origin to the part of segment [X, Y]
// reachable inside the cone (wr, wl). Bounds parallel to the segment do not
// clip (conservative, still a valid lower bound).
template <class R>
R min_dist2_clipped(const Vec2<R>& X, const Vec2<R>& Y, const Vec2<R>& wr, const Vec2<R>& wl) {
  R lo(0), hi(1);
  std::vector<R> cuts;
  for (const Vec2<R>* w : {&wr, &wl}) {
    R cx = cross(*w, X), cy = cross(*w, Y);
    if (cx != cy) cuts.push_back(cx / (cx - cy));
  }
  if (cuts.size() == 2) {
    lo = std::max(R(0), std::min(cuts[0], cuts[1]));
    hi = std::min(R(1), std::max(cuts[0], cuts[1]));
    if (lo > hi) hi = lo;
  }
  Vec2<R> seg = Y - X;
  R denom = norm2(seg);
  R foot = -dot(X, seg) / denom;
  if (foot > lo && foot < hi) {
    R c = cross(X, seg);
    return c * c / denom;
  }
  Vec2<R> a = lerp(X, Y, lo), b = lerp(X, Y, hi);
  return std::min(norm2(a), norm2(b));
}

}  // namespace

template <class R>
std::vector<SaddleConnection<R>> saddle_connections(const FlatSurface<R>& s,
                                                    const R& length2,
                                                    const TraceBudget& budget) {
  require_valid(s);
  const Triangulation& tri = s.tri();
  std::vector<SaddleConnection<R>> out;
  long steps = 0;

  for (int v = 0; v < s.n_vertices(); ++v) {
    int h0 = s.outgoing_half_edge(v);
    int h = h0;
    do {
      // Direct connection along the corner's first edge.
      std::vector<std::pair<int, Vec2<R>>> hits;  // (corner, holonomy)
      if (sign(norm2(s.hol(h)) - length2) <= 0) hits.push_back({h, s.hol(h)});

      std::vector<WedgeState<R>> stack;
      Vec2<R> b = s.hol(h);
      Vec2<R> apex = b + s.hol(tri.next(h));
      if (min_dist2_clipped(b, apex, b, apex) <= length2)
        stack.push_back({tri.twin(tri.next(h)), apex, b, b, apex});

      while (!stack.empty()) {
        if (++steps > budget.max_steps)
          throw BudgetError("BudgetExceeded: saddle connection enumeration developed "
                            "too many triangles; lower the length bound");
        WedgeState<R> st = stack.back();
        stack.pop_back();
        Vec2<R> c = st.p_right + s.hol(tri.next(st.he));
        int cr = cross_sign(st.wr, c);
        int cl = cross_sign(c, st.wl);
        if (cr > 0 && cl > 0) {
          // apex strictly inside the wedge: it is the first cone point in
          // its exact direction; emit and split around it
          if (sign(norm2(c) - length2) <= 0) hits.push_back({h, c});
          WedgeState<R> right{tri.twin(tri.next(st.he)), c, st.p_right, st.wr, c};
          if (min_dist2_clipped(st.p_right, c, right.wr, right.wl) <= length2)
            stack.push_back(right);
          WedgeState<R> left{tri.twin(tri.prev(st.he)), st.p_left, c, c, st.wl};
          if (min_dist2_clipped(c, st.p_left, left.wr, left.wl) <= length2)
            stack.push_back(left);
        } else if (cr <= 0) {
          // whole wedge passes left of the apex
          WedgeState<R> nextst{tri.twin(tri.prev(st.he)), st.p_left, c, st.wr, st.wl};
          if (min_dist2_clipped(c, st.p_left, nextst.wr, nextst.wl) <= length2)
            stack.push_back(nextst);
        } else {
          // whole wedge passes right of the apex
          WedgeState<R> nextst{tri.twin(tri.next(st.he)), c, st.p_right, st.wr, st.wl};
          if (min_dist2_clipped(st.p_right, c, nextst.wr, nextst.wl) <= length2)
            stack.push_back(nextst);
        }
      }

      for (auto& [corner, holonomy] : hits) {
        auto sc = trace_separatrix(s, v, corner, holonomy, length2, budget);
        if (!sc)
          throw ValidationError("internal: enumerated connection did not re-trace");
        out.push_back(std::move(*sc));
      }
      h = tri.rotate_cw(h);
    } while (h != h0);
  }
  return out;
}

std::vector<SaddleConnectionQ> horizontal_connections(const FlatSurfaceQ& s,
                                                      const Rational& length2,
                                                      const TraceBudget& budget) {
  const Vec2<Rational> east{1, 0};
  std::vector<SaddleConnectionQ> out;
  for (int v = 0; v < s.n_vertices(); ++v) {
    int h0 = s.outgoing_half_edge(v);
    int h = h0;
    do {
      const Vec2<Rational>& u = s.hol(h);
      Vec2<Rational> w = -s.hol(s.tri().prev(h));
      if (sector_contains(u, w, east)) {
        auto sc = trace_separatrix(s, v, h, east, length2, budget);
        if (sc) out.push_back(std::move(*sc));
      }
      h = s.tri().rotate_cw(h);
    } while (h != h0);
  }
  return out;
}

SegmentTrace trace_segment(const FlatSurfaceQ& s, int v, const Vec2<Rational>& w,
                           const TraceBudget& budget) {
  if (w.is_zero()) throw UsageError("segment displacement must be nonzero");
  const Triangulation& tri = s.tri();
  SegmentTrace st;

  // t along the segment of a developed point known to lie on the ray
  auto ray_param = [&w](const Vec2<Rational>& p) -> Rational {
    return sign(w.x) != 0 ? p.x / w.x : p.y / w.y;
  };

  int h = corner_containing(s, v, w);
  st.start_corner = h;
  if (same_direction(s.hol(h), w)) {
    st.along_edge = true;
    st.along_half_edge = h;
    Rational t = ray_param(s.hol(h));  // hol(h) = t*w ... compare |w| vs |hol|
    // endpoint at parameter 1; the edge tip sits at parameter t along w
    Rational tip = 1 / t;
    if (tip >= 1) {
      // hol(h) reaches at least as far as w: endpoint on the edge (or its tip)
      if (tip == 1) {
        st.end = SegmentTrace::End::AtVertex;
        st.hit_vertex = s.vertex_at_head(h);
        st.hit_param = 1;
      } else {
        st.end = SegmentTrace::End::OnEdge;
        st.end_half_edge = h;
        st.end_u = 1 / tip;  // w = u * hol(h)
      }
    } else {
      st.end = SegmentTrace::End::AtVertex;
      st.hit_vertex = s.vertex_at_head(h);
      st.hit_param = tip;
    }
    return st;
  }

  // First triangle.
  Vec2<Rational> p_right = s.hol(h);
  Vec2<Rational> apex = p_right + s.hol(tri.next(h));
  if (same_direction(w, apex)) {
    Rational t = ray_param(apex);
    if (t <= 1) {
      st.end = SegmentTrace::End::AtVertex;
      st.hit_vertex = s.vertex_at_tail(tri.prev(h));
      st.hit_param = t;
    } else {
      st.end = SegmentTrace::End::Interior;
      st.end_triangle_entry = h;  // still in the corner triangle
    }
    return st;
  }
  Rational u = crossing_param(w, p_right, apex);
  Vec2<Rational> crossing = lerp(p_right, apex, u);
  Rational t_exit = ray_param(crossing);
  if (t_exit > 1) {
    st.end = SegmentTrace::End::Interior;
    st.end_triangle_entry = h;
    return st;
  }
  int he = tri.twin(tri.next(h));
  if (t_exit == 1) {
    st.end = SegmentTrace::End::OnEdge;
    st.end_half_edge = he;
    st.end_u = 1 - u;
    return st;
  }
  st.crossings.push_back({he, 1 - u});
  st.segment_params.push_back(t_exit);
  Vec2<Rational> p_left = apex;
  st.entry_left.push_back(p_left);
  st.entry_right.push_back(p_right);

  for (long step = 0; step < budget.max_steps; ++step) {
    Vec2<Rational> c = p_right + s.hol(tri.next(he));
    if (cross_sign(w, c) == 0 && sign(dot(w, c)) > 0) {
      Rational t = ray_param(c);
      if (t <= 1) {
        st.end = SegmentTrace::End::AtVertex;
        st.hit_vertex = s.vertex_at_tail(tri.prev(he));
        st.hit_param = t;
      } else {
        st.end = SegmentTrace::End::Interior;
        st.end_triangle_entry = he;
        }
      return st;
    }
    int exit;
    Vec2<Rational> X, Y;
    if (cross_sign(w, c) > 0) {
      exit = tri.next(he);
      X = p_right;
      Y = c;
      p_left = c;
    } else {
      exit = tri.prev(he);
      X = c;
      Y = p_left;
      p_right = c;
    }
    u = crossing_param(w, X, Y);
    crossing = lerp(X, Y, u);
    t_exit = ray_param(crossing);
    if (t_exit > 1) {
      st.end = SegmentTrace::End::Interior;
      st.end_triangle_entry = he;
      return st;
    }
    he = tri.twin(exit);
    if (t_exit == 1) {
      st.end = SegmentTrace::End::OnEdge;
      st.end_half_edge = he;
      st.end_u = 1 - u;
      return st;
    }
    st.crossings.push_back({he, 1 - u});
    st.segment_params.push_back(t_exit);
    st.entry_left.push_back(p_left);
    st.entry_right.push_back(p_right);
  }
  throw BudgetError("BudgetExceeded: segment trace exceeded step budget (SlitTooLong)");
}

template int corner_containing(const FlatSurfaceQ&, int, const Vec2<Rational>&);
template int corner_containing(const FlatSurfaceD&, int, const Vec2<double>&);
template std::optional<SaddleConnectionQ> trace_separatrix(
    const FlatSurfaceQ&, int, int, const Vec2<Rational>&, const Rational&, const TraceBudget&);
template std::optional<SaddleConnectionD> trace_separatrix(
    const FlatSurfaceD&, int, int, const Vec2<double>&, const double&, const TraceBudget&);
template std::vector<SaddleConnectionQ> saddle_connections(const FlatSurfaceQ&, const Rational&,
                                                           const TraceBudget&);
template std::vector<SaddleConnectionD> saddle_connections(const FlatSurfaceD&, const double&,
                                                           const TraceBudget&);

}  // namespace relflow
