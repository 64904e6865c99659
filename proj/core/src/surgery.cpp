#include "relflow/surgery.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace relflow {

namespace {

// Identity of a vertex of the rebuilt triangulation.
struct VKey {
  // 0: original vertex (a = vertex id)
  // 1: point on an edge (a = canonical half-edge, u = param along it)
  // 2: point on the slit interior (u = segment parameter t)
  // 3: the slit tip landing in a triangle interior
  int kind = 0;
  int a = 0;
  Rational u;

  friend bool operator<(const VKey& x, const VKey& y) {
    if (x.kind != y.kind) return x.kind < y.kind;
    if (x.a != y.a) return x.a < y.a;
    return x.u < y.u;
  }
  friend bool operator==(const VKey& x, const VKey& y) {
    return x.kind == y.kind && x.a == y.a && x.u == y.u;
  }
};

VKey orig_key(int vertex) { return {0, vertex, Rational(0)}; }

VKey edge_key(const Triangulation& tri, int h, const Rational& u) {
  int e = tri.edge_id(h);
  return {1, e, (e == h) ? u : Rational(1 - u)};
}

// Role of a directed triangle side: where its twin is found.
struct SideRole {
  enum Kind { Host, Chord, Internal } kind = Internal;
  int id = -1;     // host half-edge (side runs the same way) or chord id
  int sub = 0;     // subdivision index along the host/chord
  bool forward = true;  // chord only: side runs in slit direction
};

struct PolyVertex {
  VKey key;
  Vec2<Rational> pos;
  SideRole role;  // side from this vertex to the next
};

struct ChordPoint {
  VKey key;
  Vec2<Rational> pos;
  Rational t;  // segment parameter
};

struct ChordData {
  int id = -1;
  bool tip = false;  // last point is the slit tip inside the triangle
  std::vector<ChordPoint> pts;
};

class Emitter {
 public:
  std::vector<int32_t> nx, tw;
  std::vector<Vec2<Rational>> hol;
  std::vector<VKey> tail;
  std::map<std::pair<int, int>, int> host_slot;             // (host half-edge, sub) -> id
  std::map<std::tuple<int, int, int>, int> chord_slot;      // (chord, sub, forward) -> id

  // Emits one positively oriented triangle; returns the first half-edge id.
  int triangle(const PolyVertex& a, const PolyVertex& b, const PolyVertex& c) {
    const PolyVertex* v[3] = {&a, &b, &c};
    int base = static_cast<int>(nx.size());
    for (int i = 0; i < 3; ++i) {
      const PolyVertex& from = *v[i];
      const PolyVertex& to = *v[(i + 1) % 3];
      nx.push_back(base + (i + 1) % 3);
      tw.push_back(-1);
      hol.push_back(to.pos - from.pos);
      tail.push_back(from.key);
      int id = base + i;
      if (from.role.kind == SideRole::Host)
        host_slot[{from.role.id, from.role.sub}] = id;
      else if (from.role.kind == SideRole::Chord)
        chord_slot[{from.role.id, from.role.sub, from.role.forward ? 1 : 0}] = id;
    }
    return base;
  }

  void pair(int x, int y) {
    if (x < 0 || y < 0) throw ValidationError("internal: unmatched half-edge in rebuild");
    tw[x] = y;
    tw[y] = x;
    if (!(hol[x] + hol[y]).is_zero())
      throw ValidationError("internal: twin holonomies do not cancel in rebuild");
  }
};

// side role from vertex index i to i+1 in a fan piece, fabricating Internal
// roles for the fan diagonals and pairing them on the fly.
void fan_emit(const std::vector<PolyVertex>& poly, Emitter& em) {
  int n = static_cast<int>(poly.size());
  if (n < 3) throw ValidationError("internal: degenerate polygon piece");
  // strict corner: previous side direction crosses next side direction
  int apex = -1;
  for (int i = 0; i < n; ++i) {
    const Vec2<Rational>& prv = poly[(i + n - 1) % n].pos;
    const Vec2<Rational>& cur = poly[i].pos;
    const Vec2<Rational>& nxt = poly[(i + 1) % n].pos;
    if (sign(cross(cur - prv, nxt - cur)) > 0) {
      apex = i;
      break;
    }
  }
  if (apex < 0) throw ValidationError("internal: polygon piece has no strict corner");

  auto at = [&](int i) -> const PolyVertex& { return poly[(apex + i) % n]; };
  int prev_closer = -1;  // id of side (P_i -> apex) of the previous fan triangle
  for (int i = 1; i + 1 < n; ++i) {
    PolyVertex pa = at(0), pb = at(i), pc = at(i + 1);
    // side apex->P_i: diagonal unless i == 1; side P_{i+1}->apex: diagonal
    // unless i+1 == n-1; middle side keeps its polygon role.
    PolyVertex a = pa, b = pb, c = pc;
    a.role = (i == 1) ? at(0).role : SideRole{SideRole::Internal, -1, 0, true};
    b.role = at(i).role;
    c.role = (i + 1 == n - 1) ? at(i + 1).role : SideRole{SideRole::Internal, -1, 0, true};
    int base = em.triangle(a, b, c);
    if (i > 1) em.pair(base, prev_closer);
    prev_closer = base + 2;
  }
}

// Triangulates a convex piece containing the slit tip chain: boundary
// W_0 = chain start, W_1..W_{r-1}; chain points q_0 = W_0, .., q_m = tip
// strictly inside. Left of the chain fans to W_{r-1}, right to W_1, the rest
// fans from the tip.
void tip_emit(const std::vector<PolyVertex>& poly, const ChordData& tip, Emitter& em) {
  int r = static_cast<int>(poly.size());
  int m = static_cast<int>(tip.pts.size()) - 1;
  if (r < 3 || m < 1) throw ValidationError("internal: degenerate tip piece");
  int start = -1;
  for (int i = 0; i < r; ++i)
    if (poly[i].key == tip.pts.front().key && poly[i].pos == tip.pts.front().pos) start = i;
  if (start < 0) throw ValidationError("internal: tip chain start is not on the piece");
  auto W = [&](int i) -> const PolyVertex& { return poly[(start + i) % r]; };

  auto chain_vertex = [&](int i, SideRole role) -> PolyVertex {
    return {tip.pts[i].key, tip.pts[i].pos, role};
  };
  SideRole internal{SideRole::Internal, -1, 0, true};

  // Left flank: (q_i, q_{i+1}, W_{r-1}); the forward chain side is a slit side.
  std::vector<int> left_bases(m), right_bases(m);
  for (int i = 0; i < m; ++i) {
    PolyVertex qa = chain_vertex(i, SideRole{SideRole::Chord, tip.id, i, true});
    PolyVertex qb = chain_vertex(i + 1, internal);
    PolyVertex wl = W(r - 1);
    wl.role = internal;
    left_bases[i] = em.triangle(qa, qb, wl);
    if (i > 0) em.pair(left_bases[i] + 2, left_bases[i - 1] + 1);
  }
  // Right flank: (q_{i+1}, q_i, W_1) with the backward chain side. Side
  // q_i -> W_1 of flank i pairs with side W_1 -> q_i of flank i-1.
  for (int i = 0; i < m; ++i) {
    PolyVertex qb = chain_vertex(i + 1, SideRole{SideRole::Chord, tip.id, i, false});
    PolyVertex qa = chain_vertex(i, (i == 0) ? W(0).role : internal);
    PolyVertex wr = W(1);
    wr.role = internal;
    right_bases[i] = em.triangle(qb, qa, wr);
    if (i > 0) em.pair(right_bases[i] + 1, right_bases[i - 1] + 2);
  }
  // Fan from the tip over W_1..W_{r-1}.
  PolyVertex tipv = chain_vertex(m, internal);
  int prev = right_bases[m - 1] + 2;  // side W_1 -> B of the right flank
  for (int j = 1; j + 1 <= r - 1; ++j) {
    PolyVertex wa = W(j), wb = W(j + 1);
    PolyVertex t0 = tipv;
    t0.role = internal;  // B -> W_j
    wa.role = W(j).role;
    wb.role = internal;  // W_{j+1} -> B
    int base = em.triangle(t0, wa, wb);
    em.pair(base, prev);
    prev = base + 2;
  }
  // Close: side B -> W_{r-1} of the last fan pairs with left flank's last
  // side (q_m -> W_{r-1})... which is left_bases[m-1] + 1.
  em.pair(prev, left_bases[m - 1] + 1);
}

bool segments_intersect(const Vec2<Rational>& a, const Vec2<Rational>& b,
                        const Vec2<Rational>& c, const Vec2<Rational>& d) {
  auto orient = [](const Vec2<Rational>& p, const Vec2<Rational>& q, const Vec2<Rational>& r) {
    return sign(cross(q - p, r - p));
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  auto on = [&](const Vec2<Rational>& p, const Vec2<Rational>& q, const Vec2<Rational>& r) {
    if (orient(p, q, r) != 0) return false;
    return sign(dot(r - p, r - q)) < 0;  // strictly between
  };
  return on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b);
}

// Recursive slicing of a convex polygon piece by disjoint chords.
void slice_emit(std::vector<PolyVertex> poly, std::vector<ChordData> chords, Emitter& em) {
  // Pull out a non-tip chord if any; the tip (at most one) goes last.
  int pick = -1;
  for (size_t i = 0; i < chords.size(); ++i)
    if (!chords[i].tip) {
      pick = static_cast<int>(i);
      break;
    }
  if (pick < 0) {
    if (chords.empty()) {
      fan_emit(poly, em);
    } else if (chords.size() == 1) {
      tip_emit(poly, chords[0], em);
    } else {
      throw ValidationError("slit is not embedded (tip piece holds extra chords)");
    }
    return;
  }
  ChordData chord = chords[pick];
  chords.erase(chords.begin() + pick);

  // Locate endpoints by key and position: on self-glued triangles the same
  // vertex key can occur at several corners with distinct positions.
  int n = static_cast<int>(poly.size());
  int ia = -1, ib = -1;
  for (int i = 0; i < n; ++i) {
    if (poly[i].key == chord.pts.front().key && poly[i].pos == chord.pts.front().pos) ia = i;
    if (poly[i].key == chord.pts.back().key && poly[i].pos == chord.pts.back().pos) ib = i;
  }
  if (ia < 0 || ib < 0 || ia == ib)
    throw ValidationError("internal: chord endpoints missing from piece");

  // Arc A: ia .. ib (ccw), arc B: ib .. ia. The piece holding arc A closes
  // with the chord run backward (b -> a), which lies right of the slit.
  auto arc = [&](int from, int to) {
    std::vector<PolyVertex> out;
    for (int i = from; ; i = (i + 1) % n) {
      out.push_back(poly[i]);
      if (i == to) break;
    }
    return out;
  };
  int segs = static_cast<int>(chord.pts.size()) - 1;
  // Right piece: boundary arc a..b, then the chord walked b -> a; the side
  // leaving pts[i] toward pts[i-1] is the backward copy of sub-edge i-1.
  std::vector<PolyVertex> piece_right = arc(ia, ib);
  piece_right.back().role = SideRole{SideRole::Chord, chord.id, segs - 1, false};
  for (int i = segs - 1; i >= 1; --i)
    piece_right.push_back({chord.pts[i].key, chord.pts[i].pos,
                           SideRole{SideRole::Chord, chord.id, i - 1, false}});

  std::vector<PolyVertex> piece_left = arc(ib, ia);
  piece_left.back().role = SideRole{SideRole::Chord, chord.id, 0, true};
  for (int i = 1; i < segs; ++i)
    piece_left.push_back({chord.pts[i].key, chord.pts[i].pos,
                          SideRole{SideRole::Chord, chord.id, i, true}});

  // Assign remaining chords by endpoint membership (key and position).
  auto contains = [](const std::vector<PolyVertex>& piece, const ChordPoint& p) {
    for (const auto& v : piece)
      if (v.key == p.key && v.pos == p.pos) return true;
    return false;
  };
  std::vector<ChordData> left_chords, right_chords;
  for (auto& cd : chords) {
    bool inl = contains(piece_left, cd.pts.front()), inr = contains(piece_right, cd.pts.front());
    if (inl == inr) {
      inl = contains(piece_left, cd.pts.back());
      inr = contains(piece_right, cd.pts.back());
    }
    if (inl && !inr)
      left_chords.push_back(cd);
    else if (inr && !inl)
      right_chords.push_back(cd);
    else {
      Vec2<Rational> dirv = chord.pts.back().pos - chord.pts.front().pos;
      int side = sign(cross(dirv, cd.pts.back().pos - chord.pts.front().pos));
      if (side > 0)
        left_chords.push_back(cd);
      else if (side < 0)
        right_chords.push_back(cd);
      else
        throw ValidationError("slit is not embedded (collinear revisit)");
    }
  }
  slice_emit(std::move(piece_left), std::move(left_chords), em);
  slice_emit(std::move(piece_right), std::move(right_chords), em);
}

struct Rebuilt {
  Emitter em;
  std::vector<int> slit_upper, slit_lower;  // per global slit piece
  VKey left_key, right_key;                 // slit tail (marked point) and tip
  int n_pieces = 0;
};

// Retriangulates `s` so the slit from the marked vertex with displacement w
// is a chain of edges, subdivided at every parameter in `cut_params`
// (sorted, within (0,1)); the chain's two sides are left unpaired and
// reported per piece.
Rebuilt rebuild_with_slit(const FlatSurfaceQ& s, int vertex, const Vec2<Rational>& w,
                          const SegmentTrace& trace, const std::vector<Rational>& cut_params) {
  const Triangulation& tri = s.tri();
  Rebuilt rb;
  rb.left_key = orig_key(vertex);

  // Global piece partition 0 = t_0 < ... < t_{n} = 1.
  std::vector<Rational> P = {Rational(0)};
  for (const auto& t : cut_params) P.push_back(t);
  P.push_back(Rational(1));
  rb.n_pieces = static_cast<int>(P.size()) - 1;
  auto piece_of = [&](const Rational& t) -> int {
    for (size_t i = 0; i + 1 < P.size(); ++i)
      if (P[i] == t) return static_cast<int>(i);
    throw ValidationError("internal: slit piece lookup failed");
  };

  // Edge marks: canonical half-edge -> sorted params along it.
  std::map<int, std::vector<Rational>> edge_marks;
  auto add_mark = [&](int he, const Rational& u) {
    int e = tri.edge_id(he);
    Rational uc = (e == he) ? u : 1 - u;
    auto& list = edge_marks[e];
    if (std::find(list.begin(), list.end(), uc) == list.end()) list.push_back(uc);
  };

  std::map<int, std::vector<ChordData>> tri_chords;  // by triangle id
  int next_chord_id = 0;

  if (trace.along_edge) {
    // Slit runs along an existing edge: only edge marks, no chords. Piece j
    // spans [P_j, P_{j+1}] at params P * end-ratio along the host.
    int h = trace.along_half_edge;
    Rational ratio = trace.end_u;  // w = ratio * hol(h)
    for (const auto& t : cut_params) add_mark(h, t * ratio);
    add_mark(h, ratio);
    rb.right_key = edge_key(tri, h, ratio);
  } else {
    int r = static_cast<int>(trace.crossings.size());
    for (int i = 0; i < r; ++i) add_mark(trace.crossings[i].entry_half_edge, trace.crossings[i].u);
    if (trace.end == SegmentTrace::End::OnEdge) {
      add_mark(trace.end_half_edge, trace.end_u);
      rb.right_key = edge_key(tri, trace.end_half_edge, trace.end_u);
    } else {
      rb.right_key = VKey{3, 0, Rational(1)};
    }

    // Visits: i = 0 is the corner triangle, i >= 1 entered via crossing i-1.
    for (int i = 0; i <= r; ++i) {
      int entry = (i == 0) ? trace.start_corner : trace.crossings[i - 1].entry_half_edge;
      int triangle = tri.triangle_of(entry);
      // developed corners of the visit
      Vec2<Rational> dev_tail, dev_head;
      if (i == 0) {
        dev_tail = {Rational(0), Rational(0)};
        dev_head = s.hol(entry);
      } else {
        dev_tail = trace.entry_left[i - 1];
        dev_head = trace.entry_right[i - 1];
      }
      // translation into the triangle's own chart (rep tail at origin)
      int rep = tri.triangle_rep(triangle);
      Vec2<Rational> delta;
      if (rep == entry)
        delta = dev_tail;
      else if (rep == tri.next(entry))
        delta = dev_head;
      else
        delta = dev_head + s.hol(tri.next(entry));
      // chart position of the rep tail: dev position of tail(rep)
      // pos_in_chart(x) = walk_pos(x) - delta + chart_pos(tail(rep)); the
      // chart anchors tail(rep) via accumulated holonomies from 0.
      Vec2<Rational> chart_anchor{Rational(0), Rational(0)};
      // chart places tail(rep) at 0, tail(next(rep)) at hol(rep), etc.
      auto to_chart = [&](const Vec2<Rational>& walk) { return walk - delta + chart_anchor; };

      Rational ta = (i == 0) ? Rational(0) : trace.segment_params[i - 1];
      bool is_tip = (i == r) && trace.end == SegmentTrace::End::Interior;
      Rational tb;
      VKey key_a, key_b;
      if (i == 0)
        key_a = orig_key(vertex);
      else
        key_a = edge_key(tri, trace.crossings[i - 1].entry_half_edge, trace.crossings[i - 1].u);
      if (i < r) {
        tb = trace.segment_params[i];
        key_b = edge_key(tri, trace.crossings[i].entry_half_edge, trace.crossings[i].u);
      } else if (trace.end == SegmentTrace::End::OnEdge) {
        tb = 1;
        key_b = rb.right_key;
      } else {
        tb = 1;
        key_b = rb.right_key;  // tip
      }

      ChordData cd;
      cd.id = next_chord_id++;
      cd.tip = is_tip;
      cd.pts.push_back({key_a, to_chart(Vec2<Rational>{ta * w.x, ta * w.y}), ta});
      for (const auto& t : P)
        if (t > ta && t < tb)
          cd.pts.push_back({VKey{2, 0, t}, to_chart(Vec2<Rational>{t * w.x, t * w.y}), t});
      cd.pts.push_back({key_b, to_chart(Vec2<Rational>{tb * w.x, tb * w.y}), tb});
      tri_chords[triangle].push_back(std::move(cd));
    }
  }

  for (auto& [_, tps] : edge_marks) std::sort(tps.begin(), tps.end());

  // Embeddedness: chords within a triangle must be pairwise disjoint.
  for (auto& [t, cds] : tri_chords)
    for (size_t i = 0; i < cds.size(); ++i)
      for (size_t j = i + 1; j < cds.size(); ++j)
        if (segments_intersect(cds[i].pts.front().pos, cds[i].pts.back().pos,
                               cds[j].pts.front().pos, cds[j].pts.back().pos))
          throw ValidationError("slit is not embedded");

  // Emit every triangle.
  for (int t = 0; t < s.n_triangles(); ++t) {
    int rep = tri.triangle_rep(t);
    std::vector<PolyVertex> poly;
    Vec2<Rational> pos{Rational(0), Rational(0)};
    int h = rep;
    for (int side = 0; side < 3; ++side) {
      std::vector<Rational> marks;  // ascending along h
      int e = tri.edge_id(h);
      if (edge_marks.count(e)) {
        for (const auto& uc : edge_marks[e]) marks.push_back(e == h ? uc : 1 - uc);
        std::sort(marks.begin(), marks.end());
      }
      poly.push_back({orig_key(s.vertex_at_tail(h)), pos,
                      SideRole{SideRole::Host, h, 0, true}});
      int sub = 1;
      for (const auto& um : marks) {
        Vec2<Rational> mp{pos.x + um * s.hol(h).x, pos.y + um * s.hol(h).y};
        poly.push_back({edge_key(tri, h, um), mp, SideRole{SideRole::Host, h, sub, true}});
        ++sub;
      }
      pos += s.hol(h);
      h = tri.next(h);
    }
    auto it = tri_chords.find(t);
    slice_emit(std::move(poly), it == tri_chords.end() ? std::vector<ChordData>{} : it->second,
               rb.em);
  }

  // Pair host sub-edges across triangles; slit pieces stay open.
  std::set<int> done;
  for (auto& [slot, id] : rb.em.host_slot) {
    int h = slot.first;
    int e = tri.edge_id(h);
    if (done.count(e)) continue;
    done.insert(e);
    int o = tri.twin(e);
    int m = edge_marks.count(e) ? static_cast<int>(edge_marks[e].size()) : 0;
    bool slit_host = trace.along_edge && tri.edge_id(trace.along_half_edge) == e;
    for (int j = 0; j <= m; ++j) {
      auto a = rb.em.host_slot.find({e, j});
      auto b = rb.em.host_slot.find({o, m - j});
      if (a == rb.em.host_slot.end() || b == rb.em.host_slot.end())
        throw ValidationError("internal: missing host sub-edge");
      if (slit_host) {
        // param range of sub-edge j along the canonical half-edge e
        Rational lo = (j == 0) ? Rational(0) : edge_marks[e][j - 1];
        // slit occupies params [0, ratio] along the *along* half-edge
        int ah = trace.along_half_edge;
        Rational lo_along = (ah == e) ? lo : 1 - ((j == m) ? Rational(1) : edge_marks[e][j]);
        Rational ratio = trace.end_u;
        if (lo_along < ratio) {
          // this sub-edge is a slit piece: t-range [lo_along/ratio, ...]
          Rational t0 = lo_along / ratio;
          int piece = piece_of(t0);
          int upper = (ah == e) ? a->second : b->second;  // side along +w
          int lower = (ah == e) ? b->second : a->second;
          if (static_cast<int>(rb.slit_upper.size()) < rb.n_pieces) {
            rb.slit_upper.resize(rb.n_pieces, -1);
            rb.slit_lower.resize(rb.n_pieces, -1);
          }
          rb.slit_upper[piece] = upper;
          rb.slit_lower[piece] = lower;
          continue;
        }
      }
      rb.em.pair(a->second, b->second);
    }
  }

  // Pair chord sub-edges; every chord is a slit run, so its sides go to the
  // slit lists keyed by the piece index of the sub-edge's left endpoint.
  if (!trace.along_edge) {
    if (static_cast<int>(rb.slit_upper.size()) < rb.n_pieces) {
      rb.slit_upper.resize(rb.n_pieces, -1);
      rb.slit_lower.resize(rb.n_pieces, -1);
    }
    for (auto& [_, cds] : tri_chords) {
      for (auto& cd : cds) {
        int segs = static_cast<int>(cd.pts.size()) - 1;
        for (int i = 0; i < segs; ++i) {
          auto f = rb.em.chord_slot.find({cd.id, i, 1});
          auto b = rb.em.chord_slot.find({cd.id, i, 0});
          if (f == rb.em.chord_slot.end() || b == rb.em.chord_slot.end())
            throw ValidationError("internal: missing chord sub-edge");
          int piece = piece_of(cd.pts[i].t);
          rb.slit_upper[piece] = f->second;
          rb.slit_lower[piece] = b->second;
        }
      }
    }
  }
  for (int j = 0; j < rb.n_pieces; ++j)
    if (rb.slit_upper[j] < 0 || rb.slit_lower[j] < 0)
      throw ValidationError("internal: slit piece not covered by the rebuild");
  return rb;
}

}  // namespace

FlatSurfaceQ remove_marked_point(const FlatSurfaceQ& s, int label) {
  require_valid(s);
  int v = s.vertex_with_label(label);
  if (vertex_order(s, v) != 0)
    throw UsageError("only order-0 marked points can be removed");
  const Triangulation& tri = s.tri();

  // Corners counterclockwise around v; link vertex i sits at hol(h_i).
  std::vector<int> corners;
  int h0 = s.outgoing_half_edge(v);
  int h = h0;
  do {
    corners.push_back(h);
    h = tri.rotate_ccw(h);
  } while (h != h0);
  int d = static_cast<int>(corners.size());

  std::set<int> removed;
  for (int hc : corners) {
    removed.insert(hc);
    removed.insert(tri.twin(hc));
  }

  std::vector<int32_t> nx(s.n_half_edges()), tw(s.n_half_edges());
  for (int i = 0; i < s.n_half_edges(); ++i) {
    nx[i] = tri.next(i);
    tw[i] = tri.twin(i);
  }
  std::vector<Vec2<Rational>> hol = s.holonomies();

  std::vector<int> link(d);  // link edge i: P_i -> P_{i+1}
  for (int i = 0; i < d; ++i) link[i] = tri.next(corners[i]);

  if (d == 2) {
    // The link is a bigon: both star triangles disappear and the outer
    // sides of the two link edges are glued to each other.
    int o0 = tri.twin(link[0]), o1 = tri.twin(link[1]);
    if (removed.count(o0) || removed.count(o1) || o0 == link[1])
      throw ValidationError("cannot remove the marked point: star too degenerate");
    removed.insert(link[0]);
    removed.insert(link[1]);
    tw[o0] = o1;
    tw[o1] = o0;
    if (!(hol[o0] + hol[o1]).is_zero())
      throw ValidationError("internal: degree-2 removal holonomy mismatch");
  } else {
    // Ear-clip the link polygon.
    std::vector<Vec2<Rational>> pos(d);
    for (int i = 0; i < d; ++i) pos[i] = s.hol(corners[i]);
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    // boundary half-edge from polygon vertex i to its successor
    std::map<std::pair<int, int>, int> boundary;
    for (int i = 0; i < d; ++i) boundary[{i, (i + 1) % d}] = link[i];

    auto orient = [&](int a, int b, int c) {
      return sign(cross(pos[b] - pos[a], pos[c] - pos[a]));
    };
    int fresh = s.n_half_edges();
    while (idx.size() > 3) {
      int n = static_cast<int>(idx.size());
      int ear = -1;
      for (int i = 0; i < n; ++i) {
        int a = idx[(i + n - 1) % n], b = idx[i], c = idx[(i + 1) % n];
        if (orient(a, b, c) <= 0) continue;
        bool empty = true;
        for (int j = 0; j < n && empty; ++j) {
          int p = idx[j];
          if (p == a || p == b || p == c) continue;
          if (orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0) empty = false;
        }
        if (empty) {
          ear = i;
          break;
        }
      }
      if (ear < 0) throw ValidationError("internal: link polygon has no ear");
      int n2 = n;
      int a = idx[(ear + n2 - 1) % n2], b = idx[ear], c = idx[(ear + 1) % n2];
      // new triangle (a, b, c): sides a->b, b->c from the boundary map,
      // c->a is a fresh diagonal whose twin a->c becomes boundary
      int e_ab = boundary.at({a, b});
      int e_bc = boundary.at({b, c});
      int e_ca = fresh++;
      int e_ac = fresh++;
      nx.push_back(0);
      nx.push_back(0);
      tw.push_back(e_ac);
      tw.push_back(e_ca);
      hol.push_back(pos[a] - pos[c]);
      hol.push_back(pos[c] - pos[a]);
      nx[e_ab] = e_bc;
      nx[e_bc] = e_ca;
      nx[e_ca] = e_ab;
      boundary.erase({a, b});
      boundary.erase({b, c});
      boundary[{a, c}] = e_ac;
      idx.erase(idx.begin() + ear);
    }
    int a = idx[0], b = idx[1], c = idx[2];
    if (orient(a, b, c) <= 0)
      throw ValidationError("internal: final link triangle is not positive");
    int e_ab = boundary.at({a, b});
    int e_bc = boundary.at({b, c});
    int e_ca = boundary.at({c, a});
    nx[e_ab] = e_bc;
    nx[e_bc] = e_ca;
    nx[e_ca] = e_ab;
  }

  // Compact.
  int total = static_cast<int>(nx.size());
  std::vector<int> remap(total, -1);
  int mcount = 0;
  for (int i = 0; i < total; ++i)
    if (!removed.count(i)) remap[i] = mcount++;
  std::vector<int32_t> nx2(mcount), tw2(mcount);
  std::vector<Vec2<Rational>> hol2(mcount);
  for (int i = 0; i < total; ++i) {
    if (remap[i] < 0) continue;
    nx2[remap[i]] = remap[nx[i]];
    tw2[remap[i]] = remap[tw[i]];
    hol2[remap[i]] = hol[i];
  }

  // Labels: tails unchanged for survivors; v is gone. Dense relabel keeps
  // relative order.
  Triangulation new_tri(std::move(nx2), std::move(tw2));
  std::vector<int> tail_label(mcount, 0);
  for (int i = 0; i < s.n_half_edges(); ++i)
    if (remap[i] >= 0) tail_label[remap[i]] = s.label(s.vertex_at_tail(i));
  // Fresh diagonal half-edges keep label 0 here; every orbit contains an
  // original half-edge, from which the orbit label is recovered.
  std::vector<int> vertex_of(mcount, -1);
  std::vector<int> vlabel;
  for (int i = 0; i < mcount; ++i) {
    if (vertex_of[i] != -1) continue;
    int vb = static_cast<int>(vlabel.size());
    int lab = 0;
    int cur = i;
    do {
      vertex_of[cur] = vb;
      if (tail_label[cur] != 0) {
        if (lab != 0 && lab != tail_label[cur])
          throw ValidationError("internal: inconsistent labels after point removal");
        lab = tail_label[cur];
      }
      cur = new_tri.rotate_cw(cur);
    } while (cur != i);
    if (lab == 0) throw ValidationError("internal: unlabeled orbit after point removal");
    vlabel.push_back(lab);
  }
  // dense relabel preserving order
  std::vector<int> sorted = vlabel;
  std::sort(sorted.begin(), sorted.end());
  for (auto& l : vlabel)
    l = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), l) - sorted.begin()) + 1;

  FlatSurfaceQ out(std::move(new_tri), std::move(hol2), std::move(vlabel));
  require_valid(out);
  return out;
}

FlatSurfaceQ slit_glue(const FlatSurfaceQ& s1, int label1, const FlatSurfaceQ& s2,
                       int label2, const Vec2<Rational>& v, const TraceBudget& budget) {
  require_valid(s1);
  require_valid(s2);
  if (v.is_zero()) throw UsageError("slit vector must be nonzero");
  int v1 = s1.vertex_with_label(label1);
  int v2 = s2.vertex_with_label(label2);
  if (vertex_order(s1, v1) != 0 || vertex_order(s2, v2) != 0)
    throw ValidationError("slit endpoints must be order-0 marked points");

  SegmentTrace t1 = trace_segment(s1, v1, v, budget);
  SegmentTrace t2 = trace_segment(s2, v2, v, budget);
  for (const SegmentTrace* t : {&t1, &t2})
    if (t->end == SegmentTrace::End::AtVertex)
      throw ValidationError("SlitHitsConePoint: the slit meets a cone point at parameter " +
                            to_string(t->hit_param));

  // Common subdivision parameters.
  std::set<Rational> params;
  for (const auto& t : t1.segment_params) params.insert(t);
  for (const auto& t : t2.segment_params) params.insert(t);
  std::vector<Rational> cuts(params.begin(), params.end());

  Rebuilt r1 = rebuild_with_slit(s1, v1, v, t1, cuts);
  Rebuilt r2 = rebuild_with_slit(s2, v2, v, t2, cuts);
  if (r1.n_pieces != r2.n_pieces)
    throw ValidationError("internal: slit piece counts disagree");

  // Merge, with s2 ids offset.
  int off = static_cast<int>(r1.em.nx.size());
  std::vector<int32_t> nx = r1.em.nx, tw = r1.em.tw;
  std::vector<Vec2<Rational>> hol = r1.em.hol;
  std::vector<std::pair<int, VKey>> tails;  // (surface tag, key) per half-edge
  for (size_t i = 0; i < r1.em.tail.size(); ++i) tails.push_back({1, r1.em.tail[i]});
  for (size_t i = 0; i < r2.em.nx.size(); ++i) {
    nx.push_back(r2.em.nx[i] + off);
    tw.push_back(r2.em.tw[i] < 0 ? -1 : r2.em.tw[i] + off);
    hol.push_back(r2.em.hol[i]);
    tails.push_back({2, r2.em.tail[i]});
  }
  for (int j = 0; j < r1.n_pieces; ++j) {
    int u1 = r1.slit_upper[j], l1 = r1.slit_lower[j];
    int u2 = r2.slit_upper[j] + off, l2 = r2.slit_lower[j] + off;
    tw[u1] = l2;
    tw[l2] = u1;
    tw[u2] = l1;
    tw[l1] = u2;
    if (!(hol[u1] + hol[l2]).is_zero() || !(hol[u2] + hol[l1]).is_zero())
      throw ValidationError("internal: slit gluing holonomies do not cancel");
  }
  for (size_t i = 0; i < tw.size(); ++i)
    if (tw[i] < 0) throw ValidationError("internal: unpaired half-edge after gluing");

  Triangulation tri(std::move(nx), std::move(tw));

  // Vertex labels: s1 survivors, s2 survivors, slit tail, slit tip, temps.
  int n = tri.n_half_edges();
  std::vector<int> vertex_of(n, -1);
  std::vector<std::vector<int>> members;
  for (int i = 0; i < n; ++i) {
    if (vertex_of[i] != -1) continue;
    int vb = static_cast<int>(members.size());
    members.push_back({});
    int cur = i;
    do {
      vertex_of[cur] = vb;
      members[vb].push_back(cur);
      cur = tri.rotate_cw(cur);
    } while (cur != i);
  }
  int k = static_cast<int>(members.size());
  // sort key per vertex: (class, within-class order)
  std::vector<std::pair<std::pair<int, long>, int>> order;  // (sort key, vertex)
  std::vector<char> is_temp(k, 0);
  for (int vb = 0; vb < k; ++vb) {
    bool left = false, right = false;
    int orig_tag = 0, orig_label = 0;
    bool has_orig = false;
    for (int m : members[vb]) {
      const auto& [tag, key] = tails[m];
      if (key.kind == 0) {
        has_orig = true;
        orig_tag = tag;
        orig_label = (tag == 1) ? s1.label(key.a) : s2.label(key.a);
        if (tag == 1 && key.a == v1) left = true;
        if (tag == 2 && key.a == v2) left = true;
      }
      if ((tag == 1 && key == r1.right_key) || (tag == 2 && key == r2.right_key)) right = true;
    }
    std::pair<int, long> sort_key;
    if (left)
      sort_key = {3, 0};
    else if (right)
      sort_key = {4, 0};
    else if (has_orig)
      sort_key = {orig_tag, orig_label};
    else {
      sort_key = {5, vb};
      is_temp[vb] = 1;
    }
    order.push_back({sort_key, vb});
  }
  std::sort(order.begin(), order.end());
  std::vector<int> labels(k, 0);
  int next_label = 1;
  std::vector<int> temp_labels;
  for (auto& [key, vb] : order) {
    labels[vb] = next_label++;
    if (is_temp[vb]) temp_labels.push_back(labels[vb]);
  }

  FlatSurfaceQ glued(std::move(tri), std::move(hol), std::move(labels));
  require_valid(glued);

  // Remove the temporary subdivision points, largest label first so the
  // remaining temp labels are unaffected.
  std::sort(temp_labels.rbegin(), temp_labels.rend());
  for (int lab : temp_labels) glued = remove_marked_point(glued, lab);
  return glued;
}

FlatSurfaceQ coreface_chart(const FlatSurfaceQ& comp1, int label1, const FlatSurfaceQ& comp2,
                            int label2, const Vec2<Rational>& gamma, const TraceBudget& budget) {
  if (gamma.is_zero())
    throw UsageError("the node itself (gamma = 0) is not representable");
  return slit_glue(comp1, label1, comp2, label2, gamma, budget);
}

}  // namespace relflow
