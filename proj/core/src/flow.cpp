#include "relflow/flow.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace relflow {

namespace {

// Mutable surface state of the event loop. Vertex orbits are not maintained;
// the label of each half-edge's tail is tracked directly (flips only move
// the diagonal's tails).
struct Work {
  std::vector<int32_t> nx, tw;
  std::vector<Vec2<Rational>> hol;
  std::vector<int> tail_label;

  int next(int h) const { return nx[h]; }
  int prev(int h) const { return nx[nx[h]]; }
  int head_label(int h) const { return tail_label[nx[h]]; }
};

Work work_from(const FlatSurfaceQ& s) {
  Work w;
  int n = s.n_half_edges();
  w.nx.resize(n);
  w.tw.resize(n);
  w.hol = s.holonomies();
  w.tail_label.resize(n);
  for (int h = 0; h < n; ++h) {
    w.nx[h] = s.tri().next(h);
    w.tw[h] = s.tri().twin(h);
    w.tail_label[h] = s.label(s.vertex_at_tail(h));
  }
  return w;
}

FlatSurfaceQ surface_from(const Work& w) {
  int n = static_cast<int>(w.nx.size());
  Triangulation tri(w.nx, w.tw);
  // Labels per vertex orbit; tails in one orbit must agree.
  std::vector<int> vertex_of(n, -1);
  std::vector<int> vlabels;
  for (int h = 0; h < n; ++h) {
    if (vertex_of[h] != -1) continue;
    int v = static_cast<int>(vlabels.size());
    int lab = w.tail_label[h];
    int cur = h;
    do {
      vertex_of[cur] = v;
      if (w.tail_label[cur] != lab)
        throw ValidationError("internal: inconsistent tail labels in flow state");
      cur = tri.rotate_cw(cur);
    } while (cur != h);
    vlabels.push_back(lab);
  }
  return FlatSurfaceQ(std::move(tri), w.hol, std::move(vlabels));
}

// velocity coefficient: hol(h)' = vcoef(h) * direction
Rational vcoef(const Work& w, const RelVector& a, int h) {
  return a.at_label(w.tail_label[h]) - a.at_label(w.head_label(h));
}

struct TriangleLinear {
  Rational value;  // 2 * signed area
  Rational slope;
};

TriangleLinear area_linear(const Work& w, const RelVector& a, const Vec2<Rational>& c, int h) {
  int h2 = w.nx[h];
  const Vec2<Rational>&u = w.hol[h], &v = w.hol[h2];
  Rational vu = vcoef(w, a, h), vv = vcoef(w, a, h2);
  return {cross(u, v), vu * cross(c, v) - vv * cross(c, u)};
}

bool lex_positive(const TriangleLinear& t) {
  int s = sign(t.value);
  return s > 0 || (s == 0 && sign(t.slope) > 0);
}

void advance(Work& w, const RelVector& a, const Vec2<Rational>& c, const Rational& dt) {
  for (size_t h = 0; h < w.hol.size(); ++h) {
    Rational vc = vcoef(w, a, static_cast<int>(h)) * dt;
    w.hol[h].x += vc * c.x;
    w.hol[h].y += vc * c.y;
  }
}

// Flip inside the event loop; the degenerate-quad variant of flip() that
// admits zero current area as long as the area grows. Returns the record
// for homology transport.
FlipRecord work_flip(Work& w, int h) {
  // Build the record from the raw arrays, then rewire.
  FlipRecord rec;
  int t = w.tw[h];
  rec.edge = std::min(h, t);
  rec.edge_sign = (rec.edge == h) ? 1 : -1;
  int m1 = w.nx[t], m2 = w.prev(t);
  rec.r1 = std::min(m1, w.tw[m1]);
  rec.s1 = (rec.r1 == m1) ? 1 : -1;
  rec.r2 = std::min(m2, w.tw[m2]);
  rec.s2 = (rec.r2 == m2) ? 1 : -1;

  int n1 = w.nx[h], n2 = w.prev(h);
  Vec2<Rational> f = w.hol[n2] + w.hol[m1];
  int label_c = w.tail_label[n2], label_d = w.tail_label[m2];
  w.nx[h] = m2;
  w.nx[m2] = n1;
  w.nx[n1] = h;
  w.nx[t] = n2;
  w.nx[n2] = m1;
  w.nx[m1] = t;
  w.hol[h] = f;
  w.hol[t] = -f;
  w.tail_label[h] = label_c;
  w.tail_label[t] = label_d;
  return rec;
}

// Would flipping h leave both new triangles lexicographically positive
// (positive area, or zero area opening up)?
bool flip_admissible(const Work& w, const RelVector& a, const Vec2<Rational>& c, int h) {
  int t = w.tw[h];
  int n1 = w.nx[h], n2 = w.prev(h);
  int m1 = w.nx[t], m2 = w.prev(t);
  if (w.hol[n2].is_zero() || w.hol[m1].is_zero()) return false;
  Vec2<Rational> f = w.hol[n2] + w.hol[m1];
  Rational vf = a.at_label(w.tail_label[n2]) - a.at_label(w.tail_label[m2]);
  auto lin = [&](const Vec2<Rational>& u, const Rational& vu, const Vec2<Rational>& v,
                 const Rational& vv) -> TriangleLinear {
    return {cross(u, v), vu * cross(c, v) - vv * cross(c, u)};
  };
  TriangleLinear t1 = lin(f, vf, w.hol[m2], vcoef(w, a, m2));
  TriangleLinear t2 = lin(-f, -vf, w.hol[n2], vcoef(w, a, n2));
  return lex_positive(t1) && lex_positive(t2);
}

// --- degeneration machinery -------------------------------------------------

struct LabelUnion {
  std::map<int, int> parent;
  int find(int x) {
    auto it = parent.find(x);
    if (it == parent.end() || it->second == x) {
      parent[x] = x;
      return x;
    }
    return parent[x] = find(it->second);
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Contracts the zero-holonomy edge {h, tw[h]}: removes its two (degenerate)
// triangles and re-pairs their outer sides. Merged tails keep the smaller
// label. Returns false on configurations the contraction cannot handle.
bool contract_zero_edge(Work& w, int h, LabelUnion& groups) {
  int t = w.tw[h];
  int n1 = w.nx[h], n2 = w.prev(h);
  int m1 = w.nx[t], m2 = w.prev(t);
  std::set<int> removed = {h, t, n1, n2, m1, m2};
  if (removed.size() != 6) return false;  // the two triangles share an edge

  int lp = w.tail_label[h], lq = w.head_label(h);
  if (lp == lq) return false;
  groups.unite(lp, lq);
  int merged = std::min(lp, lq);

  // Glue constraints among the removed sides: n1 with n2, m1 with m2.
  std::map<int, int> mate = {{n1, n2}, {n2, n1}, {m1, m2}, {m2, m1}};
  auto outer = [&](int x) -> int {
    // follow identifications until an outside half-edge appears
    int cur = x;
    for (int guard = 0; guard < 8; ++guard) {
      int o = w.tw[mate[cur]];
      if (!removed.count(o)) return o;
      cur = o;
    }
    return -1;
  };
  for (int x : {n1, m1}) {
    int o1 = w.tw[x];
    if (removed.count(o1)) continue;  // x's partner resolves through the chain
    int o2 = outer(x);
    if (o2 < 0 || o1 == o2) return false;  // closed pillow or degenerate
    w.tw[o1] = o2;
    w.tw[o2] = o1;
    if (!(w.hol[o1] + w.hol[o2]).is_zero()) return false;
  }
  // sides whose outer partner was also removed and never reached outside:
  // handled above through the chains; verify no survivor still points in
  for (size_t i = 0; i < w.tw.size(); ++i)
    if (!removed.count(static_cast<int>(i)) && removed.count(w.tw[i])) return false;

  // Relabel merged tails.
  for (size_t i = 0; i < w.tail_label.size(); ++i)
    if (w.tail_label[i] == lp || w.tail_label[i] == lq) w.tail_label[i] = merged;

  // Compact away the removed half-edges.
  int n = static_cast<int>(w.nx.size());
  std::vector<int> remap(n, -1);
  int m = 0;
  for (int i = 0; i < n; ++i)
    if (!removed.count(i)) remap[i] = m++;
  Work out;
  out.nx.resize(m);
  out.tw.resize(m);
  out.hol.resize(m);
  out.tail_label.resize(m);
  for (int i = 0; i < n; ++i) {
    if (remap[i] < 0) continue;
    out.nx[remap[i]] = remap[w.nx[i]];
    out.tw[remap[i]] = remap[w.tw[i]];
    out.hol[remap[i]] = w.hol[i];
    out.tail_label[remap[i]] = w.tail_label[i];
  }
  w = std::move(out);
  return true;
}

// Densifies labels to 1..k preserving order; returns old-label -> new-label.
std::map<int, int> densify_labels(Work& w) {
  std::set<int> labs(w.tail_label.begin(), w.tail_label.end());
  std::map<int, int> remap;
  int next_label = 1;
  for (int l : labs) remap[l] = next_label++;
  for (auto& l : w.tail_label) l = remap[l];
  return remap;
}

Degeneration unclassified(const std::string& reason) {
  Degeneration d;
  d.kind = Degeneration::Kind::Unclassified;
  d.reason = reason;
  return d;
}

// Classification core operating on the advanced (raw) state at t*.
Degeneration classify_raw(Work at_star, const std::vector<int>& collapsing) {
  if (collapsing.empty()) return unclassified("empty collapsing set");
  for (int e : collapsing)
    if (!at_star.hol[e].is_zero())
      return unclassified("collapsing edge has nonzero holonomy at t*");

  // Endpoint labels of the collapsing edges.
  std::vector<std::pair<int, int>> ends;
  for (int e : collapsing) ends.push_back({at_star.tail_label[e], at_star.head_label(e)});

  // Forest test on the label graph.
  LabelUnion uf;
  bool forest = true;
  for (auto& [p, q] : ends) {
    if (p == q || uf.find(p) == uf.find(q)) {
      forest = false;
      break;
    }
    uf.unite(p, q);
  }

  if (forest) {
    LabelUnion groups;
    Work w = at_star;
    // Contract edge by edge; collapsing ids shift under compaction, so
    // recompute by holonomy-zero scan restricted to a shrinking set.
    for (size_t step = 0; step < collapsing.size(); ++step) {
      // find a zero edge joining two distinct labels
      int pick = -1;
      for (size_t i = 0; i < w.hol.size(); ++i) {
        int ii = static_cast<int>(i);
        if (ii >= w.tw[ii]) continue;
        if (w.hol[ii].is_zero() && w.tail_label[ii] != w.head_label(ii)) {
          pick = ii;
          break;
        }
      }
      if (pick < 0) return unclassified("collapsing forest lost an edge during contraction");
      if (!contract_zero_edge(w, pick, groups))
        return unclassified("forest contraction hit a non-generic configuration");
    }
    for (size_t i = 0; i < w.hol.size(); ++i)
      if (w.hol[i].is_zero()) return unclassified("zero-length edge survived the contraction");

    Degeneration d;
    d.kind = Degeneration::Kind::FiniteFace;
    std::map<int, std::vector<int>> classes;
    for (auto& [lab, _] : groups.parent) classes[groups.find(lab)].push_back(lab);
    std::map<int, int> dense = densify_labels(w);
    FlatSurfaceQ collapsed;
    try {
      collapsed = surface_from(w);
      require_valid(collapsed);
    } catch (const Error& e) {
      return unclassified(std::string("collapsed surface invalid: ") + e.what());
    }
    StratumSignature sig = stratum(collapsed);  // asserts Gauss-Bonnet
    (void)sig;
    for (auto& [root, members] : classes) {
      std::sort(members.begin(), members.end());
      int merged_label = dense.at(members.front());
      int v = collapsed.vertex_with_label(merged_label);
      d.merged_groups.push_back(members);
      d.merged_orders.push_back(vertex_order(collapsed, v));
    }
    d.collapsed = std::move(collapsed);
    return d;
  }

  // Homologous-pair candidate: exactly two edges with the same endpoints.
  if (collapsing.size() != 2)
    return unclassified("collapsing set is neither a forest nor a pair");
  auto [p1, q1] = ends[0];
  auto [p2, q2] = ends[1];
  if (p1 == q1 || !((p1 == p2 && q1 == q2) || (p1 == q2 && q1 == p2)))
    return unclassified("collapsing pair does not join the same two zeros");

  // Separation: 2-color triangles without crossing the two collapsing edges.
  int e1 = collapsing[0], e2 = collapsing[1];
  std::set<int> cut = {e1, at_star.tw[e1], e2, at_star.tw[e2]};
  int n = static_cast<int>(at_star.nx.size());
  std::vector<int> color(n, -1);  // per half-edge, via triangles
  for (int start : {0, 1}) {
    int seed = (start == 0) ? e1 : at_star.tw[e1];
    if (color[seed] != -1) continue;
    std::vector<int> stack = {seed};
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      if (color[x] != -1) continue;
      // color the whole triangle
      for (int y : {x, at_star.nx[x], at_star.prev(x)}) {
        color[y] = start;
        if (!cut.count(y) && color[at_star.tw[y]] == -1) stack.push_back(at_star.tw[y]);
      }
    }
  }
  if (std::any_of(color.begin(), color.end(), [](int c) { return c == -1; }))
    return unclassified("internal: coloring did not cover the surface");
  if (color[at_star.tw[e1]] == color[e1])
    return unclassified("collapsing pair does not separate the surface");
  if (color[e2] == color[at_star.tw[e2]] || color[e1] == color[e2])
    return unclassified("collapsing pair edges are not aligned across the node");

  Degeneration d;
  d.kind = Degeneration::Kind::InfiniteFace;
  std::vector<int> genera;
  for (int side = 0; side < 2; ++side) {
    // Extract the side, seal its bigon boundary, contract the node edge.
    std::vector<int> remap(n, -1);
    int m = 0;
    for (int i = 0; i < n; ++i)
      if (color[i] == side) remap[i] = m++;
    Work comp;
    comp.nx.resize(m);
    comp.tw.resize(m);
    comp.hol.resize(m);
    comp.tail_label.resize(m);
    int s1 = color[e1] == side ? e1 : at_star.tw[e1];
    int s2 = color[e2] == side ? e2 : at_star.tw[e2];
    for (int i = 0; i < n; ++i) {
      if (remap[i] < 0) continue;
      comp.nx[remap[i]] = remap[at_star.nx[i]];
      comp.hol[remap[i]] = at_star.hol[i];
      comp.tail_label[remap[i]] = at_star.tail_label[i];
      int partner = (i == s1) ? s2 : (i == s2 ? s1 : at_star.tw[i]);
      if (remap[partner] < 0) return unclassified("internal: cut boundary mismatch");
      comp.tw[remap[i]] = remap[partner];
    }
    LabelUnion node_groups;
    if (!contract_zero_edge(comp, remap[s1], node_groups))
      return unclassified("node sealing hit a non-generic configuration");
    for (size_t i = 0; i < comp.hol.size(); ++i)
      if (comp.hol[i].is_zero())
        return unclassified("zero-length edge in a split component");
    int node_old_label = std::min(p1, q1);
    std::map<int, int> dense = densify_labels(comp);
    FlatSurfaceQ cs;
    try {
      cs = surface_from(comp);
      require_valid(cs);
    } catch (const Error& e) {
      return unclassified(std::string("split component invalid: ") + e.what());
    }
    StratumSignature sig = stratum(cs);
    genera.push_back(sig.genus);
    int node_v = cs.vertex_with_label(dense.at(node_old_label));
    d.node_vertex.push_back(node_v);
    d.node_regular.push_back(vertex_order(cs, node_v) == 0);
    d.components.push_back(std::move(cs));
  }
  // Order the components by descending genus.
  if (genera[0] < genera[1]) {
    std::swap(d.components[0], d.components[1]);
    std::swap(d.node_vertex[0], d.node_vertex[1]);
    std::vector<bool> nr = {d.node_regular[1], d.node_regular[0]};
    d.node_regular = nr;
    std::swap(genera[0], genera[1]);
  }
  d.genus1 = genera[0];
  d.genus2 = genera[1];
  return d;
}

}  // namespace

FlowOutcome rel_flow(const FlatSurfaceQ& s, const RelVector& a, const Rational& t_target,
                     const FlowOptions& opt) {
  require_valid(s);
  if (a.k() != s.n_vertices())
    throw UsageError("RelVector length does not match the number of labeled points");
  if (sign(t_target) < 0) throw UsageError("flow time must be nonnegative");
  if (opt.direction.is_zero()) throw UsageError("flow direction must be nonzero");

  FlowOutcome out;
  Work w = work_from(s);
  const Vec2<Rational>& c = opt.direction;
  Rational t_now(0);

  while (true) {
    // Next event: earliest positive root of a triangle area.
    std::optional<Rational> tau;
    for (size_t h = 0; h < w.nx.size(); ++h) {
      int hh = static_cast<int>(h);
      if (hh != std::min({hh, w.nx[hh], w.prev(hh)})) continue;  // one rep per triangle
      TriangleLinear lin = area_linear(w, a, c, hh);
      if (sign(lin.slope) >= 0) continue;
      Rational root = -lin.value / lin.slope;
      if (sign(root) <= 0) continue;  // events in the open future only
      if (!tau || root < *tau) tau = root;
    }

    Rational remaining = t_target - t_now;
    if (!tau || *tau > remaining) {
      advance(w, a, c, remaining);
      out.boundary = false;
      out.elapsed = t_target;
      out.surface = surface_from(w);
      require_valid(*out.surface);
      return out;
    }

    // Snapshot a valid surface strictly before the event for classification.
    FlatSurfaceQ before_snapshot = [&] {
      Work half = w;
      advance(half, a, c, *tau / 2);
      return surface_from(half);
    }();

    advance(w, a, c, *tau);
    t_now += *tau;

    // Collapsing edges: zero holonomy at the event time.
    std::vector<int> zero_edges;
    for (size_t h = 0; h < w.nx.size(); ++h) {
      int hh = static_cast<int>(h);
      if (hh >= w.tw[hh]) continue;
      if (w.hol[hh].is_zero()) zero_edges.push_back(hh);
    }
    if (!zero_edges.empty()) {
      out.boundary = true;
      out.elapsed = t_now;
      out.collapsing = zero_edges;
      out.before = before_snapshot;
      out.dt_before = *tau / 2;
      if (opt.classify) out.degeneration = classify_raw(w, zero_edges);
      return out;
    }

    // Repair all degenerate triangles by flips.
    bool progressed = true;
    while (progressed) {
      progressed = false;
      std::vector<int> degenerate;
      for (size_t h = 0; h < w.nx.size(); ++h) {
        int hh = static_cast<int>(h);
        if (hh != std::min({hh, w.nx[hh], w.prev(hh)})) continue;
        TriangleLinear lin = area_linear(w, a, c, hh);
        if (sign(lin.value) < 0)
          throw ValidationError("internal: negative area inside the event loop");
        if (sign(lin.value) == 0 && sign(lin.slope) <= 0) degenerate.push_back(hh);
      }
      if (degenerate.empty()) break;
      for (int rep : degenerate) {
        TriangleLinear lin = area_linear(w, a, c, rep);
        if (!(sign(lin.value) == 0 && sign(lin.slope) <= 0)) continue;  // fixed already
        // ascending edge-index order within the triangle
        std::vector<int> candidates = {rep, w.nx[rep], w.prev(rep)};
        std::sort(candidates.begin(), candidates.end());
        bool flipped = false;
        for (int e : candidates) {
          if (flip_admissible(w, a, c, e)) {
            out.flips.push_back(work_flip(w, e));
            flipped = true;
            break;
          }
        }
        if (flipped) {
          progressed = true;
          if (++out.events > opt.event_budget)
            throw BudgetError("EventBudgetExceeded: more than " +
                              std::to_string(opt.event_budget) +
                              " flips; suspected Zeno accumulation near a non-generic collapse");
        }
      }
      if (!progressed && !degenerate.empty())
        throw ValidationError("internal: flow stuck at a non-generic event");
    }
  }
}

std::optional<Rational> collapse_time(const FlatSurfaceQ& s, const RelVector& a,
                                      const Rational& length2, const TraceBudget& budget) {
  require_valid(s);
  if (a.k() != s.n_vertices())
    throw UsageError("RelVector length does not match the number of labeled points");
  std::optional<Rational> best;
  for (const SaddleConnectionQ& sc : horizontal_connections(s, length2, budget)) {
    Rational b = rel_cocycle_eval(a, sc.from_label, sc.to_label);
    if (sign(b) <= 0) continue;  // infinite or negative weighted length
    Rational wa = sc.holonomy.x / b;
    if (!best || wa < *best) best = wa;
  }
  return best;
}

FlowOutcome conjugated_rel_flow(const FlatSurfaceQ& s, const RelVector& a,
                                const UnitRotation& r, const Rational& t_target,
                                const FlowOptions& opt) {
  FlowOptions o = opt;
  o.direction = {r.c, -r.s};
  return rel_flow(s, a, t_target, o);
}

Degeneration classify_degeneration(const FlatSurfaceQ& before, const RelVector& a,
                                   const Vec2<Rational>& direction, const Rational& dt,
                                   const std::vector<int>& collapsing) {
  require_valid(before);
  if (collapsing.empty()) throw UsageError("collapsing set must be nonempty");
  Work w = work_from(before);
  advance(w, a, direction, dt);
  return classify_raw(std::move(w), collapsing);
}

}  // namespace relflow
