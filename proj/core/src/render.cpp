#include "relflow/render.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "relflow/tracing.hpp"

namespace relflow {

namespace {

template <class R>
struct Layout {
  std::vector<Vec2<double>> corner;  // position of tail(h) per half-edge
  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};

// BFS development of the triangulation into the plane.
template <class R>
Layout<R> develop(const FlatSurface<R>& s) {
  const Triangulation& tri = s.tri();
  Layout<R> out;
  out.corner.assign(s.n_half_edges(), {0, 0});
  std::vector<char> placed(s.n_triangles(), 0);
  std::vector<int> queue = {0};
  placed[0] = 1;
  // anchor triangle 0 at the origin
  {
    int h = tri.triangle_rep(0);
    Vec2<double> p{0, 0};
    for (int i = 0; i < 3; ++i) {
      out.corner[h] = p;
      p = p + Vec2<double>{to_double(s.hol(h).x), to_double(s.hol(h).y)};
      h = tri.next(h);
    }
  }
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int t = queue[qi];
    int h = tri.triangle_rep(t);
    for (int i = 0; i < 3; ++i) {
      int o = tri.twin(h);
      int u = tri.triangle_of(o);
      if (!placed[u]) {
        placed[u] = 1;
        // tail(o) sits at head(h): out.corner[next(h)]
        Vec2<double> p = out.corner[tri.next(h)];
        int g = o;
        for (int j = 0; j < 3; ++j) {
          out.corner[g] = p;
          p = p + Vec2<double>{to_double(s.hol(g).x), to_double(s.hol(g).y)};
          g = tri.next(g);
        }
        queue.push_back(u);
      }
      h = tri.next(h);
    }
  }
  for (const auto& p : out.corner) {
    out.min_x = std::min(out.min_x, p.x);
    out.min_y = std::min(out.min_y, p.y);
    out.max_x = std::max(out.max_x, p.x);
    out.max_y = std::max(out.max_y, p.y);
  }
  return out;
}

// Cutting along the two edges disconnects the triangle adjacency graph.
template <class R>
bool separating_pair(const FlatSurface<R>& s, int e1, int e2) {
  const Triangulation& tri = s.tri();
  std::set<int> cut = {e1, tri.twin(e1), e2, tri.twin(e2)};
  std::vector<char> seen(s.n_triangles(), 0);
  std::vector<int> stack = {tri.triangle_of(e1)};
  seen[stack[0]] = 1;
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    int h = tri.triangle_rep(t);
    for (int i = 0; i < 3; ++i) {
      if (!cut.count(h)) {
        int u = tri.triangle_of(tri.twin(h));
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
      h = tri.next(h);
    }
  }
  return !seen[tri.triangle_of(tri.twin(e1))];
}

// Edges that form a homologous pair: same endpoints and holonomy, exactly
// two of them, and cutting along both separates the surface.
template <class R>
std::vector<char> bigon_edges(const FlatSurface<R>& s) {
  const Triangulation& tri = s.tri();
  std::vector<char> mark(s.n_half_edges(), 0);
  std::map<std::tuple<int, int, std::string, std::string>, std::vector<int>> families;
  for (int h = 0; h < s.n_half_edges(); ++h) {
    if (h > tri.twin(h)) continue;
    int from = s.label(s.vertex_at_tail(h));
    int to = s.label(s.vertex_at_head(h));
    Vec2<R> hol = s.hol(h);
    if (from == to) continue;
    if (from > to) {
      std::swap(from, to);
      hol = -hol;
    }
    families[{from, to, to_string(hol.x), to_string(hol.y)}].push_back(h);
  }
  for (auto& [_, edges] : families)
    if (edges.size() == 2 && separating_pair(s, edges[0], edges[1]))
      for (int h : edges) mark[h] = 1;
  return mark;
}

template <class R>
std::string render_impl(const FlatSurface<R>& s, const RenderOptions& opt) {
  Layout<R> lay = develop(s);
  const Triangulation& tri = s.tri();
  double w = lay.max_x - lay.min_x, h = lay.max_y - lay.min_y;
  double pad = 0.05 * std::max(w, h) + 0.01;
  double scale = 640.0 / std::max(w + 2 * pad, h + 2 * pad);
  auto px = [&](const Vec2<double>& p) {
    std::ostringstream os;
    os << (p.x - lay.min_x + pad) * scale << "," << (lay.max_y - p.y + pad) * scale;
    return os.str();
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << (w + 2 * pad) * scale << "\" height=\"" << (h + 2 * pad) * scale << "\">\n";
  svg << "<style>.edge{stroke:#888;stroke-width:1;} .bigon{stroke:#d22;stroke-width:3;} "
         ".conn{stroke:#27c;stroke-width:1;stroke-dasharray:4 2;} "
         ".zero{fill:#222;} text{font:10px sans-serif;}</style>\n";

  for (int t = 0; t < s.n_triangles(); ++t) {
    int a = tri.triangle_rep(t);
    svg << "<polygon fill=\"#f5f2ea\" stroke=\"none\" points=\"" << px(lay.corner[a]) << " "
        << px(lay.corner[tri.next(a)]) << " " << px(lay.corner[tri.prev(a)]) << "\"/>\n";
  }
  std::vector<char> bigon = bigon_edges(s);
  for (int h2 = 0; h2 < s.n_half_edges(); ++h2) {
    Vec2<double> a = lay.corner[h2], b = lay.corner[tri.next(h2)];
    std::string pa = px(a), pb = px(b);
    auto xy = [](const std::string& p) {
      auto c = p.find(',');
      return std::make_pair(p.substr(0, c), p.substr(c + 1));
    };
    auto [ax, ay] = xy(pa);
    auto [bx, by] = xy(pb);
    const char* cls = (h2 < tri.twin(h2) && bigon[h2]) ? "bigon" : "edge";
    svg << "<line class=\"" << cls << "\" x1=\"" << ax << "\" y1=\"" << ay << "\" x2=\"" << bx
        << "\" y2=\"" << by << "\"/>\n";
  }
  // zeros: one dot per corner, labeled once per vertex at its first corner
  std::vector<char> labeled(s.n_vertices(), 0);
  for (int h2 = 0; h2 < s.n_half_edges(); ++h2) {
    int v = s.vertex_at_tail(h2);
    std::string pa = px(lay.corner[h2]);
    auto c = pa.find(',');
    svg << "<circle class=\"zero\" cx=\"" << pa.substr(0, c) << "\" cy=\"" << pa.substr(c + 1)
        << "\" r=\"2.5\"/>\n";
    if (!labeled[v]) {
      labeled[v] = 1;
      svg << "<text x=\"" << pa.substr(0, c) << "\" y=\"" << pa.substr(c + 1) << "\" dx=\"4\" "
          << "dy=\"-4\">z" << s.label(v) << "</text>\n";
    }
  }
  if (opt.connections_length2) {
    // overlay saddle connections as rays from developed corners
    R bound;
    if constexpr (is_exact_v<R>)
      bound = Rational(*opt.connections_length2);
    else
      bound = *opt.connections_length2;
    for (const auto& sc : saddle_connections(s, bound)) {
      Vec2<double> a = lay.corner[sc.start_corner];
      Vec2<double> b = a + Vec2<double>{to_double(sc.holonomy.x), to_double(sc.holonomy.y)};
      std::string pa = px(a), pb = px(b);
      auto ca = pa.find(','), cb = pb.find(',');
      svg << "<line class=\"conn\" x1=\"" << pa.substr(0, ca) << "\" y1=\"" << pa.substr(ca + 1)
          << "\" x2=\"" << pb.substr(0, cb) << "\" y2=\"" << pb.substr(cb + 1) << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::string render_svg(const AnySurface& s, const RenderOptions& opt) {
  if (s.backend == "exact") return render_impl(*s.exact, opt);
  return render_impl(*s.floating, opt);
}

}  // namespace relflow
