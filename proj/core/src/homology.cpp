#include "relflow/homology.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace relflow {

RelVector::RelVector(std::vector<Rational> weights) : w_(std::move(weights)) {
  Rational sum{};
  for (const auto& x : w_) sum += x;
  if (sum != 0)
    throw ValidationError("RelVector weights must sum to zero");
}

bool RelVector::is_zero() const {
  return std::all_of(w_.begin(), w_.end(), [](const Rational& x) { return x == 0; });
}

RelVector RelVector::scaled(const Rational& c) const {
  std::vector<Rational> w = w_;
  for (auto& x : w) x *= c;
  return RelVector(std::move(w));
}

Rational rel_cocycle_eval(const RelVector& a, int from_label, int to_label) {
  return a.at_label(to_label) - a.at_label(from_label);
}

void chain_add(Chain& chain, const Triangulation& tri, int h, const BigInt& c) {
  if (c == 0) return;
  int e = tri.edge_id(h);
  BigInt& slot = chain[e];
  slot += (h == e) ? c : -c;
  if (slot == 0) chain.erase(e);
}

template <class R>
Vec2<R> chain_period(const FlatSurface<R>& s, const Chain& chain) {
  Vec2<R> out{};
  for (const auto& [e, c] : chain) {
    const Vec2<R>& u = s.hol(e);
    if constexpr (is_exact_v<R>) {
      Rational f(c);
      out += Vec2<R>{u.x * f, u.y * f};
    } else {
      double f = c.get_d();
      out += Vec2<R>{u.x * f, u.y * f};
    }
  }
  return out;
}

template <class R>
std::map<int, BigInt> chain_boundary(const FlatSurface<R>& s, const Chain& chain) {
  std::map<int, BigInt> b;
  for (const auto& [e, c] : chain) {
    b[s.vertex_at_head(e)] += c;
    b[s.vertex_at_tail(e)] -= c;
  }
  for (auto it = b.begin(); it != b.end();)
    it = (it->second == 0) ? b.erase(it) : std::next(it);
  return b;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

// Unimodular row reduction to echelon form; optionally tracks the transform.
// Returns the rank.
int echelonize(std::vector<std::vector<BigInt>>& m, std::vector<std::vector<BigInt>>* u) {
  int rows = static_cast<int>(m.size());
  if (rows == 0) return 0;
  int cols = static_cast<int>(m[0].size());
  int r = 0;
  for (int col = 0; col < cols && r < rows; ++col) {
    int pivot = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][col] != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(m[r], m[pivot]);
    if (u) std::swap((*u)[r], (*u)[pivot]);
    for (int j = r + 1; j < rows; ++j) {
      if (m[j][col] == 0) continue;
      BigInt a = m[r][col], b = m[j][col], g, x, y;
      mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
      BigInt ag = a / g, bg = b / g;
      for (int c2 = 0; c2 < cols; ++c2) {
        BigInt mr = m[r][c2], mj = m[j][c2];
        m[r][c2] = x * mr + y * mj;
        m[j][c2] = ag * mj - bg * mr;
      }
      if (u) {
        int ucols = static_cast<int>((*u)[0].size());
        for (int c2 = 0; c2 < ucols; ++c2) {
          BigInt ur = (*u)[r][c2], uj = (*u)[j][c2];
          (*u)[r][c2] = x * ur + y * uj;
          (*u)[j][c2] = ag * uj - bg * ur;
        }
      }
    }
    ++r;
  }
  return r;
}

}  // namespace

int integer_rank(std::vector<std::vector<BigInt>> m) { return echelonize(m, nullptr); }

std::vector<std::vector<BigInt>> integer_left_kernel(const std::vector<std::vector<BigInt>>& m_in) {
  auto m = m_in;
  int rows = static_cast<int>(m.size());
  std::vector<std::vector<BigInt>> u(rows, std::vector<BigInt>(rows, 0));
  for (int i = 0; i < rows; ++i) u[i][i] = 1;
  int rank = echelonize(m, &u);
  std::vector<std::vector<BigInt>> kernel(u.begin() + rank, u.end());
  return kernel;
}

template <class R>
PeriodChart period_chart(const FlatSurface<R>& s) {
  require_valid(s);
  const Triangulation& tri = s.tri();
  PeriodChart chart;
  chart.n_half_edges = s.n_half_edges();
  chart.n_vertices = s.n_vertices();

  std::vector<int> edges;
  for (int h = 0; h < s.n_half_edges(); ++h)
    if (h < tri.twin(h)) edges.push_back(h);

  UnionFind vertex_uf(s.n_vertices());
  std::vector<char> in_tree(s.n_half_edges(), 0);
  for (int e : edges)
    if (vertex_uf.unite(s.vertex_at_tail(e), s.vertex_at_head(e))) {
      chart.tree.push_back(e);
      in_tree[e] = 1;
    }

  UnionFind face_uf(s.n_triangles());
  std::vector<char> in_dual(s.n_half_edges(), 0);
  for (int e : edges) {
    if (in_tree[e]) continue;
    if (face_uf.unite(tri.triangle_of(e), tri.triangle_of(tri.twin(e)))) {
      chart.dual_tree.push_back(e);
      in_dual[e] = 1;
    }
  }
  if (static_cast<int>(chart.dual_tree.size()) != s.n_triangles() - 1)
    throw ValidationError("tree-cotree decomposition failed");

  for (int e : edges)
    if (!in_dual[e]) chart.generators.push_back(e);

  // Boundary matrix of the generators and its saturated left kernel: the
  // absolute cycles.
  std::vector<std::vector<BigInt>> boundary;
  boundary.reserve(chart.generators.size());
  for (int e : chart.generators) {
    std::vector<BigInt> row(s.n_vertices(), 0);
    row[s.vertex_at_head(e)] += 1;
    row[s.vertex_at_tail(e)] -= 1;
    boundary.push_back(std::move(row));
  }
  chart.abs_coeffs = integer_left_kernel(boundary);
  return chart;
}

namespace {

void check_chart(int n_half_edges, int n_vertices, const PeriodChart& chart) {
  if (chart.n_half_edges != n_half_edges || chart.n_vertices != n_vertices)
    throw ValidationError("ChartMismatch: chart built from different combinatorics");
}

}  // namespace

template <class R>
std::vector<Vec2<R>> periods(const FlatSurface<R>& s, const PeriodChart& chart) {
  check_chart(s.n_half_edges(), s.n_vertices(), chart);
  std::vector<Vec2<R>> out;
  out.reserve(chart.generators.size());
  for (int e : chart.generators) out.push_back(s.hol(e));
  return out;
}

template <class R>
std::vector<Vec2<R>> absolute_periods(const FlatSurface<R>& s, const PeriodChart& chart) {
  std::vector<Vec2<R>> gen = periods(s, chart);
  std::vector<Vec2<R>> out;
  out.reserve(chart.abs_coeffs.size());
  for (const auto& row : chart.abs_coeffs) {
    Vec2<R> v{};
    for (size_t j = 0; j < row.size(); ++j) {
      if (row[j] == 0) continue;
      if constexpr (is_exact_v<R>) {
        Rational f(row[j]);
        v += Vec2<R>{gen[j].x * f, gen[j].y * f};
      } else {
        double f = row[j].get_d();
        v += Vec2<R>{gen[j].x * f, gen[j].y * f};
      }
    }
    out.push_back(v);
  }
  return out;
}

template <class R>
int rel_rank(const FlatSurface<R>& s) {
  PeriodChart chart = period_chart(s);
  int k = s.n_vertices();
  if (k <= 1) return 0;
  // Cocycle e_i - e_1 evaluated on generator g = (label(head) == i) -
  // (label(tail) == i) - (label(head) == 1) + (label(tail) == 1).
  std::vector<std::vector<BigInt>> m;
  for (int i = 2; i <= k; ++i) {
    std::vector<BigInt> row;
    row.reserve(chart.generators.size());
    for (int e : chart.generators) {
      int head = s.label(s.vertex_at_head(e));
      int tail = s.label(s.vertex_at_tail(e));
      long v = (head == i) - (tail == i) - (head == 1) + (tail == 1);
      row.push_back(BigInt(v));
    }
    m.push_back(std::move(row));
  }
  return integer_rank(std::move(m));
}

FlipRecord flip_record(const Triangulation& tri, int h) {
  FlipRecord rec;
  int t = tri.twin(h);
  rec.edge = tri.edge_id(h);
  rec.edge_sign = (rec.edge == h) ? 1 : -1;
  int m1 = tri.next(t);  // A -> D
  int m2 = tri.prev(t);  // D -> B
  rec.r1 = tri.edge_id(m1);
  rec.s1 = (rec.r1 == m1) ? 1 : -1;
  rec.r2 = tri.edge_id(m2);
  rec.s2 = (rec.r2 == m2) ? 1 : -1;
  return rec;
}

Chain transport_chain(Chain chain, const std::vector<FlipRecord>& flips) {
  for (const FlipRecord& rec : flips) {
    auto it = chain.find(rec.edge);
    if (it == chain.end()) continue;
    BigInt c = it->second;
    chain.erase(it);
    // canonical(edge) = edge_sign * (A->B) and A->B = (A->D) + (D->B)
    auto add = [&chain](int e, const BigInt& v) {
      if (v == 0) return;
      BigInt& slot = chain[e];
      slot += v;
      if (slot == 0) chain.erase(e);
    };
    add(rec.r1, c * rec.edge_sign * rec.s1);
    add(rec.r2, c * rec.edge_sign * rec.s2);
  }
  return chain;
}

bool PeriodModule::operator==(const PeriodModule& o) const {
  return den == o.den && rows == o.rows;
}

PeriodModule period_module(const std::vector<Vec2<Rational>>& vectors) {
  BigInt den = 1;
  for (const auto& v : vectors) {
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.x.get_den().get_mpz_t());
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.y.get_den().get_mpz_t());
  }
  std::vector<std::vector<BigInt>> m;
  for (const auto& v : vectors) {
    Rational x = v.x * Rational(den), y = v.y * Rational(den);
    m.push_back({BigInt(x.get_num()), BigInt(y.get_num())});
  }
  int rank = echelonize(m, nullptr);
  m.resize(rank);
  // Hermite normalization: positive pivots, entries above pivots reduced.
  for (int i = rank - 1; i >= 0; --i) {
    int p = 0;
    while (p < 2 && m[i][p] == 0) ++p;
    if (p == 2) continue;
    if (m[i][p] < 0)
      for (auto& x : m[i]) x = -x;
    for (int j = 0; j < i; ++j) {
      if (m[j][p] == 0) continue;
      BigInt q;
      mpz_fdiv_q(q.get_mpz_t(), m[j][p].get_mpz_t(), m[i][p].get_mpz_t());
      for (int c = 0; c < 2; ++c) m[j][c] -= q * m[i][c];
    }
  }
  // Minimize the denominator: divide out the common content.
  BigInt g = den;
  for (const auto& row : m)
    for (const auto& x : row) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g > 1) {
    den /= g;
    for (auto& row : m)
      for (auto& x : row) x /= g;
  }
  PeriodModule mod;
  mod.den = den;
  for (auto& row : m) mod.rows.push_back({row[0], row[1]});
  return mod;
}

template Vec2<Rational> chain_period(const FlatSurfaceQ&, const Chain&);
template Vec2<double> chain_period(const FlatSurfaceD&, const Chain&);
template std::map<int, BigInt> chain_boundary(const FlatSurfaceQ&, const Chain&);
template std::map<int, BigInt> chain_boundary(const FlatSurfaceD&, const Chain&);
template PeriodChart period_chart(const FlatSurfaceQ&);
template PeriodChart period_chart(const FlatSurfaceD&);
template std::vector<Vec2<Rational>> periods(const FlatSurfaceQ&, const PeriodChart&);
template std::vector<Vec2<double>> periods(const FlatSurfaceD&, const PeriodChart&);
template std::vector<Vec2<Rational>> absolute_periods(const FlatSurfaceQ&, const PeriodChart&);
template std::vector<Vec2<double>> absolute_periods(const FlatSurfaceD&, const PeriodChart&);
template int rel_rank(const FlatSurfaceQ&);
template int rel_rank(const FlatSurfaceD&);

}  // namespace relflow
