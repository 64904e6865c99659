#include "relflow/catalog.hpp"

#include "relflow/surgery.hpp"

namespace relflow {

FlatSurfaceQ torus(const Vec2<Rational>& u, const Vec2<Rational>& w) {
  if (sign(cross(u, w)) <= 0)
    throw UsageError("torus basis must be positively oriented");
  // Triangles (0, u, u+w) and (0, u+w, w) over the single lattice point.
  std::vector<int32_t> nx = {1, 2, 0, 4, 5, 3};
  std::vector<int32_t> tw = {4, 5, 3, 2, 0, 1};
  std::vector<Vec2<Rational>> hol = {u, w, -u - w, u + w, -u, -w};
  return FlatSurfaceQ(Triangulation(std::move(nx), std::move(tw)), std::move(hol), {1});
}

FlatSurfaceQ torus_with_point(const Vec2<Rational>& u, const Vec2<Rational>& w,
                              const Rational& alpha, const Rational& beta) {
  if (sign(cross(u, w)) <= 0)
    throw UsageError("torus basis must be positively oriented");
  if (!(sign(alpha) > 0 && alpha < 1 && sign(beta) > 0 && beta < 1))
    throw UsageError("interior point coefficients must lie strictly inside (0,1)");
  Vec2<Rational> p{alpha * u.x + beta * w.x, alpha * u.y + beta * w.y};
  Vec2<Rational> zero{Rational(0), Rational(0)};
  Vec2<Rational> corners[4] = {zero, u, u + w, w};
  // Fan of four triangles (corner_i, corner_{i+1}, p).
  std::vector<int32_t> nx, tw;
  std::vector<Vec2<Rational>> hol;
  for (int i = 0; i < 4; ++i) {
    int base = 3 * i;
    nx.push_back(base + 1);
    nx.push_back(base + 2);
    nx.push_back(base);
    const Vec2<Rational>&a = corners[i], &b = corners[(i + 1) % 4];
    hol.push_back(b - a);
    hol.push_back(p - b);
    hol.push_back(a - p);
    tw.push_back(0);
    tw.push_back(0);
    tw.push_back(0);
  }
  // Side i is half-edge 3i; opposite sides glue: 0 with 6, 3 with 9.
  tw[0] = 6;
  tw[6] = 0;
  tw[3] = 9;
  tw[9] = 3;
  // Spokes: (corner -> p) of triangle i twins (p -> corner) of triangle i-1.
  for (int i = 0; i < 4; ++i) {
    int in = 3 * i + 1;                 // corner_{i+1} -> p
    int out = 3 * ((i + 1) % 4) + 2;    // p -> corner_{i+1}
    tw[in] = out;
    tw[out] = in;
  }
  return FlatSurfaceQ(Triangulation(std::move(nx), std::move(tw)), std::move(hol), {1, 2});
}

FlatSurfaceQ square_torus() {
  return torus({Rational(1), Rational(0)}, {Rational(0), Rational(1)});
}

FlatSurfaceQ slit_tori(const Vec2<Rational>& slit) {
  return slit_glue(square_torus(), 1, square_torus(), 1, slit);
}

FlatSurfaceQ genus2_surface() {
  FlatSurfaceQ t1 = square_torus();
  FlatSurfaceQ t2 = torus({Rational(3) / 2, Rational(0)}, {Rational(1) / 4, Rational(1)});
  return slit_glue(t1, 1, t2, 1, {Rational(2) / 3, Rational(0)});
}

FlatSurfaceQ genus3_surface() {
  FlatSurfaceQ t1 = square_torus();
  FlatSurfaceQ t2 = torus_with_point({Rational(1), Rational(0)}, {Rational(0), Rational(1)},
                                     Rational(1) / 3, Rational(1) / 2);
  FlatSurfaceQ g1 = slit_glue(t1, 1, t2, 1, {Rational(1) / 2, Rational(0)});
  // g1 labels: the interior marked point of t2 is 1, the new zeros 2 and 3.
  FlatSurfaceQ t3 = torus({Rational(1), Rational(0)}, {Rational(1) / 4, Rational(1)});
  return slit_glue(g1, 1, t3, 1, {Rational(1) / 3, Rational(0)});
}

FlatSurfaceD decagon_surface() {
  // Circumradius-one regular decagon, vertices at angles 2*pi*k/10; the
  // second half is the exact negation of the first so that identified
  // opposite sides carry exactly opposite holonomies.
  static const double vx[5] = {
      1.000000000000000000000000,
      0.8090169943749474241022934,
      0.3090169943749474241022934,
      -0.3090169943749474241022934,
      -0.8090169943749474241022934,
  };
  static const double vy[5] = {
      0.0,
      0.5877852522924731291687060,
      0.9510565162951535721164393,
      0.9510565162951535721164393,
      0.5877852522924731291687060,
  };
  Vec2<double> v[10];
  for (int k = 0; k < 5; ++k) {
    v[k] = {vx[k], vy[k]};
    v[k + 5] = {-vx[k], -vy[k]};
  }
  // Fan from v0: triangle i = (v0, v_{i+1}, v_{i+2}), i = 0..7.
  std::vector<int32_t> nx(24), tw(24, -1);
  std::vector<Vec2<double>> hol(24);
  for (int i = 0; i < 8; ++i) {
    int base = 3 * i;
    nx[base] = base + 1;
    nx[base + 1] = base + 2;
    nx[base + 2] = base;
    hol[base] = v[i + 1] - v[0];
    hol[base + 1] = v[i + 2] - v[i + 1];
    hol[base + 2] = v[0] - v[i + 2];
  }
  // Internal fan diagonals.
  for (int i = 0; i < 7; ++i) {
    tw[3 * i + 2] = 3 * (i + 1);
    tw[3 * (i + 1)] = 3 * i + 2;
  }
  // Boundary sides s_0..s_9: s_0 = he 0, s_k = he 3(k-1)+1 for 1 <= k <= 8,
  // s_9 = he 23. Identify s_k with s_{k+5}.
  auto side = [](int k) { return k == 0 ? 0 : (k == 9 ? 23 : 3 * (k - 1) + 1); };
  for (int k = 0; k < 5; ++k) {
    tw[side(k)] = side(k + 5);
    tw[side(k + 5)] = side(k);
  }
  return FlatSurfaceD(Triangulation(std::move(nx), std::move(tw)), std::move(hol), {1, 2});
}

namespace {

std::optional<Vec2<Rational>> parse_slit_param(const std::string& name) {
  // slit-tori(x[,y])
  const std::string prefix = "slit-tori(";
  if (name.rfind(prefix, 0) != 0 || name.back() != ')') return std::nullopt;
  std::string inner = name.substr(prefix.size(), name.size() - prefix.size() - 1);
  auto comma = inner.find(',');
  Rational x = rational_from_string(comma == std::string::npos ? inner : inner.substr(0, comma));
  Rational y = comma == std::string::npos ? Rational(0)
                                          : rational_from_string(inner.substr(comma + 1));
  return Vec2<Rational>{x, y};
}

}  // namespace

AnySurface catalog_surface(const std::string& name) {
  AnySurface out;
  out.name = name;
  if (name == "torus") {
    out.backend = "exact";
    out.exact = square_torus();
  } else if (name == "genus2") {
    out.backend = "exact";
    out.exact = genus2_surface();
  } else if (name == "genus3") {
    out.backend = "exact";
    out.exact = genus3_surface();
  } else if (name == "decagon") {
    out.backend = "float";
    out.floating = decagon_surface();
  } else if (auto slit = parse_slit_param(name)) {
    out.backend = "exact";
    out.exact = slit_tori(*slit);
  } else {
    throw UsageError("unknown catalog surface '" + name + "'; known: torus, slit-tori(x[,y]), "
                     "genus2, genus3, decagon");
  }
  return out;
}

std::vector<std::string> catalog_names() {
  return {"torus", "slit-tori(1/2)", "genus2", "genus3", "decagon"};
}

}  // namespace relflow
