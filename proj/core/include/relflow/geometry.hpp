#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace relflow {

// Exact scalar backend. Arithmetic on Rational is associative and
// commutative exactly; equality is decidable. Surfaces with irrational
// coordinates use the double backend instead; a surface never mixes the two.
using Rational = mpq_class;
using BigInt = mpz_class;

template <class R>
inline constexpr bool is_exact_v = std::is_same_v<R, Rational>;

inline int sign(const Rational& q) { return sgn(q); }
inline int sign(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

// Parses "p/q" or "p"; also accepts decimal literals ("0.25") for
// convenience on the command line.
Rational rational_from_string(const std::string& s);
std::string to_string(const Rational& q);
std::string to_string(double x);  // round-trip precision (max_digits10)

enum class ErrorCode {
  Validation,    // exit code 1 territory
  Budget,        // exit code 2
  Usage,         // exit code 3
};

struct Error : std::runtime_error {
  ErrorCode code;
  Error(ErrorCode c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(ErrorCode::Validation, msg) {}
};

struct BudgetError : Error {
  explicit BudgetError(const std::string& msg) : Error(ErrorCode::Budget, msg) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& msg) : Error(ErrorCode::Usage, msg) {}
};

template <class R>
struct Vec2 {
  R x{};
  R y{};

  Vec2() = default;
  Vec2(R xx, R yy) : x(std::move(xx)), y(std::move(yy)) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2 operator*(const R& c) const { return {x * c, y * c}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
  bool operator!=(const Vec2& o) const { return !(*this == o); }
  bool is_zero() const { return sign(x) == 0 && sign(y) == 0; }
};

template <class R>
inline R cross(const Vec2<R>& u, const Vec2<R>& v) {
  return u.x * v.y - u.y * v.x;
}

template <class R>
inline R dot(const Vec2<R>& u, const Vec2<R>& v) {
  return u.x * v.x + u.y * v.y;
}

template <class R>
inline R norm2(const Vec2<R>& u) {
  return u.x * u.x + u.y * u.y;
}

// Fixed relative tolerance of the float backend. Direction tests on doubles
// treat |cross(u,v)| <= kFloatTol * |u| * |v| as zero.
inline constexpr double kFloatTol = 1e-9;

// Sign of cross(u, v) with backend-appropriate zero test.
inline int cross_sign(const Vec2<Rational>& u, const Vec2<Rational>& v) {
  return sign(cross(u, v));
}
inline int cross_sign(const Vec2<double>& u, const Vec2<double>& v) {
  double c = cross(u, v);
  double bound = kFloatTol * std::sqrt(norm2(u) * norm2(v));
  if (std::fabs(c) <= bound) return 0;
  return c > 0 ? 1 : -1;
}

// u and v span the same oriented ray from the origin.
template <class R>
inline bool same_direction(const Vec2<R>& u, const Vec2<R>& v) {
  return cross_sign(u, v) == 0 && sign(dot(u, v)) > 0;
}

// d lies in the half-open angular sector [u, w) swept counterclockwise,
// assuming the sector is convex (angle < pi). Used for corner containment.
template <class R>
inline bool sector_contains(const Vec2<R>& u, const Vec2<R>& w, const Vec2<R>& d) {
  if (same_direction(u, d)) return true;
  return cross_sign(u, d) > 0 && cross_sign(d, w) > 0;
}

// Exact rational point on the unit circle, e.g. (3/5, 4/5). Models rotations
// that keep the exact backend exact.
struct UnitRotation {
  Rational c;  // cos
  Rational s;  // sin
  UnitRotation(Rational cc, Rational ss);
  UnitRotation inverse() const { return {c, -s}; }
  // From a Pythagorean parameter pair (m, n), m > n > 0.
  static UnitRotation pythagorean(long m, long n);
};

}  // namespace relflow
