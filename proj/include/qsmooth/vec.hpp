// Small fixed-dimension vector type used for points, directions, and normals.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>

namespace qsmooth {

template <int D>
struct Vec {
  static_assert(D == 2 || D == 3, "only planar and spatial vectors are supported");
  std::array<double, D> c{};

  constexpr Vec() = default;
  constexpr Vec(double x, double y)
    requires(D == 2)
      : c{x, y} {}
  constexpr Vec(double x, double y, double z)
    requires(D == 3)
      : c{x, y, z} {}

  constexpr double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  constexpr double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  constexpr Vec& operator+=(const Vec& o) {
    for (int i = 0; i < D; ++i) c[i] += o.c[i];
    return *this;
  }
  constexpr Vec& operator-=(const Vec& o) {
    for (int i = 0; i < D; ++i) c[i] -= o.c[i];
    return *this;
  }
  constexpr Vec& operator*=(double s) {
    for (int i = 0; i < D; ++i) c[i] *= s;
    return *this;
  }
  constexpr Vec& operator/=(double s) { return *this *= 1.0 / s; }

  friend constexpr Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend constexpr Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend constexpr Vec operator*(Vec a, double s) { return a *= s; }
  friend constexpr Vec operator*(double s, Vec a) { return a *= s; }
  friend constexpr Vec operator/(Vec a, double s) { return a /= s; }
  friend constexpr Vec operator-(Vec a) { return a *= -1.0; }
  friend constexpr bool operator==(const Vec& a, const Vec& b) { return a.c == b.c; }
};

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

template <int D>
constexpr double dot(const Vec<D>& a, const Vec<D>& b) {
  double s = 0.0;
  for (int i = 0; i < D; ++i) s += a[i] * b[i];
  return s;
}

constexpr double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Counterclockwise quarter turn.
constexpr Vec2 perp(const Vec2& a) { return {-a[1], a[0]}; }

inline Vec2 rotate(const Vec2& a, double angle) {
  const double s = std::sin(angle), co = std::cos(angle);
  return {a[0] * co - a[1] * s, a[0] * s + a[1] * co};
}

template <int D>
constexpr double squared_norm(const Vec<D>& a) {
  return dot(a, a);
}

template <int D>
inline double norm(const Vec<D>& a) {
  return std::sqrt(squared_norm(a));
}

template <int D>
inline double distance(const Vec<D>& a, const Vec<D>& b) {
  return norm(a - b);
}

template <int D>
inline Vec<D> normalized(const Vec<D>& a) {
  return a / norm(a);
}

template <int D>
inline bool all_finite(const Vec<D>& a) {
  for (int i = 0; i < D; ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

// Signed parallelogram area of triangle (a,b,c); positive when counterclockwise.
constexpr double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return cross(b - a, c - a);
}

// Six times the signed volume of tetrahedron (a,b,c,d); positive when (b-a,c-a,d-a)
// form a right-handed frame.
constexpr double orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return dot(cross(b - a, c - a), d - a);
}

template <int D>
inline std::ostream& operator<<(std::ostream& os, const Vec<D>& v) {
  os << '(';
  for (int i = 0; i < D; ++i) os << (i ? "," : "") << v[i];
  return os << ')';
}

}  // namespace qsmooth
