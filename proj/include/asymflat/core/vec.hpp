#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace asymflat {

/// Cartesian 3-vector in the asymptotic chart.
struct Vec3 {
  std::array<double, 3> v{0.0, 0.0, 0.0};

  constexpr Vec3() = default;
  constexpr Vec3(double x, double y, double z) : v{x, y, z} {}

  constexpr double& operator[](std::size_t i) { return v[i]; }
  constexpr double operator[](std::size_t i) const { return v[i]; }
  constexpr auto begin() { return v.begin(); }
  constexpr auto end() { return v.end(); }
  constexpr auto begin() const { return v.begin(); }
  constexpr auto end() const { return v.end(); }

  constexpr Vec3& operator+=(const Vec3& o) {
    for (std::size_t i = 0; i < 3; ++i) v[i] += o.v[i];
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    for (std::size_t i = 0; i < 3; ++i) v[i] -= o.v[i];
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    for (auto& c : v) c *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Dense 3x3 matrix, row-major.
struct Mat3 {
  std::array<std::array<double, 3>, 3> m{};

  constexpr std::array<double, 3>& operator[](std::size_t i) { return m[i]; }
  constexpr const std::array<double, 3>& operator[](std::size_t i) const {
    return m[i];
  }
  constexpr auto begin() { return m.begin(); }
  constexpr auto end() { return m.end(); }
  constexpr auto begin() const { return m.begin(); }
  constexpr auto end() const { return m.end(); }

  static constexpr Mat3 identity() {
    Mat3 r;
    r[0][0] = r[1][1] = r[2][2] = 1.0;
    return r;
  }
  static constexpr Mat3 zero() { return Mat3{}; }
  friend constexpr bool operator==(const Mat3&, const Mat3&) = default;
};

constexpr Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}
constexpr Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}
constexpr Mat3 operator*(double s, const Mat3& a) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = s * a[i][j];
  return r;
}
constexpr Vec3 operator*(const Mat3& a, const Vec3& x) {
  Vec3 r;
  for (std::size_t i = 0; i < 3; ++i)
    r[i] = a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2];
  return r;
}
constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}
constexpr Mat3 transpose(const Mat3& a) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = a[j][i];
  return r;
}
constexpr double trace(const Mat3& a) { return a[0][0] + a[1][1] + a[2][2]; }

constexpr double determinant(const Mat3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

/// Inverse by cofactors; caller checks the determinant.
constexpr Mat3 inverse(const Mat3& a, double det) {
  Mat3 r;
  const double s = 1.0 / det;
  r[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) * s;
  r[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * s;
  r[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * s;
  r[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) * s;
  r[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * s;
  r[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * s;
  r[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) * s;
  r[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * s;
  r[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * s;
  return r;
}

/// Rotation by `angle` about the (normalized) `axis`, Rodrigues form.
inline Mat3 rotation_about(Vec3 axis, double angle) {
  axis = axis / norm(axis);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double t = 1.0 - c;
  const double x = axis[0], y = axis[1], z = axis[2];
  Mat3 r;
  r[0] = {t * x * x + c, t * x * y - s * z, t * x * z + s * y};
  r[1] = {t * x * y + s * z, t * y * y + c, t * y * z - s * x};
  r[2] = {t * x * z - s * y, t * y * z + s * x, t * z * z + c};
  return r;
}

/// Pairwise (cascade) summation with a fixed split order.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace asymflat
