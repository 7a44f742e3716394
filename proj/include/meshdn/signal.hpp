#ifndef MESHDN_SIGNAL_HPP
#define MESHDN_SIGNAL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace meshdn {

using Vec3 = std::array<double, 3>;

// One row per vertex: coordinates, normals, or any 3-channel vertex signal.
using SignalMatrix = std::vector<Vec3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline double frobenius_norm(const SignalMatrix& x) {
  double sum = 0.0;
  for (const auto& row : x) sum += dot(row, row);
  return std::sqrt(sum);
}

inline double frobenius_distance(const SignalMatrix& x, const SignalMatrix& y) {
  if (x.size() != y.size()) throw std::invalid_argument("frobenius_distance: row count mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Vec3 d = x[i] - y[i];
    sum += dot(d, d);
  }
  return std::sqrt(sum);
}

// Axis-aligned bounding-box diagonal length of a point set.
inline double bounding_box_diagonal(const SignalMatrix& x) {
  if (x.empty()) return 0.0;
  Vec3 lo = x.front(), hi = x.front();
  for (const auto& p : x) {
    for (int c = 0; c < 3; ++c) {
      lo[c] = std::min(lo[c], p[c]);
      hi[c] = std::max(hi[c], p[c]);
    }
  }
  return norm(hi - lo);
}

}  // namespace meshdn

#endif  // MESHDN_SIGNAL_HPP
