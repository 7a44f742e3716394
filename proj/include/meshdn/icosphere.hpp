#ifndef MESHDN_ICOSPHERE_HPP
#define MESHDN_ICOSPHERE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "meshdn/mesh.hpp"

namespace meshdn {

// Unit-radius geodesic sphere: every icosahedron face is split into
// frequency² triangles on a barycentric grid, then all points are projected
// onto the sphere. Vertex count is 10·frequency² + 2; faces are oriented
// outward.
inline Mesh icosphere_with_frequency(std::size_t frequency) {
  if (frequency < 1) throw std::invalid_argument("icosphere: frequency must be >= 1");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  const std::array<Vec3, 12> corners = {{{-1, t, 0},
                                         {1, t, 0},
                                         {-1, -t, 0},
                                         {1, -t, 0},
                                         {0, -1, t},
                                         {0, 1, t},
                                         {0, -1, -t},
                                         {0, 1, -t},
                                         {t, 0, -1},
                                         {t, 0, 1},
                                         {-t, 0, -1},
                                         {-t, 0, 1}}};
  const std::array<std::array<int, 3>, 20> base = {{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                                    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                                    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                                    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}}};

  // A grid point is identified by its barycentric weights over the corner
  // vertices; this makes points on shared edges and corners coincide.
  using Key = std::array<std::pair<int, std::size_t>, 3>;
  std::map<Key, VertexIndex> index;
  SignalMatrix vertices;
  const auto n = frequency;

  auto vertex_at = [&](const std::array<int, 3>& tri, std::size_t i, std::size_t j) -> VertexIndex {
    // weights (n - i - j, i, j) over (tri[0], tri[1], tri[2])
    std::array<std::pair<int, std::size_t>, 3> w = {{{tri[0], n - i - j}, {tri[1], i}, {tri[2], j}}};
    Key key{};
    std::size_t k = 0;
    std::sort(w.begin(), w.end());
    for (const auto& e : w) {
      if (e.second != 0) key[k++] = e;
    }
    for (; k < 3; ++k) key[k] = {-1, 0};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    Vec3 p{0.0, 0.0, 0.0};
    for (const auto& e : w) p = p + (static_cast<double>(e.second) / static_cast<double>(n)) * corners[e.first];
    p = (1.0 / norm(p)) * p;
    const auto id = static_cast<VertexIndex>(vertices.size());
    vertices.push_back(p);
    index.emplace(key, id);
    return id;
  };

  std::vector<Face> faces;
  faces.reserve(20 * n * n);
  for (const auto& tri : base) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; i + j < n; ++j) {
        const auto a = vertex_at(tri, i, j);
        const auto b = vertex_at(tri, i + 1, j);
        const auto c = vertex_at(tri, i, j + 1);
        faces.push_back({a, b, c});
        if (i + j + 1 < n) {
          const auto d = vertex_at(tri, i + 1, j + 1);
          faces.push_back({b, d, c});
        }
      }
    }
  }
  return Mesh(std::move(vertices), std::move(faces));
}

// Subdivision level L corresponds to frequency 2^L (level 0 is the
// icosahedron, level 3 has 642 vertices, level 5 has 10242).
inline Mesh icosphere(unsigned level) {
  if (level > 12) throw std::invalid_argument("icosphere: level too large");
  return icosphere_with_frequency(std::size_t{1} << level);
}

}  // namespace meshdn

#endif  // MESHDN_ICOSPHERE_HPP
