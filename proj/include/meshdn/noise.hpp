#ifndef MESHDN_NOISE_HPP
#define MESHDN_NOISE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

#include "meshdn/mesh.hpp"
#include "meshdn/signal.hpp"

namespace meshdn {

struct NoiseParams {
  double rho = 0.0;
  std::uint64_t seed = 0;
};

// Standard normal variates from std::mt19937_64 (bit-exact across
// conforming standard libraries) by inversion: u = (k + ½)·2⁻⁵³ from the
// top 53 bits of one draw, z = −√2·erfc⁻¹(2u). One engine draw per variate.
class NormalVariates {
 public:
  explicit NormalVariates(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double operator()() { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * uniform()); }

 private:
  std::mt19937_64 engine_;
};

// x_i + ρ·ε_i·N_i with one variate per vertex drawn in index order. Vertices
// with a degenerate normal still consume their variate but do not move.
inline Mesh add_normal_noise(const Mesh& mesh, const NormalField& normals, const NoiseParams& params) {
  if (!(params.rho >= 0.0) || !std::isfinite(params.rho)) throw std::invalid_argument("noise: rho must be >= 0");
  if (normals.normals.size() != mesh.vertex_count())
    throw std::invalid_argument("noise: normal field does not match the mesh");
  NormalVariates eps(params.seed);
  SignalMatrix x = mesh.vertices();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = eps();
    if (normals.degenerate[i]) continue;
    x[i] = x[i] + (params.rho * e) * normals.normals[i];
  }
  return mesh.with_vertices(std::move(x));
}

inline Mesh add_normal_noise(const Mesh& mesh, const NoiseParams& params) {
  return add_normal_noise(mesh, vertex_normals(mesh), params);
}

// −20·log10(‖X − Y‖_F / ‖Y‖_F); X is the estimate, Y the reference.
// Returns +inf when X == Y.
inline double snr(const SignalMatrix& estimate, const SignalMatrix& reference) {
  if (estimate.size() != reference.size()) throw std::invalid_argument("snr: shape mismatch");
  const double ref = frobenius_norm(reference);
  if (!(ref > 0.0)) throw std::domain_error("snr: reference signal has zero norm");
  const double err = frobenius_distance(estimate, reference);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return -20.0 * std::log10(err / ref);
}

}  // namespace meshdn

#endif  // MESHDN_NOISE_HPP
