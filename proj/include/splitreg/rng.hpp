#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include "splitreg/errors.hpp"

namespace splitreg {

/// splitmix64 finalizer; used to turn structured seed material into well-mixed state.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a hash of a tag string.
inline std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// A self-contained random stream. Normal variates use Box-Muller on top of
/// mt19937_64 so that sequences are identical across standard libraries
/// (std::normal_distribution is not pinned by the standard).
class RngStream {
 public:
  explicit RngStream(std::uint64_t state) : engine_(state) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1]; never returns 0 so log() is always safe.
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; second variate of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  Eigen::VectorXd normals(int n) {
    if (n < 0) throw ParameterError("normals: n must be nonnegative");
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  /// Column-major fill order (all of column 0, then column 1, ...).
  Eigen::MatrixXd normal_matrix(int rows, int cols) {
    if (rows < 0 || cols < 0) throw ParameterError("normal_matrix: negative shape");
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives an independent stream from (master seed, replicate index, purpose tag).
/// The derivation is pure arithmetic on the three inputs, so streams never depend
/// on scheduling order and any replicate can be regenerated in isolation.
inline RngStream derive_stream(std::uint64_t master, std::uint64_t replicate,
                               std::string_view purpose) {
  std::uint64_t state = mix64(mix64(mix64(master) ^ replicate) ^ hash_tag(purpose));
  return RngStream(state);
}

}  // namespace splitreg
