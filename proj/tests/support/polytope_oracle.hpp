// Test-only oracle: exact global entropy minimum over a bound-box polytope.
// The objective is concave, so the minimum sits at a vertex; vertices of the
// 3-dimensional polytope are enumerated from all facet triples.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "dicert/entropy.hpp"

namespace dicert::testing {

inline std::vector<Eigen::Vector3d> polytope_vertices(const Polytope& poly) {
  const int m = static_cast<int>(poly.a.rows());
  std::vector<Eigen::Vector3d> verts;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = j + 1; k < m; ++k) {
        Eigen::Matrix3d a;
        a.row(0) = poly.a.row(i);
        a.row(1) = poly.a.row(j);
        a.row(2) = poly.a.row(k);
        if (std::abs(a.determinant()) < 1e-12) continue;
        Eigen::Vector3d b(poly.b(i), poly.b(j), poly.b(k));
        Eigen::Vector3d x = a.fullPivLu().solve(b);
        if (poly.max_violation(x) < 1e-9) verts.push_back(x);
      }
  return verts;
}

/// Exact minimum entropy over the polytope (vertex scan).
inline double entropy_minimum_oracle(const BoundBox& box) {
  Polytope poly = Polytope::from_box(box);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : polytope_vertices(poly))
    best = std::min(best, entropy_of_free(v));
  return best;
}

/// Random feasible points as convex combinations of vertices.
inline std::vector<std::array<double, 4>> random_feasible_points(
    const BoundBox& box, int count, std::uint64_t seed) {
  Polytope poly = Polytope::from_box(box);
  auto verts = polytope_vertices(poly);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::array<double, 4>> out;
  if (verts.empty()) return out;
  for (int i = 0; i < count; ++i) {
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    double total = 0.0;
    for (const auto& v : verts) {
      double w = u(rng);
      x += w * v;
      total += w;
    }
    x /= total;
    out.push_back(to_distribution(x));
  }
  return out;
}

}  // namespace dicert::testing
