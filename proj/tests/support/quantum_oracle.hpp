// Test-only oracle: explicit qubit realizations of X-Z-plane measurements on
// Werner states. Produces behaviors and full moment vectors directly from
// 4x4 density-matrix algebra, independent of the relaxation pipeline.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "dicert/npa.hpp"
#include "dicert/scenario.hpp"

namespace dicert::testing {

inline Eigen::Matrix2d oracle_projector(double theta, int outcome) {
  Eigen::Matrix2d sz, sx;
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;
  double s = outcome < 0 ? -1.0 : 1.0;
  return 0.5 * (Eigen::Matrix2d::Identity() +
                s * (std::cos(theta) * sz + std::sin(theta) * sx));
}

inline Eigen::Matrix4d oracle_kron(const Eigen::Matrix2d& a,
                                   const Eigen::Matrix2d& b) {
  Eigen::Matrix4d k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

inline Eigen::Matrix4d werner_state(double noise) {
  Eigen::Vector4d phi;
  phi << 1, 0, 0, 1;
  phi /= std::sqrt(2.0);
  return noise * 0.25 * Eigen::Matrix4d::Identity() +
         (1.0 - noise) * (phi * phi.transpose());
}

/// Moment of one word under the explicit realization: Tr(rho * prod letters).
inline double word_moment(const npa::Word& word,
                          const std::vector<double>& alice_angles,
                          const std::vector<double>& bob_angles, double noise) {
  Eigen::Matrix4d op = Eigen::Matrix4d::Identity();
  for (const npa::Letter& l : word) {
    Eigen::Matrix2d p =
        oracle_projector(l.party == 0 ? alice_angles[l.input] : bob_angles[l.input], +1);
    op *= l.party == 0 ? oracle_kron(p, Eigen::Matrix2d::Identity())
                       : oracle_kron(Eigen::Matrix2d::Identity(), p);
  }
  return (werner_state(noise) * op).trace();
}

/// Full moment vector of a relaxation under the explicit realization.
inline std::vector<double> oracle_moment_vector(
    const npa::MomentProblem& problem, const std::vector<double>& alice_angles,
    const std::vector<double>& bob_angles, double noise) {
  std::vector<double> m(problem.n_vars);
  for (int v = 0; v < problem.n_vars; ++v)
    m[v] = word_moment(problem.var_word[v], alice_angles, bob_angles, noise);
  return m;
}

/// Moment matrix reconstructed from a moment vector.
inline Eigen::MatrixXd moment_matrix(const npa::MomentProblem& problem,
                                     const std::vector<double>& moments) {
  Eigen::MatrixXd m(problem.psd_dim, problem.psd_dim);
  for (int i = 0; i < problem.psd_dim; ++i)
    for (int j = 0; j < problem.psd_dim; ++j)
      m(i, j) = moments[problem.entry(i, j)];
  return m;
}

}  // namespace dicert::testing
