#pragma once

#include <Eigen/Dense>

#include <vector>

namespace dicert::sdp {

enum class KernelMode { serial, openmp };

/// Sparse symmetric constraint matrix, stored as the full nonzero list
/// (off-diagonal entries appear in both orientations with half weight).
struct ConstraintMatrix {
  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<double> weights;
  double rhs = 0.0;

  void add_sym(int i, int j, double logical_weight);
  double inner(const Eigen::MatrixXd& x) const;
  void add_scaled_to(Eigen::MatrixXd& out, double scale) const;
  double frobenius_norm() const;
};

/// Schur complement of the interior-point normal equations:
/// out(k,l) = tr(A_k * sinv * A_l * x). Symmetric; only depends on entries
/// of sinv and x at the constraints' nonzero positions. The serial and
/// OpenMP variants produce bit-identical results.
void assemble_schur(const std::vector<ConstraintMatrix>& constraints,
                    const Eigen::MatrixXd& sinv, const Eigen::MatrixXd& x,
                    Eigen::MatrixXd& out, KernelMode mode);

/// In-place blocked Cholesky (lower factor in the lower triangle; the strict
/// upper triangle is left untouched). Returns false if the matrix is not
/// numerically positive definite. Tile updates are independent, so the
/// OpenMP variant matches the serial one bit for bit.
bool cholesky_factor(Eigen::MatrixXd& a, KernelMode mode, int block = 128);

/// Solves L L^T z = rhs in place using a factor from cholesky_factor.
void cholesky_solve(const Eigen::MatrixXd& factor, Eigen::VectorXd& rhs);

}  // namespace dicert::sdp
