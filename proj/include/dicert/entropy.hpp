#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>

#include "dicert/probbounds.hpp"

namespace dicert {

/// Shannon entropy in bits; 0*log2(0) is 0. Entries must be nonnegative and
/// sum to 1 within 1e-10.
double shannon_entropy(std::span<const double> dist);

/// -log2 of the largest certified single-outcome upper bound.
double min_entropy(const BoundBox& box);

/// Feasible region of the three free outcome probabilities
/// (P(-1,-1), P(-1,+1), P(+1,-1)); the fourth is the simplex residual.
/// Rows are halfspaces a.x <= b derived from the box plus simplex guards.
struct Polytope {
  Eigen::Matrix<double, Eigen::Dynamic, 3> a;
  Eigen::VectorXd b;

  static Polytope from_box(const BoundBox& box);
  double max_violation(const Eigen::Vector3d& x) const;
  /// Euclidean projection onto the polytope (projected Gauss-Seidel on the
  /// dual); accurate to ~1e-12 for these small systems.
  Eigen::Vector3d project(const Eigen::Vector3d& z) const;
};

std::array<double, 4> to_distribution(const Eigen::Vector3d& free_vars);
double entropy_of_free(const Eigen::Vector3d& free_vars);
Eigen::Vector3d entropy_gradient(const Eigen::Vector3d& free_vars);

struct MinimizeOptions {
  int restarts = 1500;
  std::uint64_t seed = 42;
  double objective_tol = 1e-9;
  sdp::KernelMode mode = sdp::KernelMode::openmp;
};

struct MinimizeResult {
  std::array<double, 4> dist{};
  double entropy = 0.0;
  int restarts_used = 0;
};

class InfeasibleBoxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Global minimization of the Shannon entropy over the box polytope:
/// basin hopping (uniform perturbations of step 0.1, greedy acceptance)
/// around a projected-gradient local descent. Restart batches run in
/// parallel with per-restart seeding, so results do not depend on the
/// thread count.
MinimizeResult minimize_entropy(const BoundBox& box,
                                const MinimizeOptions& options = {});

struct ConjectureResult {
  bool applicable = false;
  std::array<double, 4> dist{};
  double entropy = 0.0;
  int upper_index = -1;     // outcome taking its upper bound
  int residual_index = -1;  // outcome taking the simplex residual
};

/// Closed-form candidate family [l, l, u, 1-l-l-u] over all 12 role
/// assignments; returns the feasible candidate of least entropy
/// (lexicographically smallest distribution on ties).
ConjectureResult conjecture_distribution(const BoundBox& box);

struct CertifyOptions {
  int level = 2;
  bool extras = false;
  int restarts = -1;  // -1: 1500 without extras, 100 with
  std::uint64_t seed = 42;
  sdp::Tolerances tolerances;
  sdp::KernelMode mode = sdp::KernelMode::openmp;
  bool bell_inequality = false;
};

struct EntropyCertificate {
  double noise = 0.0;
  double shannon_lower = 0.0;
  double min_entropy_bits = 0.0;
  std::array<double, 4> optimizer_dist{};
  std::array<double, 4> conjecture_dist{};
  double conjecture_entropy = 0.0;
  bool conjecture_applicable = false;
  double agreement = 0.0;  // |shannon_lower - conjecture_entropy|
  int restarts_used = 0;
  int level = 2;
  sdp::Status status = sdp::Status::numerical_failure;
  BoundBox box;
};

/// Full pipeline for one noise point: bound box, entropy minimization,
/// min-entropy, conjecture comparison.
EntropyCertificate certify(const CatalogEntry& entry, double noise,
                           std::pair<int, int> spot,
                           const CertifyOptions& options = {});

}  // namespace dicert
