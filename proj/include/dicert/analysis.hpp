#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dicert/entropy.hpp"

namespace dicert {

struct SweepOptions {
  CertifyOptions certify;
  sdp::KernelMode mode = sdp::KernelMode::openmp;
};

struct SweepPoint {
  double noise = 0.0;
  std::optional<EntropyCertificate> cert;
  std::string error;  // non-empty if this point failed
};

struct SweepResult {
  CatalogEntry entry;
  std::pair<int, int> spot{0, 0};  // internal
  std::vector<double> grid;
  std::vector<SweepPoint> points;
  SweepOptions options;
};

/// One certificate per grid point; per-point failures are recorded and the
/// sweep continues. Points are evaluated in parallel under OpenMP mode with
/// per-point seeding, so results do not depend on the thread count.
SweepResult sweep(const CatalogEntry& entry, std::pair<int, int> spot,
                  const std::vector<double>& grid, const SweepOptions& options);

/// Central differences on a uniform grid; order 1 or 2; interior points only.
std::vector<double> central_difference(const std::vector<double>& values,
                                       const std::vector<double>& grid,
                                       int order);

/// Composite second derivative of the conjecture entropy along a sweep.
/// Bound-trajectory derivatives come from central differences; the entropy
/// partials are evaluated three ways: the component-wise chain-rule
/// assembly, the direct analytic Hessian, and the assembly using the
/// beta coefficients exactly as printed (kept as a diagnostic column).
struct DerivativeReport {
  std::vector<double> grid_interior;
  std::vector<double> dh_dp;
  std::vector<double> d2h_dp2;           // chain-rule assembly (primary)
  std::vector<double> d2h_dp2_analytic;  // direct Hessian route
  std::vector<double> d2h_dp2_printed;   // printed beta variant
  std::vector<double> d2h_dp2_reference; // plain 2nd central difference of H
  std::vector<double> dl1, dl2, du3, d2l1, d2l2, d2u3;
  std::vector<double> alpha, beta1, beta2, beta3;
  std::vector<double> beta1_printed, beta2_printed, beta3_printed;
  std::vector<int> region;  // -1 concave, +1 convex, 0 flat
  std::string printed_beta_verdict;
};

DerivativeReport entropy_second_derivative(const std::vector<double>& lower1,
                                           const std::vector<double>& lower2,
                                           const std::vector<double>& upper3,
                                           const std::vector<double>& grid);

/// Conjecture-role trajectories extracted from a sweep, split into segments
/// with consistent role assignments.
struct RoleTrajectories {
  std::vector<double> grid;
  std::vector<double> lower1, lower2, upper3, entropy;
  std::vector<std::pair<std::size_t, std::size_t>> segments;  // [first, last]
  std::vector<double> boundaries;  // noise values where roles flip
};

RoleTrajectories extract_conjecture_trajectories(const SweepResult& sweep);

/// Derivative report over a sweep: one report per consistent role segment,
/// concatenated in grid order.
DerivativeReport convexity_report(const SweepResult& sweep);

/// First noise level where the two entropy curves cross, refined by
/// bisection with fresh certifications; nullopt when no sign change exists.
std::optional<double> find_crossover(const SweepResult& a,
                                     const SweepResult& b,
                                     double refine_tol = 1e-4);

}  // namespace dicert
