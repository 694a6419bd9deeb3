#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "dicert/npa.hpp"
#include "dicert/sdp_kernels.hpp"

namespace dicert::sdp {

enum class Status {
  optimal,
  near_optimal,
  infeasible,
  unbounded,
  numerical_failure,
};

const char* to_string(Status s);

enum class Direction { maximize, minimize };

struct Tolerances {
  double feasibility = 1e-9;  // residual norms, relative
  double gap = 1e-8;          // duality gap, relative to the objective scale
  int max_iterations = 500;
};

struct Solution {
  Status status = Status::numerical_failure;
  double objective_value = 0.0;   // primal-side estimate
  double certified_value = 0.0;   // dual-side bound, safe for certification
  double duality_gap = 0.0;       // |primal - dual|
  int iterations = 0;
  std::vector<double> moment_vector;  // primal witness, one entry per variable
  std::string diagnostics;
};

/// Raised when a solve cannot produce a usable bound. Carries the
/// termination status and the pipeline stage that requested the solve.
class SolverError : public std::runtime_error {
 public:
  SolverError(Status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

/// Extremizes a linear functional of the moment variables over the
/// relaxation's feasible set (one PSD block, linear equalities).
/// Primal-dual interior-point method with Mehrotra predictor-corrector.
Solution solve(const npa::MomentProblem& problem,
               const npa::LinearFunctional& objective, Direction direction,
               const std::vector<npa::LinearEquality>& extra_equalities = {},
               const Tolerances& tolerances = {},
               KernelMode mode = KernelMode::openmp);

}  // namespace dicert::sdp
