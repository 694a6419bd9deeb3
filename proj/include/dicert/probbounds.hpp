#pragma once

#include <array>
#include <string>
#include <vector>

#include "dicert/bell_catalog.hpp"
#include "dicert/npa.hpp"
#include "dicert/sdp.hpp"

namespace dicert {

/// Linear expression over the four joint outcomes at the spot setting,
/// coefficients in the fixed order (-1,-1), (-1,+1), (+1,-1), (+1,+1).
struct LinearExpr {
  std::array<double, 4> coeffs{};
  std::string label;
};

/// The 4 single-outcome expressions, optionally followed by the 6 pairwise
/// and 4 triple sums. Order is fixed: singles, pairs, triples.
std::vector<LinearExpr> standard_expressions(std::pair<int, int> spot,
                                             bool include_extras);

struct BoundEntry {
  LinearExpr expr;
  double lo = 0.0;
  double hi = 1.0;
  sdp::Status status_lo = sdp::Status::numerical_failure;
  sdp::Status status_hi = sdp::Status::numerical_failure;
  double gap_lo = 0.0;
  double gap_hi = 0.0;
};

/// Certified bounds on each expression at one noise level, under the
/// Bell-value constraint G = (1-p) * B with B the verified Tsirelson bound.
struct BoundBox {
  CatalogEntry inequality;
  double noise = 0.0;
  std::pair<int, int> spot{0, 0};  // internal 0-based
  int level = 2;
  std::vector<BoundEntry> entries;  // singles first, fixed order
  double max_pad = 0.0;             // largest gap padding applied

  const BoundEntry& single(int joint_outcome) const {
    return entries.at(joint_outcome);
  }
  sdp::Status worst_status() const;
};

struct BoundBoxOptions {
  sdp::Tolerances tolerances;
  sdp::KernelMode mode = sdp::KernelMode::openmp;
  /// When set, the Bell constraint becomes G >= (1-p)*B instead of equality.
  bool bell_inequality = false;
};

/// Runs 2*|exprs| solves (lo and hi per expression), in parallel under the
/// OpenMP mode. Bounds are dual-side values padded by the duality gap;
/// single-outcome bounds are clamped to [0,1].
BoundBox bound_box(const CatalogEntry& entry, double noise,
                   std::pair<int, int> spot, int level,
                   const std::vector<LinearExpr>& exprs,
                   const BoundBoxOptions& options = {});

}  // namespace dicert
