#include "dicert/probbounds.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dicert {

namespace {

const char* kOutcomeNames[4] = {"P(-1,-1)", "P(-1,+1)", "P(+1,-1)", "P(+1,+1)"};

LinearExpr make_expr(std::initializer_list<int> indices) {
  LinearExpr e;
  std::string label;
  for (int i : indices) {
    e.coeffs[i] = 1.0;
    if (!label.empty()) label += "+";
    label += kOutcomeNames[i];
  }
  e.label = label;
  return e;
}

}  // namespace

std::vector<LinearExpr> standard_expressions(std::pair<int, int> spot,
                                             bool include_extras) {
  (void)spot;  // expressions are relative to whichever spot the box uses
  std::vector<LinearExpr> out;
  for (int i = 0; i < 4; ++i) out.push_back(make_expr({i}));
  if (!include_extras) return out;
  // pairwise sums
  out.push_back(make_expr({0, 2}));
  out.push_back(make_expr({0, 1}));
  out.push_back(make_expr({0, 3}));
  out.push_back(make_expr({1, 2}));
  out.push_back(make_expr({1, 3}));
  out.push_back(make_expr({2, 3}));
  // triple sums
  out.push_back(make_expr({0, 1, 2}));
  out.push_back(make_expr({0, 1, 3}));
  out.push_back(make_expr({0, 2, 3}));
  out.push_back(make_expr({1, 2, 3}));
  return out;
}

sdp::Status BoundBox::worst_status() const {
  sdp::Status worst = sdp::Status::optimal;
  auto rank = [](sdp::Status s) {
    switch (s) {
      case sdp::Status::optimal: return 0;
      case sdp::Status::near_optimal: return 1;
      default: return 2;
    }
  };
  for (const auto& e : entries) {
    if (rank(e.status_lo) > rank(worst)) worst = e.status_lo;
    if (rank(e.status_hi) > rank(worst)) worst = e.status_hi;
  }
  return worst;
}

BoundBox bound_box(const CatalogEntry& entry, double noise,
                   std::pair<int, int> spot, int level,
                   const std::vector<LinearExpr>& exprs,
                   const BoundBoxOptions& options) {
  if (!(noise >= 0.0 && noise <= 1.0))
    throw std::invalid_argument("bound_box: noise must lie in [0,1]");
  const Scenario& sc = entry.expression.scenario;
  if (spot.first < 0 || spot.first >= sc.a_inputs || spot.second < 0 ||
      spot.second >= sc.b_inputs)
    throw std::invalid_argument("bound_box: spot setting out of range");
  if (exprs.empty())
    throw std::invalid_argument("bound_box: no expressions given");

  npa::MomentProblem problem = npa::build(sc, level);

  npa::LinearEquality bell;
  bell.functional = npa::bell_functional(problem, entry.expression);
  bell.rhs = (1.0 - noise) * entry.tsirelson_verified;
  bell.relation = options.bell_inequality ? npa::Relation::greater_equal
                                          : npa::Relation::equal;
  std::vector<npa::LinearEquality> extra{bell};

  // Objective of each expression at the spot setting.
  std::array<npa::LinearFunctional, 4> singles;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      singles[a * 2 + b] = npa::probability_functional(
          problem, kOutcomeValues[a], kOutcomeValues[b], spot.first,
          spot.second);
  std::vector<npa::LinearFunctional> objectives;
  for (const LinearExpr& e : exprs) {
    npa::LinearFunctional f;
    for (int i = 0; i < 4; ++i) {
      if (e.coeffs[i] == 0.0) continue;
      f.constant += e.coeffs[i] * singles[i].constant;
      for (const auto& [v, c] : singles[i].terms) f.add(v, e.coeffs[i] * c);
    }
    f.normalize();
    objectives.push_back(std::move(f));
  }

  const int n_tasks = static_cast<int>(exprs.size()) * 2;
  std::vector<sdp::Solution> results(n_tasks);
  std::vector<std::string> errors(n_tasks);

  auto run_task = [&](int t) {
    const int ei = t / 2;
    const bool upper = (t % 2) != 0;
    try {
      results[t] = sdp::solve(
          problem, objectives[ei],
          upper ? sdp::Direction::maximize : sdp::Direction::minimize, extra,
          options.tolerances, sdp::KernelMode::serial);
    } catch (const std::exception& ex) {
      errors[t] = ex.what();
    }
  };

  if (options.mode == sdp::KernelMode::openmp) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < n_tasks; ++t) run_task(t);
  } else {
    for (int t = 0; t < n_tasks; ++t) run_task(t);
  }

  BoundBox box;
  box.inequality = entry;
  box.noise = noise;
  box.spot = spot;
  box.level = level;

  for (int ei = 0; ei < static_cast<int>(exprs.size()); ++ei) {
    const sdp::Solution& lo = results[2 * ei];
    const sdp::Solution& hi = results[2 * ei + 1];
    for (int t : {2 * ei, 2 * ei + 1}) {
      if (!errors[t].empty())
        throw sdp::SolverError(sdp::Status::numerical_failure,
                               "bound_box[" + exprs[ei].label + "]: " + errors[t]);
      const sdp::Solution& r = results[t];
      if (r.status != sdp::Status::optimal &&
          r.status != sdp::Status::near_optimal)
        throw sdp::SolverError(r.status, "bound_box[" + exprs[ei].label +
                                             "]: " + sdp::to_string(r.status) +
                                             "; " + r.diagnostics);
    }

    BoundEntry be;
    be.expr = exprs[ei];
    be.status_lo = lo.status;
    be.status_hi = hi.status;
    be.gap_lo = lo.duality_gap;
    be.gap_hi = hi.duality_gap;
    // Dual-side values padded by the duality gap; degenerate near-zero-width
    // boxes keep a nonempty interior this way.
    be.lo = lo.certified_value - lo.duality_gap;
    be.hi = hi.certified_value + hi.duality_gap;
    box.max_pad = std::max({box.max_pad, lo.duality_gap, hi.duality_gap});

    double csum = 0.0;
    for (double c : be.expr.coeffs) csum += std::abs(c);
    be.lo = std::clamp(be.lo, 0.0, csum);
    be.hi = std::clamp(be.hi, 0.0, csum);
    if (be.lo > be.hi) std::swap(be.lo, be.hi);
    box.entries.push_back(std::move(be));
  }
  return box;
}

}  // namespace dicert
