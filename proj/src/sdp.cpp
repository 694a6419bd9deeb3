#include "dicert/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace dicert::sdp {

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::near_optimal: return "near_optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Standard-form problem: min <C,X> s.t. <A_k,X> = b_k, X >= 0 (PSD).
// Moment-variable structure is compiled into entry-tie constraints; each
// ">=" equality gets one auxiliary diagonal slack dimension.
struct Compiled {
  int dim = 0;
  std::vector<ConstraintMatrix> constraints;
  ConstraintMatrix objective;  // rhs unused
  double objective_offset = 0.0;
  std::vector<std::pair<int, int>> var_rep;  // representative entry per var
};

Compiled compile(const npa::MomentProblem& p,
                 const npa::LinearFunctional& objective, Direction direction,
                 const std::vector<npa::LinearEquality>& extra) {
  const int d = p.psd_dim;

  // Representative entry of each moment variable: first upper-triangle
  // appearance in row-major order (matches the id assignment in build()).
  std::vector<std::pair<int, int>> rep(p.n_vars, {-1, -1});
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      int v = p.entry(i, j);
      if (rep[v].first < 0) rep[v] = {i, j};
    }

  int n_slack = 0;
  for (const auto& eq : extra)
    if (eq.relation == npa::Relation::greater_equal) ++n_slack;

  Compiled c;
  c.dim = d + n_slack;
  c.var_rep = rep;

  // Entry ties: every non-representative position equals its representative.
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      int v = p.entry(i, j);
      if (rep[v] == std::make_pair(i, j)) continue;
      ConstraintMatrix t;
      t.add_sym(i, j, 1.0);
      t.add_sym(rep[v].first, rep[v].second, -1.0);
      t.rhs = 0.0;
      c.constraints.push_back(std::move(t));
    }

  auto add_functional_constraint = [&](const npa::LinearEquality& eq,
                                       int slack_dim) {
    ConstraintMatrix t;
    for (const auto& [var, coeff] : eq.functional.terms)
      t.add_sym(rep[var].first, rep[var].second, coeff);
    if (slack_dim >= 0) t.add_sym(slack_dim, slack_dim, -1.0);
    t.rhs = eq.rhs - eq.functional.constant;
    c.constraints.push_back(std::move(t));
  };

  for (const auto& eq : p.equalities) add_functional_constraint(eq, -1);
  int slack = d;
  for (const auto& eq : extra) {
    if (eq.relation == npa::Relation::greater_equal)
      add_functional_constraint(eq, slack++);
    else
      add_functional_constraint(eq, -1);
  }

  const double sign = direction == Direction::minimize ? 1.0 : -1.0;
  for (const auto& [var, coeff] : objective.terms)
    c.objective.add_sym(rep[var].first, rep[var].second, sign * coeff);
  c.objective_offset = sign * objective.constant;
  return c;
}

double inner_full(const MatrixXd& a, const MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

// Largest step length t with p + t*d staying PSD (via the Cholesky factor
// of p). Returns a large value when d pushes inward everywhere.
double max_step(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& d) {
  MatrixXd w = llt.matrixL().solve(d);
  w = llt.matrixL().solve(w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (w + w.transpose()),
                                             Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-13) return 1e30;
  return -1.0 / lmin;
}

struct IterationState {
  MatrixXd x, s;
  VectorXd y;
};

struct Metrics {
  double pinf = 0.0, dinf = 0.0, gap = 0.0, mu = 0.0;
  double pobj = 0.0, dobj = 0.0;
  double score() const { return std::max({pinf, dinf, gap}); }
};

}  // namespace

Solution solve(const npa::MomentProblem& problem,
               const npa::LinearFunctional& objective, Direction direction,
               const std::vector<npa::LinearEquality>& extra_equalities,
               const Tolerances& tol, KernelMode mode) {
  static std::once_flag eigen_threads_flag;
  std::call_once(eigen_threads_flag, [] { Eigen::setNbThreads(1); });

  for (const auto& [var, coeff] : objective.terms)
    if (var < 0 || var >= problem.n_vars)
      throw std::invalid_argument("sdp::solve: objective references unknown variable");
  for (const auto& eq : extra_equalities)
    for (const auto& [var, coeff] : eq.functional.terms)
      if (var < 0 || var >= problem.n_vars)
        throw std::invalid_argument("sdp::solve: equality references unknown variable");

  Compiled c = compile(problem, objective, direction, extra_equalities);
  const int n = c.dim;
  const int m = static_cast<int>(c.constraints.size());
  const double sign = direction == Direction::minimize ? 1.0 : -1.0;

  // Normalize constraints; scale the objective to unit Frobenius norm.
  VectorXd b(m);
  for (int k = 0; k < m; ++k) {
    double nrm = c.constraints[k].frobenius_norm();
    if (nrm <= 0.0) throw std::invalid_argument("sdp::solve: empty constraint");
    for (double& w : c.constraints[k].weights) w /= nrm;
    c.constraints[k].rhs /= nrm;
    b(k) = c.constraints[k].rhs;
  }
  double cnorm = std::max(1.0, c.objective.frobenius_norm());
  for (double& w : c.objective.weights) w /= cnorm;

  MatrixXd cmat = MatrixXd::Zero(n, n);
  c.objective.add_scaled_to(cmat, 1.0);
  cmat = 0.5 * (cmat + cmat.transpose()).eval();

  auto apply_A = [&](const MatrixXd& v) {
    VectorXd out(m);
    for (int k = 0; k < m; ++k) out(k) = c.constraints[k].inner(v);
    return out;
  };
  auto apply_At = [&](const VectorXd& y) {
    MatrixXd out = MatrixXd::Zero(n, n);
    for (int k = 0; k < m; ++k) c.constraints[k].add_scaled_to(out, y(k));
    return out;
  };

  const double bnorm = b.norm();
  const double cfro = cmat.norm();

  IterationState it;
  double xi = std::max({10.0, std::sqrt(static_cast<double>(n)),
                        static_cast<double>(n) * b.cwiseAbs().maxCoeff()});
  double eta = std::max({10.0, std::sqrt(static_cast<double>(n)), cfro});
  it.x = xi * MatrixXd::Identity(n, n);
  it.s = eta * MatrixXd::Identity(n, n);
  it.y = VectorXd::Zero(m);

  IterationState best = it;
  Metrics best_mt;
  double best_score = std::numeric_limits<double>::infinity();
  Metrics mt;
  double prev_mu = std::numeric_limits<double>::infinity();
  int stall = 0, tiny_steps = 0;
  std::string reason;
  auto near_ok = [&] {
    auto good = [](const Metrics& m) {
      return m.pinf <= 1e-6 && m.dinf <= 1e-6 && m.gap <= 1e-5;
    };
    return good(mt) || good(best_mt);
  };

  MatrixXd schur;
  auto finish = [&](Status status, int iters) {
    // report the best iterate seen, not necessarily the last one
    if (best_score < mt.score() &&
        (status == Status::near_optimal || status == Status::optimal ||
         status == Status::numerical_failure)) {
      it = best;
      mt = best_mt;
    }
    Solution sol;
    sol.status = status;
    sol.objective_value = sign * mt.pobj;
    sol.certified_value = sign * mt.dobj;
    sol.duality_gap = std::abs(mt.pobj - mt.dobj);
    sol.iterations = iters;
    sol.moment_vector.resize(problem.n_vars);
    for (int v = 0; v < problem.n_vars; ++v)
      sol.moment_vector[v] = it.x(c.var_rep[v].first, c.var_rep[v].second);
    std::ostringstream os;
    os << "iters=" << iters << " pinf=" << mt.pinf << " dinf=" << mt.dinf
       << " gap=" << sol.duality_gap << (reason.empty() ? "" : " ") << reason;
    sol.diagnostics = os.str();
    return sol;
  };

  int iter = 0;
  for (; iter < tol.max_iterations; ++iter) {
    VectorXd rp = b - apply_A(it.x);
    MatrixXd rd = cmat - it.s - apply_At(it.y);

    double xs = inner_full(it.x, it.s);
    mt.mu = xs / n;
    mt.pobj = c.objective.inner(it.x) * cnorm + c.objective_offset;
    mt.dobj = b.dot(it.y) * cnorm + c.objective_offset;
    mt.pinf = rp.norm() / (1.0 + bnorm);
    mt.dinf = rd.norm() / (1.0 + cfro);
    double absgap = std::abs(mt.pobj - mt.dobj);
    mt.gap = absgap / (1.0 + std::abs(mt.pobj) + std::abs(mt.dobj));

    if (mt.pinf <= tol.feasibility && mt.dinf <= tol.feasibility &&
        absgap <= tol.gap * (1.0 + std::abs(mt.pobj) + std::abs(mt.dobj)))
      return finish(Status::optimal, iter);

    // Divergence of one side with the other feasible flags in/unboundedness.
    if (mt.dobj > 1e8 * cnorm && mt.dinf < 1e-6) {
      reason = "dual objective diverging";
      return finish(Status::infeasible, iter);
    }
    if (mt.pobj < -1e8 * cnorm && mt.pinf < 1e-6) {
      reason = "primal objective diverging";
      return finish(Status::unbounded, iter);
    }

    if (mt.score() < best_score) {
      best_score = mt.score();
      best = it;
      best_mt = mt;
    }
    if (mt.mu > prev_mu / 1.02) {
      if (++stall >= 10) {
        if (near_ok()) {
          reason = "stalled";
          return finish(Status::near_optimal, iter);
        }
        if (mt.pinf > 1e-4 && mt.dinf <= 1e-6 && mt.dobj > 1e3 * cnorm) {
          reason = "stalled with primal infeasibility";
          return finish(Status::infeasible, iter);
        }
        reason = "stalled far from optimality";
        return finish(Status::numerical_failure, iter);
      }
    } else {
      stall = 0;
    }
    prev_mu = mt.mu;

    // Iterates live on the PSD boundary at convergence; factor with an
    // escalating jitter so the final iterations survive rank deficiency.
    auto robust_llt = [&](const MatrixXd& mat, Eigen::LLT<MatrixXd>& out) {
      out.compute(mat);
      double jitter = 1e-14 * (1.0 + mat.trace() / n);
      for (int attempt = 0; attempt < 6 && out.info() != Eigen::Success;
           ++attempt) {
        MatrixXd reg = mat;
        reg.diagonal().array() += jitter;
        out.compute(reg);
        jitter *= 100.0;
      }
      return out.info() == Eigen::Success;
    };
    Eigen::LLT<MatrixXd> llt_s, llt_x;
    if (!robust_llt(it.s, llt_s) || !robust_llt(it.x, llt_x)) {
      if (near_ok()) {
        reason = "iterate on the PSD boundary";
        return finish(Status::near_optimal, iter);
      }
      reason = "iterate lost positive definiteness";
      return finish(Status::numerical_failure, iter);
    }
    MatrixXd sinv = llt_s.solve(MatrixXd::Identity(n, n));
    sinv = 0.5 * (sinv + sinv.transpose()).eval();

    assemble_schur(c.constraints, sinv, it.x, schur, mode);
    // Small diagonal lift: keeps the factorization alive when the normal
    // matrix turns near-singular at degenerate (zero-interior) instances.
    double lift = 1e-14 * (1.0 + schur.diagonal().maxCoeff());
    MatrixXd schur_f;
    bool factored = false;
    for (int attempt = 0; attempt < 5 && !factored; ++attempt) {
      schur_f = schur;
      schur_f.diagonal().array() += lift;
      factored = cholesky_factor(schur_f, mode);
      lift *= 1e3;
    }
    if (!factored) {
      reason = "Schur complement not positive definite";
      return finish(Status::numerical_failure, iter);
    }

    MatrixXd g0 = it.x * rd * sinv;
    VectorXd asinv(m), ag0(m);
    for (int k = 0; k < m; ++k) {
      asinv(k) = c.constraints[k].inner(sinv);
      ag0(k) = c.constraints[k].inner(g0);
    }

    // one step of iterative refinement buys the endgame a few digits
    auto solve_normal = [&](const VectorXd& r) {
      VectorXd z = r;
      cholesky_solve(schur_f, z);
      VectorXd resid = r - schur * z;
      cholesky_solve(schur_f, resid);
      z += resid;
      return z;
    };

    // predictor (affine scaling)
    VectorXd dy_aff = solve_normal(b + ag0);
    MatrixXd ds_aff = rd - apply_At(dy_aff);
    MatrixXd dx_aff = -it.x - it.x * ds_aff * sinv;
    dx_aff = 0.5 * (dx_aff + dx_aff.transpose()).eval();

    double ap_aff = std::min(1.0, max_step(llt_x, dx_aff));
    double ad_aff = std::min(1.0, max_step(llt_s, ds_aff));
    double mu_aff =
        inner_full(it.x + ap_aff * dx_aff, it.s + ad_aff * ds_aff) / n;
    double sigma = std::pow(std::max(0.0, mu_aff / mt.mu), 3.0);
    sigma = std::clamp(sigma, 1e-8, 1.0);

    // corrector
    MatrixXd h0 = dx_aff * ds_aff * sinv;
    VectorXd ah0(m);
    for (int k = 0; k < m; ++k) ah0(k) = c.constraints[k].inner(h0);
    VectorXd dy = solve_normal(b - sigma * mt.mu * asinv + ag0 + ah0);
    MatrixXd ds = rd - apply_At(dy);
    MatrixXd dx = sigma * mt.mu * sinv - it.x - it.x * ds * sinv - h0;
    dx = 0.5 * (dx + dx.transpose()).eval();

    // push harder once the path is well resolved
    const double tau = iter < 8 ? 0.95 : (mt.mu > 1e-7 ? 0.98 : 0.995);
    double ap = std::min(1.0, tau * max_step(llt_x, dx));
    double ad = std::min(1.0, tau * max_step(llt_s, ds));

    if (ap < 1e-10 && ad < 1e-10) {
      if (++tiny_steps >= 3) {
        if (near_ok()) {
          reason = "step collapse";
          return finish(Status::near_optimal, iter);
        }
        reason = "step collapse far from optimality";
        return finish(Status::numerical_failure, iter);
      }
    } else {
      tiny_steps = 0;
    }

    it.x += ap * dx;
    it.y += ad * dy;
    it.s += ad * ds;
    it.x = 0.5 * (it.x + it.x.transpose()).eval();
    it.s = 0.5 * (it.s + it.s.transpose()).eval();
  }

  if (near_ok()) {
    reason = "iteration cap";
    return finish(Status::near_optimal, iter);
  }
  reason = "iteration cap far from optimality";
  return finish(Status::numerical_failure, iter);
}

}  // namespace dicert::sdp
