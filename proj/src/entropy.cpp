#include "dicert/entropy.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dicert {

namespace {

inline double plog2p(double p) {
  return p > 0.0 ? p * std::log2(p) : 0.0;
}

// splitmix64: cheap per-restart stream derivation from (seed, index)
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr int kBatch = 32;  // fixed batch size keeps results thread-count independent

}  // namespace

double shannon_entropy(std::span<const double> dist) {
  double sum = 0.0;
  for (double p : dist) {
    if (p < -1e-12 || !std::isfinite(p))
      throw std::invalid_argument("shannon_entropy: negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw std::invalid_argument("shannon_entropy: distribution not normalized");
  double h = 0.0;
  for (double p : dist) h -= plog2p(std::max(0.0, p));
  return h;
}

double min_entropy(const BoundBox& box) {
  double guess = 0.0;
  for (int i = 0; i < 4; ++i) guess = std::max(guess, box.single(i).hi);
  guess = std::clamp(guess, 1e-300, 1.0);
  return -std::log2(guess);
}

Polytope Polytope::from_box(const BoundBox& box) {
  std::vector<Eigen::Vector3d> rows;
  std::vector<double> rhs;
  auto push = [&](const Eigen::Vector3d& a, double b) {
    rows.push_back(a);
    rhs.push_back(b);
  };
  for (const BoundEntry& e : box.entries) {
    // value = c3 + sum_i (ci - c3) xi  with x4 = 1 - x1 - x2 - x3
    Eigen::Vector3d a(e.expr.coeffs[0] - e.expr.coeffs[3],
                      e.expr.coeffs[1] - e.expr.coeffs[3],
                      e.expr.coeffs[2] - e.expr.coeffs[3]);
    const double off = e.expr.coeffs[3];
    if (a.norm() > 0.0) {
      push(a, e.hi - off);
      push(-a, off - e.lo);
    }
  }
  // simplex guards
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d a = Eigen::Vector3d::Zero();
    a(i) = -1.0;
    push(a, 0.0);
  }
  push(Eigen::Vector3d::Ones(), 1.0);

  Polytope p;
  p.a.resize(static_cast<int>(rows.size()), 3);
  p.b.resize(static_cast<int>(rows.size()));
  for (int i = 0; i < p.a.rows(); ++i) {
    p.a.row(i) = rows[i].transpose();
    p.b(i) = rhs[i];
  }
  return p;
}

double Polytope::max_violation(const Eigen::Vector3d& x) const {
  return ((a * x - b).array().max(0.0)).maxCoeff();
}

Eigen::Vector3d Polytope::project(const Eigen::Vector3d& z) const {
  const int m = static_cast<int>(a.rows());
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd sq(m);
  for (int i = 0; i < m; ++i) sq(i) = a.row(i).squaredNorm();
  Eigen::Vector3d x = z;
  for (int sweep = 0; sweep < 20000; ++sweep) {
    double change = 0.0;
    for (int i = 0; i < m; ++i) {
      const double r = a.row(i).dot(x) - b(i);
      const double next = std::max(0.0, lambda(i) + r / sq(i));
      const double d = next - lambda(i);
      if (d != 0.0) {
        x -= a.row(i).transpose() * d;
        lambda(i) = next;
        change = std::max(change, std::abs(d));
      }
    }
    if (change < 1e-15) break;
  }
  return x;
}

std::array<double, 4> to_distribution(const Eigen::Vector3d& v) {
  std::array<double, 4> d{v(0), v(1), v(2), 1.0 - v(0) - v(1) - v(2)};
  for (double& p : d) p = std::clamp(p, 0.0, 1.0);
  return d;
}

double entropy_of_free(const Eigen::Vector3d& v) {
  auto d = to_distribution(v);
  double h = 0.0;
  for (double p : d) h -= plog2p(p);
  return h;
}

Eigen::Vector3d entropy_gradient(const Eigen::Vector3d& v) {
  auto d = to_distribution(v);
  const double p4 = std::max(d[3], 1e-16);
  Eigen::Vector3d g;
  for (int i = 0; i < 3; ++i) g(i) = std::log2(p4 / std::max(d[i], 1e-16));
  return g;
}

namespace {

// Projected gradient descent with backtracking; for the concave entropy this
// rides to a face and terminates in a vertex or a stationary boundary point.
Eigen::Vector3d local_descent(const Polytope& poly, Eigen::Vector3d x,
                              double objective_tol) {
  x = poly.project(x);
  double h = entropy_of_free(x);
  double step = 0.5;
  for (int it = 0; it < 400; ++it) {
    const Eigen::Vector3d g = entropy_gradient(x);
    bool moved = false;
    double t = step;
    for (int bt = 0; bt < 40; ++bt) {
      Eigen::Vector3d cand = poly.project(x - t * g);
      double hc = entropy_of_free(cand);
      if (hc < h - 1e-14) {
        const bool small = (cand - x).norm() < 1e-13 &&
                           h - hc < objective_tol * 1e-3;
        x = cand;
        h = hc;
        moved = true;
        step = std::min(1.0, t * 2.0);
        if (small) return x;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return x;
}

bool lex_less(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  for (int i = 0; i < 4; ++i) {
    if (a[i] < b[i] - 1e-15) return true;
    if (a[i] > b[i] + 1e-15) return false;
  }
  return false;
}

}  // namespace

MinimizeResult minimize_entropy(const BoundBox& box,
                                const MinimizeOptions& options) {
  const Polytope poly = Polytope::from_box(box);

  // Seed point: box midpoints of the singles, projected into the polytope.
  Eigen::Vector3d mid;
  for (int i = 0; i < 3; ++i)
    mid(i) = 0.5 * (box.single(i).lo + box.single(i).hi);
  Eigen::Vector3d start = poly.project(mid);
  if (poly.max_violation(start) > 1e-6)
    throw InfeasibleBoxError(
        "minimize_entropy: constraint polytope is empty (inconsistent bounds)");

  Eigen::Vector3d best = local_descent(poly, start, options.objective_tol);
  double best_h = entropy_of_free(best);
  std::array<double, 4> best_dist = to_distribution(best);

  const int restarts = std::max(0, options.restarts);
  std::vector<Eigen::Vector3d> cand(kBatch);
  std::vector<double> cand_h(kBatch);

  int done = 0;
  while (done < restarts) {
    const int batch = std::min(kBatch, restarts - done);
    const Eigen::Vector3d base = best;
#pragma omp parallel for schedule(static) if (options.mode == sdp::KernelMode::openmp)
    for (int j = 0; j < batch; ++j) {
      std::mt19937_64 rng(mix_seed(options.seed, done + j));
      std::uniform_real_distribution<double> u(-0.1, 0.1);
      Eigen::Vector3d p = base;
      for (int i = 0; i < 3; ++i) p(i) += u(rng);
      // clip to the simplex before descending
      for (int i = 0; i < 3; ++i) p(i) = std::clamp(p(i), 0.0, 1.0);
      const double s = p.sum();
      if (s > 1.0) p /= s;
      cand[j] = local_descent(poly, p, options.objective_tol);
      cand_h[j] = entropy_of_free(cand[j]);
    }
    for (int j = 0; j < batch; ++j) {
      auto d = to_distribution(cand[j]);
      if (cand_h[j] < best_h - 1e-15 ||
          (std::abs(cand_h[j] - best_h) <= 1e-15 && lex_less(d, best_dist))) {
        best = cand[j];
        best_h = cand_h[j];
        best_dist = d;
      }
    }
    done += batch;
  }

  MinimizeResult r;
  r.dist = best_dist;
  r.entropy = best_h;
  r.restarts_used = restarts;
  return r;
}

ConjectureResult conjecture_distribution(const BoundBox& box) {
  // Feasibility slack must absorb the gap padding of degenerate boxes.
  const double eps = std::max(1e-9, 20.0 * box.max_pad);

  ConjectureResult best;
  best.entropy = std::numeric_limits<double>::infinity();

  for (int iu = 0; iu < 4; ++iu) {
    for (int ir = 0; ir < 4; ++ir) {
      if (ir == iu) continue;
      std::array<double, 4> d{};
      d[iu] = box.single(iu).hi;
      double rest = 1.0 - d[iu];
      for (int i = 0; i < 4; ++i) {
        if (i == iu || i == ir) continue;
        d[i] = box.single(i).lo;
        rest -= d[i];
      }
      d[ir] = rest;

      bool ok = true;
      for (int i = 0; i < 4 && ok; ++i)
        ok = d[i] >= -eps && d[i] <= 1.0 + eps;
      for (const BoundEntry& e : box.entries) {
        if (!ok) break;
        double v = 0.0;
        for (int i = 0; i < 4; ++i) v += e.expr.coeffs[i] * d[i];
        ok = v >= e.lo - eps && v <= e.hi + eps;
      }
      if (!ok) continue;

      std::array<double, 4> clamped = d;
      double sum = 0.0;
      for (double& p : clamped) {
        p = std::clamp(p, 0.0, 1.0);
        sum += p;
      }
      for (double& p : clamped) p /= sum;
      double h = 0.0;
      for (double p : clamped) h -= plog2p(p);

      if (h < best.entropy - 1e-15 ||
          (std::abs(h - best.entropy) <= 1e-15 &&
           (!best.applicable || lex_less(clamped, best.dist)))) {
        best.applicable = true;
        best.dist = clamped;
        best.entropy = h;
        best.upper_index = iu;
        best.residual_index = ir;
      }
    }
  }
  if (!best.applicable) best.entropy = 0.0;
  return best;
}

EntropyCertificate certify(const CatalogEntry& entry, double noise,
                           std::pair<int, int> spot,
                           const CertifyOptions& options) {
  BoundBoxOptions bopt;
  bopt.tolerances = options.tolerances;
  bopt.mode = options.mode;
  bopt.bell_inequality = options.bell_inequality;
  BoundBox box =
      bound_box(entry, noise, spot, options.level,
                standard_expressions(spot, options.extras), bopt);

  MinimizeOptions mopt;
  mopt.restarts = options.restarts >= 0 ? options.restarts
                                        : (options.extras ? 100 : 1500);
  mopt.seed = options.seed;
  mopt.mode = options.mode;
  MinimizeResult opt = minimize_entropy(box, mopt);
  ConjectureResult conj = conjecture_distribution(box);

  EntropyCertificate cert;
  cert.noise = noise;
  cert.shannon_lower = opt.entropy;
  cert.min_entropy_bits = min_entropy(box);
  cert.optimizer_dist = opt.dist;
  cert.conjecture_dist = conj.dist;
  cert.conjecture_entropy = conj.entropy;
  cert.conjecture_applicable = conj.applicable;
  cert.agreement = conj.applicable
                       ? std::abs(opt.entropy - conj.entropy)
                       : std::numeric_limits<double>::quiet_NaN();
  cert.restarts_used = opt.restarts_used;
  cert.level = options.level;
  cert.status = box.worst_status();
  cert.box = std::move(box);
  return cert;
}

}  // namespace dicert
