#include "dicert/sdp_kernels.hpp"

#include <omp.h>

#include <cmath>

namespace dicert::sdp {

void ConstraintMatrix::add_sym(int i, int j, double logical_weight) {
  if (i == j) {
    rows.push_back(i);
    cols.push_back(j);
    weights.push_back(logical_weight);
  } else {
    rows.push_back(i);
    cols.push_back(j);
    weights.push_back(0.5 * logical_weight);
    rows.push_back(j);
    cols.push_back(i);
    weights.push_back(0.5 * logical_weight);
  }
}

double ConstraintMatrix::inner(const Eigen::MatrixXd& x) const {
  double v = 0.0;
  for (std::size_t e = 0; e < rows.size(); ++e)
    v += weights[e] * x(rows[e], cols[e]);
  return v;
}

void ConstraintMatrix::add_scaled_to(Eigen::MatrixXd& out, double scale) const {
  for (std::size_t e = 0; e < rows.size(); ++e)
    out(rows[e], cols[e]) += scale * weights[e];
}

double ConstraintMatrix::frobenius_norm() const {
  double v = 0.0;
  for (double w : weights) v += w * w;
  return std::sqrt(v);
}

namespace {

// tr(A_k sinv A_l x) = sum_{e in k} sum_{f in l} w_e w_f sinv(c_e, r_f) x(c_f, r_e)
inline double schur_entry(const ConstraintMatrix& ak, const ConstraintMatrix& al,
                          const Eigen::MatrixXd& sinv,
                          const Eigen::MatrixXd& x) {
  double v = 0.0;
  const std::size_t ne = ak.rows.size();
  const std::size_t nf = al.rows.size();
  for (std::size_t e = 0; e < ne; ++e) {
    const int re = ak.rows[e];
    const int ce = ak.cols[e];
    const double we = ak.weights[e];
    double acc = 0.0;
    for (std::size_t f = 0; f < nf; ++f)
      acc += al.weights[f] * sinv(ce, al.rows[f]) * x(al.cols[f], re);
    v += we * acc;
  }
  return v;
}

}  // namespace

void assemble_schur(const std::vector<ConstraintMatrix>& constraints,
                    const Eigen::MatrixXd& sinv, const Eigen::MatrixXd& x,
                    Eigen::MatrixXd& out, KernelMode mode) {
  const int k = static_cast<int>(constraints.size());
  out.resize(k, k);
  if (mode == KernelMode::openmp) {
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j)
        out(i, j) = schur_entry(constraints[i], constraints[j], sinv, x);
  } else {
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j)
        out(i, j) = schur_entry(constraints[i], constraints[j], sinv, x);
  }
  // mirror to the lower triangle
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < i; ++j) out(i, j) = out(j, i);
}

namespace {

bool factor_diag_block(Eigen::MatrixXd& a, int j0, int jb) {
  for (int k = 0; k < jb; ++k) {
    const int kk = j0 + k;
    double d = a(kk, kk) - a.row(kk).segment(j0, k).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    d = std::sqrt(d);
    a(kk, kk) = d;
    for (int i = k + 1; i < jb; ++i) {
      const int ii = j0 + i;
      double v = a(ii, kk);
      if (k > 0)
        v -= a.row(ii).segment(j0, k).dot(a.row(kk).segment(j0, k));
      a(ii, kk) = v / d;
    }
  }
  return true;
}

// Solve X * L^T = B in place for the panel rows below the diagonal block.
void panel_solve(Eigen::MatrixXd& a, int j0, int jb, int r0, int rh) {
  for (int t = 0; t < jb; ++t) {
    const int jt = j0 + t;
    auto col = a.block(r0, jt, rh, 1);
    if (t > 0)
      col.noalias() -=
          a.block(r0, j0, rh, t) * a.row(jt).segment(j0, t).transpose();
    col /= a(jt, jt);
  }
}

}  // namespace

bool cholesky_factor(Eigen::MatrixXd& a, KernelMode mode, int block) {
  const int n = static_cast<int>(a.rows());
  const int tile = block;
  bool ok = true;

  for (int j0 = 0; j0 < n && ok; j0 += block) {
    const int jb = std::min(block, n - j0);
    if (!factor_diag_block(a, j0, jb)) return false;

    const int rest = n - (j0 + jb);
    if (rest == 0) break;
    const int r0 = j0 + jb;

    // panel solve, split over row chunks
    const int nchunks = (rest + tile - 1) / tile;
    if (mode == KernelMode::openmp) {
#pragma omp parallel for schedule(static)
      for (int c = 0; c < nchunks; ++c) {
        const int cr0 = r0 + c * tile;
        const int crh = std::min(tile, n - cr0);
        panel_solve(a, j0, jb, cr0, crh);
      }
    } else {
      for (int c = 0; c < nchunks; ++c) {
        const int cr0 = r0 + c * tile;
        const int crh = std::min(tile, n - cr0);
        panel_solve(a, j0, jb, cr0, crh);
      }
    }

    // trailing update over lower-triangle tile pairs
    const int npairs = nchunks * (nchunks + 1) / 2;
    auto update_pair = [&](int p) {
      // unflatten p -> (bi >= bk)
      int bi = 0;
      while ((bi + 1) * (bi + 2) / 2 <= p) ++bi;
      const int bk = p - bi * (bi + 1) / 2;
      const int i0 = r0 + bi * tile;
      const int k0 = r0 + bk * tile;
      const int ih = std::min(tile, n - i0);
      const int kh = std::min(tile, n - k0);
      a.block(i0, k0, ih, kh).noalias() -=
          a.block(i0, j0, ih, jb) * a.block(k0, j0, kh, jb).transpose();
    };
    if (mode == KernelMode::openmp) {
#pragma omp parallel for schedule(dynamic, 1)
      for (int p = 0; p < npairs; ++p) update_pair(p);
    } else {
      for (int p = 0; p < npairs; ++p) update_pair(p);
    }
  }
  return ok;
}

void cholesky_solve(const Eigen::MatrixXd& factor, Eigen::VectorXd& rhs) {
  factor.triangularView<Eigen::Lower>().solveInPlace(rhs);
  factor.triangularView<Eigen::Lower>().transpose().solveInPlace(rhs);
}

}  // namespace dicert::sdp
