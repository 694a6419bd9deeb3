// Serial vs OpenMP timing for the hot kernels: Schur assembly, blocked
// Cholesky, bound-box solve batches, and basin-hopping restarts.

#include <omp.h>

#include <cstdio>
#include <random>

#include "dicert/bell_catalog.hpp"
#include "dicert/entropy.hpp"
#include "dicert/probbounds.hpp"
#include "dicert/sdp_kernels.hpp"

using namespace dicert;

namespace {

double bench(const char* name, int reps, const std::function<void()>& fn) {
  fn();  // warm-up
  double t0 = omp_get_wtime();
  for (int r = 0; r < reps; ++r) fn();
  double dt = (omp_get_wtime() - t0) / reps;
  std::printf("  %-34s %10.3f ms\n", name, dt * 1e3);
  return dt;
}

void bench_pair(const char* what, int reps, const std::function<void(sdp::KernelMode)>& fn) {
  std::printf("%s\n", what);
  double ts = bench("serial", reps, [&] { fn(sdp::KernelMode::serial); });
  double tp = bench("openmp", reps, [&] { fn(sdp::KernelMode::openmp); });
  std::printf("  speedup: %.2fx\n\n", ts / tp);
}

}  // namespace

int main() {
  Eigen::setNbThreads(1);
  std::printf("dicert kernel benchmark, %d OpenMP threads\n\n",
              omp_get_max_threads());

  // synthetic Schur-sized problem: k sparse constraints on a d x d block
  {
    const int d = 60, k = 1200;
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> idx(0, d - 1);
    std::vector<sdp::ConstraintMatrix> cons(k);
    for (auto& c : cons) {
      c.add_sym(idx(rng), idx(rng), 1.0);
      c.add_sym(idx(rng), idx(rng), -1.0);
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(d, d);
    Eigen::MatrixXd x = a * a.transpose() + d * Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd s = x;
    Eigen::MatrixXd out;
    bench_pair("schur assembly (d=60, k=1200)", 5, [&](sdp::KernelMode m) {
      assemble_schur(cons, s, x, out, m);
    });
  }

  {
    const int n = 1500;
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
    Eigen::MatrixXd spd = a * a.transpose() + n * Eigen::MatrixXd::Identity(n, n);
    bench_pair("blocked cholesky (n=1500)", 3, [&](sdp::KernelMode m) {
      Eigen::MatrixXd w = spd;
      sdp::cholesky_factor(w, m);
    });
  }

  {
    CatalogEntry i2 = get("I2");
    auto spot = i2.spot_internal();
    bench_pair("bound box (I2, level 2, 8 solves)", 1, [&](sdp::KernelMode m) {
      BoundBoxOptions o;
      o.mode = m;
      bound_box(i2, 0.05, spot, 2, standard_expressions(spot, false), o);
    });

    BoundBoxOptions o;
    BoundBox box = bound_box(i2, 0.05, spot, 2, standard_expressions(spot, false), o);
    bench_pair("basin hopping (1500 restarts)", 3, [&](sdp::KernelMode m) {
      MinimizeOptions mo;
      mo.mode = m;
      minimize_entropy(box, mo);
    });
  }
  return 0;
}
