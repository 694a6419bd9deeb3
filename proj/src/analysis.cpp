#include "dicert/analysis.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dicert {

namespace {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr double kLn2 = 0.69314718055994530942;

inline double safe_log2_ratio(double num, double den) {
  return std::log2(std::max(num, 1e-300) / std::max(den, 1e-300));
}

// factor * value with the convention 0 * (anything, even inf) = 0
inline double guarded(double factor, double value) {
  return factor == 0.0 ? 0.0 : factor * value;
}

}  // namespace

SweepResult sweep(const CatalogEntry& entry, std::pair<int, int> spot,
                  const std::vector<double>& grid,
                  const SweepOptions& options) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0))
      throw std::invalid_argument("sweep: noise grid outside [0,1]");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("sweep: grid must be strictly increasing");
  }

  SweepResult result;
  result.entry = entry;
  result.spot = spot;
  result.grid = grid;
  result.options = options;
  result.points.resize(grid.size());

  const bool outer_parallel = options.mode == sdp::KernelMode::openmp;
  const int n = static_cast<int>(grid.size());

#pragma omp parallel for schedule(dynamic, 1) if (outer_parallel)
  for (int i = 0; i < n; ++i) {
    SweepPoint& pt = result.points[i];
    pt.noise = grid[i];
    CertifyOptions copt = options.certify;
    copt.seed = mix_seed(options.certify.seed, static_cast<std::uint64_t>(i));
    copt.mode = outer_parallel ? sdp::KernelMode::serial : options.certify.mode;
    try {
      pt.cert = certify(entry, grid[i], spot, copt);
    } catch (const std::exception& ex) {
      pt.error = ex.what();
    }
  }
  return result;
}

std::vector<double> central_difference(const std::vector<double>& values,
                                       const std::vector<double>& grid,
                                       int order) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("central_difference: order must be 1 or 2");
  if (values.size() != grid.size() || grid.size() < 3)
    throw std::invalid_argument("central_difference: need >= 3 grid points");
  const double h = grid[1] - grid[0];
  for (std::size_t i = 1; i + 1 < grid.size(); ++i)
    if (std::abs((grid[i + 1] - grid[i]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::invalid_argument("central_difference: grid is not uniform");

  std::vector<double> out(values.size() - 2);
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (order == 1)
      out[i - 1] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    else
      out[i - 1] = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
  }
  return out;
}

DerivativeReport entropy_second_derivative(const std::vector<double>& lower1,
                                           const std::vector<double>& lower2,
                                           const std::vector<double>& upper3,
                                           const std::vector<double>& grid) {
  if (lower1.size() != grid.size() || lower2.size() != grid.size() ||
      upper3.size() != grid.size())
    throw std::invalid_argument(
        "entropy_second_derivative: trajectory/grid size mismatch");

  DerivativeReport r;
  r.dl1 = central_difference(lower1, grid, 1);
  r.dl2 = central_difference(lower2, grid, 1);
  r.du3 = central_difference(upper3, grid, 1);
  r.d2l1 = central_difference(lower1, grid, 2);
  r.d2l2 = central_difference(lower2, grid, 2);
  r.d2u3 = central_difference(upper3, grid, 2);
  r.grid_interior.assign(grid.begin() + 1, grid.end() - 1);

  // referee: plain central differences of the composed entropy itself
  std::vector<double> h_traj(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double res = 1.0 - lower1[i] - lower2[i] - upper3[i];
    std::array<double, 4> d{lower1[i], lower2[i], upper3[i],
                            std::max(0.0, res)};
    double h = 0.0;
    for (double p : d) h -= p > 0.0 ? p * std::log2(p) : 0.0;
    h_traj[i] = h;
  }
  r.d2h_dp2_reference = central_difference(h_traj, grid, 2);

  const std::size_t n = r.grid_interior.size();
  r.dh_dp.resize(n);
  r.d2h_dp2.resize(n);
  r.d2h_dp2_analytic.resize(n);
  r.d2h_dp2_printed.resize(n);
  r.alpha.resize(n);
  r.beta1.resize(n);
  r.beta2.resize(n);
  r.beta3.resize(n);
  r.beta1_printed.resize(n);
  r.beta2_printed.resize(n);
  r.beta3_printed.resize(n);
  r.region.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = lower1[i + 1], x2 = lower2[i + 1], x3 = upper3[i + 1];
    const double res = std::max(1.0 - x1 - x2 - x3, 0.0);
    const double dx[3] = {r.dl1[i], r.dl2[i], r.du3[i]};
    const double d2x[3] = {r.d2l1[i], r.d2l2[i], r.d2u3[i]};
    const double x[3] = {x1, x2, x3};

    const double dH[3] = {safe_log2_ratio(res, x1), safe_log2_ratio(res, x2),
                          safe_log2_ratio(res, x3)};
    r.dh_dp[i] = guarded(dx[0], dH[0]) + guarded(dx[1], dH[1]) +
                 guarded(dx[2], dH[2]);

    const double alpha = 1.0 / std::max(res, 1e-300);
    const double beta[3] = {
        (1.0 - x2 - x3) / std::max(x1 * res, 1e-300),
        (1.0 - x1 - x3) / std::max(x2 * res, 1e-300),
        (1.0 - x1 - x2) / std::max(x3 * res, 1e-300),
    };
    r.alpha[i] = alpha;
    r.beta1[i] = beta[0];
    r.beta2[i] = beta[1];
    r.beta3[i] = beta[2];

    // component-wise chain-rule assembly
    double assembly = 0.0;
    for (int k = 0; k < 3; ++k) {
      double cross = 0.0;
      for (int j = 0; j < 3; ++j)
        if (j != k) cross += dx[j];
      assembly += guarded(d2x[k], dH[k]);
      assembly -= (guarded(dx[k] * dx[k], beta[k]) +
                   guarded(dx[k] * cross, alpha)) /
                  kLn2;
    }
    r.d2h_dp2[i] = assembly;

    // direct analytic Hessian route
    const double sdx = dx[0] + dx[1] + dx[2];
    double quad = guarded(sdx * sdx, alpha);
    for (int k = 0; k < 3; ++k)
      quad += guarded(dx[k] * dx[k], 1.0 / std::max(x[k], 1e-300));
    double analytic = -quad / kLn2;
    for (int k = 0; k < 3; ++k) analytic += guarded(d2x[k], dH[k]);
    r.d2h_dp2_analytic[i] = analytic;

    // printed beta coefficients, taken literally
    const double bp[3] = {
        (1.0 - x2 - x3) / (1.0 - x1 * x1 - x2 - x3),
        (1.0 - x1 - x3) / (1.0 - x1 - x2 * x2 - x3),
        (1.0 - x1 - x2) / (1.0 - x1 - x2 - x3 * x3),
    };
    r.beta1_printed[i] = bp[0];
    r.beta2_printed[i] = bp[1];
    r.beta3_printed[i] = bp[2];
    double printed = 0.0;
    for (int k = 0; k < 3; ++k) {
      double cross = 0.0;
      for (int j = 0; j < 3; ++j)
        if (j != k) cross += dx[j];
      printed += guarded(d2x[k], dH[k]);
      printed -= (guarded(dx[k] * dx[k], bp[k]) +
                  guarded(dx[k] * cross, alpha)) /
                 kLn2;
    }
    r.d2h_dp2_printed[i] = printed;

    r.region[i] = std::abs(assembly) < 1e-6 ? 0 : (assembly < 0.0 ? -1 : +1);
  }

  double dev_assembly = 0.0, dev_printed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dev_assembly = std::max(
        dev_assembly, std::abs(r.d2h_dp2[i] - r.d2h_dp2_reference[i]));
    dev_printed = std::max(
        dev_printed, std::abs(r.d2h_dp2_printed[i] - r.d2h_dp2_reference[i]));
  }
  std::ostringstream os;
  os << (dev_assembly <= dev_printed ? "assembly" : "printed-beta")
     << " path matches finite differences (max deviation assembly="
     << dev_assembly << ", printed=" << dev_printed << ")";
  r.printed_beta_verdict = os.str();
  return r;
}

RoleTrajectories extract_conjecture_trajectories(const SweepResult& sw) {
  RoleTrajectories t;
  std::vector<std::pair<int, int>> roles;
  for (std::size_t i = 0; i < sw.points.size(); ++i) {
    const SweepPoint& pt = sw.points[i];
    if (!pt.cert || !pt.cert->conjecture_applicable) continue;
    const BoundBox& box = pt.cert->box;
    ConjectureResult c = conjecture_distribution(box);
    int lowers[2];
    int li = 0;
    for (int k = 0; k < 4; ++k)
      if (k != c.upper_index && k != c.residual_index) lowers[li++] = k;
    t.grid.push_back(pt.noise);
    t.lower1.push_back(box.single(lowers[0]).lo);
    t.lower2.push_back(box.single(lowers[1]).lo);
    t.upper3.push_back(box.single(c.upper_index).hi);
    t.entropy.push_back(c.entropy);
    roles.emplace_back(c.upper_index, c.residual_index);
  }
  // split into maximal runs of identical role assignment
  std::size_t start = 0;
  for (std::size_t i = 1; i <= roles.size(); ++i) {
    if (i == roles.size() || roles[i] != roles[start]) {
      t.segments.emplace_back(start, i - 1);
      if (i < roles.size()) t.boundaries.push_back(t.grid[i]);
      start = i;
    }
  }
  return t;
}

DerivativeReport convexity_report(const SweepResult& sw) {
  RoleTrajectories t = extract_conjecture_trajectories(sw);
  DerivativeReport out;
  std::string verdict;
  for (const auto& [first, last] : t.segments) {
    const std::size_t len = last - first + 1;
    if (len < 3) continue;
    auto slice = [&](const std::vector<double>& v) {
      return std::vector<double>(v.begin() + first, v.begin() + last + 1);
    };
    DerivativeReport seg = entropy_second_derivative(
        slice(t.lower1), slice(t.lower2), slice(t.upper3), slice(t.grid));
    auto append = [](std::vector<double>& dst, const std::vector<double>& src) {
      dst.insert(dst.end(), src.begin(), src.end());
    };
    append(out.grid_interior, seg.grid_interior);
    append(out.dh_dp, seg.dh_dp);
    append(out.d2h_dp2, seg.d2h_dp2);
    append(out.d2h_dp2_analytic, seg.d2h_dp2_analytic);
    append(out.d2h_dp2_printed, seg.d2h_dp2_printed);
    append(out.d2h_dp2_reference, seg.d2h_dp2_reference);
    append(out.dl1, seg.dl1);
    append(out.dl2, seg.dl2);
    append(out.du3, seg.du3);
    append(out.d2l1, seg.d2l1);
    append(out.d2l2, seg.d2l2);
    append(out.d2u3, seg.d2u3);
    append(out.alpha, seg.alpha);
    append(out.beta1, seg.beta1);
    append(out.beta2, seg.beta2);
    append(out.beta3, seg.beta3);
    append(out.beta1_printed, seg.beta1_printed);
    append(out.beta2_printed, seg.beta2_printed);
    append(out.beta3_printed, seg.beta3_printed);
    out.region.insert(out.region.end(), seg.region.begin(), seg.region.end());
    verdict = seg.printed_beta_verdict;
  }
  if (!t.boundaries.empty()) {
    std::ostringstream os;
    os << verdict << "; role flips at";
    for (double b : t.boundaries) os << " p=" << b;
    verdict = os.str();
  }
  out.printed_beta_verdict = verdict;
  return out;
}

std::optional<double> find_crossover(const SweepResult& a, const SweepResult& b,
                                     double refine_tol) {
  if (a.grid.size() != b.grid.size())
    throw std::invalid_argument("find_crossover: sweeps use different grids");
  for (std::size_t i = 0; i < a.grid.size(); ++i)
    if (std::abs(a.grid[i] - b.grid[i]) > 1e-12)
      throw std::invalid_argument("find_crossover: sweeps use different grids");

  auto sign_of = [](double v) { return std::abs(v) < 1e-12 ? 0 : (v < 0 ? -1 : 1); };
  std::vector<int> sign(a.grid.size(), 0);
  std::vector<bool> ok(a.grid.size(), false);
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    if (a.points[i].cert && b.points[i].cert) {
      ok[i] = true;
      sign[i] = sign_of(a.points[i].cert->shannon_lower -
                        b.points[i].cert->shannon_lower);
    }
  }

  std::optional<std::pair<double, double>> bracket;
  int sign_lo = 0;
  for (std::size_t i = 0; i + 1 < a.grid.size() && !bracket; ++i) {
    if (!ok[i] || !ok[i + 1]) continue;
    if (sign[i] != 0 && sign[i + 1] != 0 && sign[i] != sign[i + 1]) {
      bracket = {a.grid[i], a.grid[i + 1]};
      sign_lo = sign[i];
    }
  }
  if (!bracket) return std::nullopt;

  auto diff_at = [&](double p, int k) {
    CertifyOptions ca = a.options.certify;
    CertifyOptions cb = b.options.certify;
    ca.seed = mix_seed(ca.seed, 1000003 + static_cast<std::uint64_t>(k));
    cb.seed = mix_seed(cb.seed, 1000003 + static_cast<std::uint64_t>(k));
    EntropyCertificate ea = certify(a.entry, p, a.spot, ca);
    EntropyCertificate eb = certify(b.entry, p, b.spot, cb);
    return ea.shannon_lower - eb.shannon_lower;
  };

  auto [lo, hi] = *bracket;
  for (int k = 0; hi - lo > refine_tol && k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    const int s = sign_of(diff_at(mid, k));
    if (s == 0) return mid;
    if (s == sign_lo)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dicert
