#include "dicert/scenario.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>

namespace dicert {

namespace {

constexpr double kEntrySlack = 1e-12;
constexpr double kNormTol = 1e-12;
constexpr double kNoSignalTol = 1e-10;

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument(what);
}

}  // namespace

void Scenario::validate() const {
  if (a_inputs < 2 || b_inputs < 2)
    fail("Scenario: each party needs at least 2 inputs");
}

Behavior::Behavior(Scenario scenario, std::vector<double> table)
    : scenario_(scenario), table_(std::move(table)) {
  scenario_.validate();
  if (table_.size() != table_size(scenario_))
    fail("Behavior: table size does not match scenario");
  for (double v : table_)
    if (!(v >= -kEntrySlack && v <= 1.0 + kEntrySlack))
      fail("Behavior: entry outside [0,1]");
  for (int x = 0; x < scenario_.a_inputs; ++x) {
    for (int y = 0; y < scenario_.b_inputs; ++y) {
      double sum = 0.0;
      for (int a : kOutcomeValues)
        for (int b : kOutcomeValues) sum += at(x, y, a, b);
      if (std::abs(sum - 1.0) > kNormTol)
        fail("Behavior: P(.|x,y) not normalized");
    }
  }
  // No-signaling: Alice's marginal must not depend on y, and vice versa.
  for (int x = 0; x < scenario_.a_inputs; ++x) {
    for (int a : kOutcomeValues) {
      double ref = at(x, 0, a, -1) + at(x, 0, a, +1);
      for (int y = 1; y < scenario_.b_inputs; ++y) {
        double m = at(x, y, a, -1) + at(x, y, a, +1);
        if (std::abs(m - ref) > kNoSignalTol) fail("Behavior: signaling A->B");
      }
    }
  }
  for (int y = 0; y < scenario_.b_inputs; ++y) {
    for (int b : kOutcomeValues) {
      double ref = at(0, y, -1, b) + at(0, y, +1, b);
      for (int x = 1; x < scenario_.a_inputs; ++x) {
        double m = at(x, y, -1, b) + at(x, y, +1, b);
        if (std::abs(m - ref) > kNoSignalTol) fail("Behavior: signaling B->A");
      }
    }
  }
}

double Behavior::at(int x, int y, int a, int b) const {
  if (x < 0 || x >= scenario_.a_inputs || y < 0 || y >= scenario_.b_inputs)
    fail("Behavior::at: input index out of range");
  if ((a != -1 && a != 1) || (b != -1 && b != 1))
    fail("Behavior::at: outcome must be -1 or +1");
  return table_[index(scenario_, x, y, a, b)];
}

void BellExpression::validate() const {
  scenario.validate();
  bool nonzero = false;
  for (const auto& [xy, c] : correlator_coeffs) {
    if (xy.first < 0 || xy.first >= scenario.a_inputs || xy.second < 0 ||
        xy.second >= scenario.b_inputs)
      fail("BellExpression: coefficient key out of range");
    if (c != 0.0) nonzero = true;
  }
  if (!nonzero) fail("BellExpression: needs at least one nonzero coefficient");
}

double correlator(const Behavior& behavior, int x, int y) {
  return behavior.at(x, y, -1, -1) - behavior.at(x, y, -1, +1) -
         behavior.at(x, y, +1, -1) + behavior.at(x, y, +1, +1);
}

double bell_value(const BellExpression& expr, const Behavior& behavior) {
  if (!(expr.scenario == behavior.scenario()))
    fail("bell_value: expression and behavior use different scenarios");
  double v = expr.constant;
  for (const auto& [xy, c] : expr.correlator_coeffs)
    if (c != 0.0) v += c * correlator(behavior, xy.first, xy.second);
  return v;
}

double local_bound(const BellExpression& expr) {
  expr.validate();
  const int na = expr.scenario.a_inputs;
  const int nb = expr.scenario.b_inputs;
  if (na + nb > 24)
    throw std::length_error("local_bound: scenario too large for enumeration");

  // Dense coefficient table for speed.
  std::vector<double> coeff(static_cast<std::size_t>(na) * nb, 0.0);
  for (const auto& [xy, c] : expr.correlator_coeffs)
    coeff[static_cast<std::size_t>(xy.first) * nb + xy.second] = c;

  double best = -std::numeric_limits<double>::infinity();
  // Enumerate Alice strategies; Bob's optimal response is per-setting.
  for (std::uint32_t mask = 0; mask < (1u << na); ++mask) {
    double total = 0.0;
    for (int y = 0; y < nb; ++y) {
      double s = 0.0;
      for (int x = 0; x < na; ++x) {
        double ax = (mask >> x) & 1u ? 1.0 : -1.0;
        s += coeff[static_cast<std::size_t>(x) * nb + y] * ax;
      }
      total += std::abs(s);
    }
    best = std::max(best, total);
  }
  return best + expr.constant;
}

namespace {

Eigen::Matrix2d xz_projector(double theta, int outcome) {
  Eigen::Matrix2d sz, sx;
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;
  double s = outcome < 0 ? -1.0 : 1.0;
  return 0.5 * (Eigen::Matrix2d::Identity() +
                s * (std::cos(theta) * sz + std::sin(theta) * sx));
}

Eigen::Matrix4d kron2(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  Eigen::Matrix4d k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

}  // namespace

Behavior werner_behavior(const std::vector<double>& alice_angles,
                         const std::vector<double>& bob_angles, double noise) {
  if (alice_angles.size() < 2 || bob_angles.size() < 2)
    fail("werner_behavior: need at least 2 angles per party");
  if (!(noise >= 0.0 && noise <= 1.0))
    fail("werner_behavior: noise must lie in [0,1]");

  Scenario scenario{static_cast<int>(alice_angles.size()),
                    static_cast<int>(bob_angles.size())};

  // |phi+> = (|00> + |11>)/sqrt(2); everything stays real in the X-Z plane.
  Eigen::Vector4d phi;
  phi << 1, 0, 0, 1;
  phi /= std::sqrt(2.0);
  Eigen::Matrix4d rho = noise * 0.25 * Eigen::Matrix4d::Identity() +
                        (1.0 - noise) * (phi * phi.transpose());

  std::vector<double> table(Behavior::table_size(scenario), 0.0);
  for (int x = 0; x < scenario.a_inputs; ++x) {
    for (int y = 0; y < scenario.b_inputs; ++y) {
      for (int a : kOutcomeValues) {
        Eigen::Matrix2d pa = xz_projector(alice_angles[x], a);
        for (int b : kOutcomeValues) {
          Eigen::Matrix2d pb = xz_projector(bob_angles[y], b);
          double p = (rho * kron2(pa, pb)).trace();
          table[Behavior::index(scenario, x, y, a, b)] = std::max(0.0, p);
        }
      }
    }
  }
  return Behavior(scenario, std::move(table));
}

AngleSolution optimize_angles(const BellExpression& expr, int starts,
                              std::uint64_t seed) {
  expr.validate();
  const int na = expr.scenario.a_inputs;
  const int nb = expr.scenario.b_inputs;
  std::vector<double> coeff(static_cast<std::size_t>(na) * nb, 0.0);
  for (const auto& [xy, c] : expr.correlator_coeffs)
    coeff[static_cast<std::size_t>(xy.first) * nb + xy.second] = c;

  auto value = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double v = expr.constant;
    for (int x = 0; x < na; ++x)
      for (int y = 0; y < nb; ++y)
        v += coeff[static_cast<std::size_t>(x) * nb + y] * std::cos(a[x] - b[y]);
    return v;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  AngleSolution best;
  best.value = -std::numeric_limits<double>::infinity();

  for (int s = 0; s < starts; ++s) {
    std::vector<double> a(na), b(nb);
    for (double& t : a) t = angle(rng);
    for (double& t : b) t = angle(rng);
    // Alternating exact updates: each party's optimal angle given the other
    // is the phase of the coefficient-weighted resultant.
    double prev = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < 500; ++it) {
      for (int y = 0; y < nb; ++y) {
        double cs = 0.0, sn = 0.0;
        for (int x = 0; x < na; ++x) {
          double c = coeff[static_cast<std::size_t>(x) * nb + y];
          cs += c * std::cos(a[x]);
          sn += c * std::sin(a[x]);
        }
        if (cs != 0.0 || sn != 0.0) b[y] = std::atan2(sn, cs);
      }
      for (int x = 0; x < na; ++x) {
        double cs = 0.0, sn = 0.0;
        for (int y = 0; y < nb; ++y) {
          double c = coeff[static_cast<std::size_t>(x) * nb + y];
          cs += c * std::cos(b[y]);
          sn += c * std::sin(b[y]);
        }
        if (cs != 0.0 || sn != 0.0) a[x] = std::atan2(sn, cs);
      }
      double v = value(a, b);
      if (v - prev < 1e-14) break;
      prev = v;
    }
    double v = value(a, b);
    if (v > best.value) best = AngleSolution{a, b, v};
  }
  return best;
}

}  // namespace dicert
