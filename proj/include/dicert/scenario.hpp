#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dicert {

/// Bipartite Bell scenario: two parties with a fixed number of binary
/// (+1/-1 outcome) measurement settings each. Inputs are 0-based internally.
struct Scenario {
  int a_inputs = 2;
  int b_inputs = 2;

  void validate() const;
  bool operator==(const Scenario&) const = default;
};

// Outcomes are labelled -1 and +1. Joint outcomes are ordered
// (-1,-1), (-1,+1), (+1,-1), (+1,+1) everywhere.
inline int outcome_index(int a) { return a < 0 ? 0 : 1; }
inline int joint_outcome_index(int a, int b) {
  return outcome_index(a) * 2 + outcome_index(b);
}
inline constexpr int kOutcomeValues[2] = {-1, +1};

/// Conditional probability table P(a,b|x,y), stored dense over (x,y,a,b).
/// Construction checks range, normalization and no-signaling.
class Behavior {
 public:
  Behavior(Scenario scenario, std::vector<double> table);

  double at(int x, int y, int a, int b) const;
  const Scenario& scenario() const { return scenario_; }
  const std::vector<double>& table() const { return table_; }

  static std::size_t table_size(const Scenario& s) {
    return static_cast<std::size_t>(s.a_inputs) * s.b_inputs * 4;
  }
  static std::size_t index(const Scenario& s, int x, int y, int a, int b) {
    return (static_cast<std::size_t>(x) * s.b_inputs + y) * 4 +
           joint_outcome_index(a, b);
  }

 private:
  Scenario scenario_;
  std::vector<double> table_;
};

/// Linear combination of correlators C(x,y) plus a constant offset.
/// Keys use internal 0-based input indices.
struct BellExpression {
  Scenario scenario;
  std::map<std::pair<int, int>, double> correlator_coeffs;
  double constant = 0.0;
  std::string name;

  // Checks key ranges and requires at least one nonzero coefficient.
  void validate() const;
};

/// C(x,y) = P(-1,-1|x,y) - P(-1,+1|x,y) - P(+1,-1|x,y) + P(+1,+1|x,y).
double correlator(const Behavior& behavior, int x, int y);

/// constant + sum_xy coeff(x,y) * correlator(behavior,x,y).
double bell_value(const BellExpression& expr, const Behavior& behavior);

/// Maximum of the expression over all deterministic local strategies.
/// Exact enumeration; throws std::length_error if a_inputs + b_inputs > 24.
double local_bound(const BellExpression& expr);

/// Behavior of X-Z-plane projective measurements (observable
/// cos(theta)*sigma_z + sin(theta)*sigma_x per setting) on the Werner state
/// rho = noise * I/4 + (1-noise) |phi+><phi+|. Angle vectors must match the
/// scenario input counts; noise must lie in [0,1].
Behavior werner_behavior(const std::vector<double>& alice_angles,
                         const std::vector<double>& bob_angles, double noise);

struct AngleSolution {
  std::vector<double> alice;
  std::vector<double> bob;
  double value = 0.0;
};

/// Measurement angles maximizing the expression over X-Z-plane qubit
/// strategies on the noiseless maximally entangled state (correlators
/// cos(alpha_x - beta_y)). Multi-start alternating maximization.
AngleSolution optimize_angles(const BellExpression& expr, int starts = 32,
                              std::uint64_t seed = 12345);

}  // namespace dicert
