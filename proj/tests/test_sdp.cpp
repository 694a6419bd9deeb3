#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "dicert/npa.hpp"
#include "dicert/sdp.hpp"
#include "support/quantum_oracle.hpp"

using namespace dicert;
using namespace dicert::npa;
using namespace dicert::sdp;

namespace {

BellExpression chsh() {
  BellExpression e;
  e.scenario = {2, 2};
  e.correlator_coeffs[{0, 0}] = 1;
  e.correlator_coeffs[{0, 1}] = 1;
  e.correlator_coeffs[{1, 0}] = 1;
  e.correlator_coeffs[{1, 1}] = -1;
  e.name = "CHSH";
  return e;
}

LinearFunctional random_functional(const MomentProblem& p,
                                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, p.n_vars - 1);
  LinearFunctional f;
  for (int i = 0; i < 6; ++i) f.add(pick(rng), c(rng));
  f.normalize();
  if (f.terms.empty()) f.add(0, 1.0);
  return f;
}

}  // namespace

TEST_CASE("maximize CHSH at level 1 reproduces the quantum bound") {
  MomentProblem p = build({2, 2}, 1);
  Solution s = solve(p, bell_functional(p, chsh()), Direction::maximize);
  CHECK(s.status == Status::optimal);
  CHECK(s.objective_value == doctest::Approx(2.8284271).epsilon(1e-5));
  CHECK(s.certified_value == doctest::Approx(2.8284271).epsilon(1e-5));
  CHECK(s.duality_gap <= 1e-8);
}

TEST_CASE("constant functional is pinned by normalization") {
  MomentProblem p = build({2, 2}, 1);
  LinearFunctional one;
  one.add(p.identity_var, 1.0);
  one.normalize();
  Solution s = solve(p, one, Direction::maximize);
  CHECK(s.status == Status::optimal);
  CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bell value forced above the quantum bound is infeasible") {
  MomentProblem p = build({2, 2}, 2);
  LinearEquality eq;
  eq.functional = bell_functional(p, chsh());
  eq.rhs = 1.1 * 2.0 * std::sqrt(2.0);

  LinearFunctional obj = probability_functional(p, -1, -1, 0, 0);
  Solution s = solve(p, obj, Direction::maximize, {eq});
  CHECK(s.status == Status::infeasible);
}

TEST_CASE("max(-f) = -min(f)") {
  MomentProblem p = build({2, 2}, 2);
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 10; ++trial) {
    LinearFunctional f = random_functional(p, rng);
    LinearFunctional neg = f;
    for (auto& [v, c] : neg.terms) c = -c;
    neg.constant = -neg.constant;
    Solution smax = solve(p, neg, Direction::maximize);
    Solution smin = solve(p, f, Direction::minimize);
    REQUIRE((smax.status == Status::optimal ||
             smax.status == Status::near_optimal));
    REQUIRE((smin.status == Status::optimal ||
             smin.status == Status::near_optimal));
    CHECK(smax.objective_value ==
          doctest::Approx(-smin.objective_value).epsilon(1e-9));
  }
}

TEST_CASE("adding a feasible equality never increases the maximum") {
  MomentProblem p = build({2, 2}, 2);
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
  for (int trial = 0; trial < 20; ++trial) {
    LinearFunctional obj = random_functional(p, rng);
    LinearFunctional cons = random_functional(p, rng);
    // pin the constraint at a value attained by an explicit realization,
    // so the constrained problem stays feasible
    std::vector<double> a{ang(rng), ang(rng)}, b{ang(rng), ang(rng)};
    auto moments = dicert::testing::oracle_moment_vector(p, a, b, 0.3);
    LinearEquality eq;
    eq.functional = cons;
    eq.rhs = cons.evaluate(moments);

    Solution unconstrained = solve(p, obj, Direction::maximize);
    Solution constrained = solve(p, obj, Direction::maximize, {eq});
    REQUIRE((unconstrained.status == Status::optimal ||
             unconstrained.status == Status::near_optimal));
    REQUIRE((constrained.status == Status::optimal ||
             constrained.status == Status::near_optimal));
    CHECK(constrained.objective_value <=
          unconstrained.objective_value + 1e-8);
  }
}

TEST_CASE("primal witness is feasible whenever the status is optimal") {
  MomentProblem p = build({2, 3}, 2);
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    LinearFunctional obj = random_functional(p, rng);
    Solution s = solve(p, obj, Direction::maximize);
    if (s.status != Status::optimal) continue;
    Eigen::MatrixXd mm = dicert::testing::moment_matrix(p, s.moment_vector);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mm);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    for (const auto& eq : p.equalities)
      CHECK(eq.functional.evaluate(s.moment_vector) ==
            doctest::Approx(eq.rhs).epsilon(1e-7));
  }
}

TEST_CASE("bell equality at the witness value is attained by the witness") {
  // constrain CHSH to the value of a mid-noise realization and check the
  // witness point stays inside the certified interval of P(-1,-1)
  MomentProblem p = build({2, 2}, 2);
  std::vector<double> alice{0.0, M_PI / 2}, bob{M_PI / 4, -M_PI / 4};
  const double noise = 0.2;
  auto moments = dicert::testing::oracle_moment_vector(p, alice, bob, noise);

  LinearEquality eq;
  eq.functional = bell_functional(p, chsh());
  eq.rhs = eq.functional.evaluate(moments);

  LinearFunctional obj = probability_functional(p, -1, -1, 0, 0);
  Solution lo = solve(p, obj, Direction::minimize, {eq});
  Solution hi = solve(p, obj, Direction::maximize, {eq});
  REQUIRE(lo.status == Status::optimal);
  REQUIRE(hi.status == Status::optimal);
  const double witness = obj.evaluate(moments);
  CHECK(lo.certified_value - 1e-7 <= witness);
  CHECK(hi.certified_value + 1e-7 >= witness);
  CHECK(lo.certified_value <= hi.certified_value + 1e-9);
}

TEST_CASE("inequality-relation constraint relaxes the equality") {
  MomentProblem p = build({2, 2}, 2);
  const double target = 0.9 * 2.0 * std::sqrt(2.0);
  LinearFunctional bell = bell_functional(p, chsh());
  LinearFunctional obj = probability_functional(p, -1, -1, 0, 0);

  LinearEquality eq{bell, target, Relation::equal};
  LinearEquality ge{bell, target, Relation::greater_equal};
  Solution s_eq = solve(p, obj, Direction::maximize, {eq});
  Solution s_ge = solve(p, obj, Direction::maximize, {ge});
  REQUIRE(s_eq.status == Status::optimal);
  REQUIRE(s_ge.status == Status::optimal);
  // the >= feasible set contains the == one
  CHECK(s_ge.objective_value >= s_eq.objective_value - 1e-8);
  // and cannot exceed the unconstrained maximum
  Solution s_free = solve(p, obj, Direction::maximize);
  CHECK(s_ge.objective_value <= s_free.objective_value + 1e-8);
}

TEST_CASE("objective referencing unknown variables is rejected") {
  MomentProblem p = build({2, 2}, 1);
  LinearFunctional bad;
  bad.add(10000, 1.0);
  CHECK_THROWS_AS(solve(p, bad, Direction::maximize), std::invalid_argument);
}

TEST_CASE("solver is deterministic") {
  MomentProblem p = build({2, 2}, 2);
  LinearFunctional obj = bell_functional(p, chsh());
  Solution a = solve(p, obj, Direction::maximize);
  Solution b = solve(p, obj, Direction::maximize);
  CHECK(a.objective_value == b.objective_value);
  CHECK(a.certified_value == b.certified_value);
  CHECK(a.iterations == b.iterations);
}
