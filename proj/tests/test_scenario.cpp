#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dicert/scenario.hpp"

using namespace dicert;

namespace {

const double kRoot2 = std::sqrt(2.0);

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

BellExpression bc3() {
  BellExpression e;
  e.scenario = {3, 3};
  e.correlator_coeffs[{0, 0}] = 1;
  e.correlator_coeffs[{0, 1}] = 1;
  e.correlator_coeffs[{1, 1}] = 1;
  e.correlator_coeffs[{1, 2}] = 1;
  e.correlator_coeffs[{2, 2}] = 1;
  e.correlator_coeffs[{2, 0}] = -1;
  e.name = "BC3";
  return e;
}

Behavior uniform_behavior(Scenario s) {
  return Behavior(s, std::vector<double>(Behavior::table_size(s), 0.25));
}

// Same joint distribution in every (x,y) cell; trivially no-signaling.
Behavior cellwise(Scenario s, std::array<double, 4> cell) {
  std::vector<double> t(Behavior::table_size(s));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = cell[i % 4];
  return Behavior(s, t);
}

const std::vector<double> kChshAlice{0.0, M_PI / 2};
const std::vector<double> kChshBob{M_PI / 4, -M_PI / 4};

}  // namespace

TEST_CASE("behavior validation") {
  CHECK_NOTHROW(uniform_behavior({2, 2}));
  CHECK_THROWS_AS(Behavior({2, 2}, std::vector<double>(15, 0.25)),
                  std::invalid_argument);
  // bad normalization
  std::vector<double> t(16, 0.3);
  CHECK_THROWS_AS(Behavior({2, 2}, t), std::invalid_argument);
  // signaling: Alice's marginal depends on y
  std::vector<double> sig(16, 0.25);
  sig[Behavior::index({2, 2}, 0, 0, -1, -1)] = 0.5;
  sig[Behavior::index({2, 2}, 0, 0, +1, +1)] = 0.0;
  CHECK_THROWS_AS(Behavior({2, 2}, sig), std::invalid_argument);
  Scenario too_small{1, 2};
  CHECK_THROWS_AS(too_small.validate(), std::invalid_argument);
}

TEST_CASE("correlator on reference behaviors") {
  Behavior u = uniform_behavior({2, 2});
  CHECK(correlator(u, 0, 0) == doctest::Approx(0.0).epsilon(1e-12));

  Behavior det = cellwise({2, 2}, {1.0, 0.0, 0.0, 0.0});
  CHECK(correlator(det, 1, 0) == doctest::Approx(1.0));

  Behavior q = cellwise({2, 2}, {0.4267767, 0.0732233, 0.0732233, 0.4267767});
  CHECK(correlator(q, 0, 1) == doctest::Approx(0.7071068).epsilon(1e-7));
  CHECK(correlator(q, 0, 1) ==
        doctest::Approx(std::cos(M_PI / 4)).epsilon(1e-7));

  CHECK_THROWS_AS(correlator(u, 2, 0), std::invalid_argument);
}

TEST_CASE("bell_value") {
  BellExpression e = chsh();
  CHECK(bell_value(e, uniform_behavior({2, 2})) ==
        doctest::Approx(0.0).epsilon(1e-12));

  Behavior ideal = werner_behavior(kChshAlice, kChshBob, 0.0);
  CHECK(bell_value(e, ideal) == doctest::Approx(2.8284271).epsilon(1e-6));

  // deterministic a = b = +1 everywhere
  Behavior det = cellwise({2, 2}, {0.0, 0.0, 0.0, 1.0});
  CHECK(bell_value(e, det) == doctest::Approx(2.0));

  Behavior mismatched = uniform_behavior({2, 3});
  CHECK_THROWS_AS(bell_value(e, mismatched), std::invalid_argument);
}

TEST_CASE("bell_value is linear in the behavior") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
  BellExpression e = chsh();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a1{ang(rng), ang(rng)}, b1{ang(rng), ang(rng)};
    std::vector<double> a2{ang(rng), ang(rng)}, b2{ang(rng), ang(rng)};
    Behavior p1 = werner_behavior(a1, b1, 0.2);
    Behavior p2 = werner_behavior(a2, b2, 0.6);
    double lam = std::uniform_real_distribution<double>(0, 1)(rng);
    std::vector<double> mixed(p1.table().size());
    for (std::size_t i = 0; i < mixed.size(); ++i)
      mixed[i] = lam * p1.table()[i] + (1 - lam) * p2.table()[i];
    Behavior pm({2, 2}, mixed);
    CHECK(bell_value(e, pm) ==
          doctest::Approx(lam * bell_value(e, p1) +
                          (1 - lam) * bell_value(e, p2))
              .epsilon(1e-12));
  }
}

TEST_CASE("local_bound") {
  CHECK(local_bound(chsh()) == doctest::Approx(2.0));
  CHECK(local_bound(bc3()) == doctest::Approx(4.0));

  BellExpression single;
  single.scenario = {2, 2};
  single.correlator_coeffs[{1, 1}] = 1;
  CHECK(local_bound(single) == doctest::Approx(1.0));

  BellExpression big;
  big.scenario = {13, 12};
  big.correlator_coeffs[{0, 0}] = 1;
  CHECK_THROWS_AS(local_bound(big), std::length_error);
}

TEST_CASE("local_bound agrees with full two-sided enumeration") {
  // independent oracle: enumerate both parties' strategies explicitly
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    BellExpression e;
    e.scenario = {3, 3};
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y) e.correlator_coeffs[{x, y}] = coeff(rng);
    double best = -1e300;
    for (int ma = 0; ma < 8; ++ma)
      for (int mb = 0; mb < 8; ++mb) {
        double v = 0;
        for (int x = 0; x < 3; ++x)
          for (int y = 0; y < 3; ++y)
            v += e.correlator_coeffs[{x, y}] * ((ma >> x) & 1 ? 1 : -1) *
                 ((mb >> y) & 1 ? 1 : -1);
        best = std::max(best, v);
      }
    CHECK(local_bound(e) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("werner_behavior") {
  Behavior mixed = werner_behavior(kChshAlice, kChshBob, 1.0);
  for (double v : mixed.table()) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

  Behavior half = werner_behavior(kChshAlice, kChshBob, 0.5);
  CHECK(bell_value(chsh(), half) == doctest::Approx(1.4142136).epsilon(1e-6));

  CHECK_THROWS_AS(werner_behavior(kChshAlice, kChshBob, 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(werner_behavior(kChshAlice, kChshBob, -0.1),
                  std::invalid_argument);

  // closed form: P = (1 + a*b*(1-p)cos(ax - by))/4
  Behavior w = werner_behavior({0.3, 1.1, 2.0}, {0.7, -0.4}, 0.35);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 2; ++y)
      CHECK(correlator(w, x, y) ==
            doctest::Approx(0.65 * std::cos(std::vector<double>{0.3, 1.1, 2.0}[x] -
                                            std::vector<double>{0.7, -0.4}[y]))
                .epsilon(1e-12));
}

TEST_CASE("werner behaviors satisfy all invariants across angles and noise") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
  std::uniform_int_distribution<int> nsettings(2, 4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(nsettings(rng)), b(nsettings(rng));
    for (double& t : a) t = ang(rng);
    for (double& t : b) t = ang(rng);
    for (double p : {0.0, 0.3, 0.7, 1.0}) {
      // constructor re-checks normalization and no-signaling
      Behavior w = werner_behavior(a, b, p);
      for (std::size_t x = 0; x < a.size(); ++x)
        for (std::size_t y = 0; y < b.size(); ++y) {
          double c = correlator(w, static_cast<int>(x), static_cast<int>(y));
          CHECK(c >= -1.0 - 1e-12);
          CHECK(c <= 1.0 + 1e-12);
        }
    }
  }
}

TEST_CASE("optimize_angles reaches known quantum optima") {
  AngleSolution s = optimize_angles(chsh());
  CHECK(s.value == doctest::Approx(2.0 * kRoot2).epsilon(1e-10));

  AngleSolution s3 = optimize_angles(bc3());
  CHECK(s3.value == doctest::Approx(6.0 * std::cos(M_PI / 6)).epsilon(1e-10));

  // the reported angles actually realize the value
  Behavior w = werner_behavior(s.alice, s.bob, 0.0);
  CHECK(bell_value(chsh(), w) == doctest::Approx(s.value).epsilon(1e-9));
}
