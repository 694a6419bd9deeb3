#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>
#include <sstream>

#include "dicert/npa.hpp"
#include "support/quantum_oracle.hpp"
#include "support/rewrite_oracle.hpp"

using namespace dicert;
using namespace dicert::npa;

namespace {

Letter A(int i) { return {0, static_cast<std::uint8_t>(i)}; }
Letter B(int i) { return {1, static_cast<std::uint8_t>(i)}; }

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

Word random_word(std::mt19937_64& rng, int max_len, int na, int nb) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> party(0, 1);
  Word w;
  int n = len(rng);
  for (int i = 0; i < n; ++i) {
    int pp = party(rng);
    int in = std::uniform_int_distribution<int>(0, pp == 0 ? na - 1 : nb - 1)(rng);
    w.push_back({static_cast<std::uint8_t>(pp), static_cast<std::uint8_t>(in)});
  }
  return w;
}

}  // namespace

TEST_CASE("canonicalize basics") {
  CHECK(canonicalize({A(0), A(0)}) == Word{A(0)});
  CHECK(canonicalize({B(1), A(0)}) == Word{A(0), B(1)});
  CHECK(canonicalize({A(0), B(1), A(0)}) == Word{A(0), B(1)});
  CHECK(canonicalize({}) == Word{});
  // canonicalization is idempotent and never grows the word
  Word w{A(1), B(0), A(1), A(1), B(0), B(0)};
  Word c = canonicalize(w);
  CHECK(c.size() <= w.size());
  CHECK(canonicalize(c) == c);
}

TEST_CASE("canonicalize agrees with the exhaustive rewrite oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    Word w = random_word(rng, 6, 3, 3);
    auto forms = dicert::testing::normal_forms(w);
    REQUIRE(forms.size() == 1);  // confluence
    CHECK(canonicalize(w) == forms[0]);
  }
}

TEST_CASE("build: monomial counts") {
  MomentProblem p1 = build({2, 2}, 1);
  CHECK(p1.psd_dim == 5);  // identity + 4 projectors

  MomentProblem p2 = build({2, 2}, 2);
  CHECK(p2.psd_dim == 13);

  // intermediate level: level 1 plus the AB products only
  std::vector<Word> ab;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) ab.push_back({A(x), B(y)});
  MomentProblem p1ab = build({2, 2}, 1, ab);
  CHECK(p1ab.psd_dim == 9);

  CHECK_THROWS_AS(build({2, 2}, 0), std::invalid_argument);
}

TEST_CASE("build matches exhaustive word enumeration") {
  // oracle: generate every word over the alphabet up to the level length,
  // reduce with the rewrite oracle, and count distinct canonical forms
  for (auto [na, nb, level] : {std::tuple{2, 2, 2}, {3, 2, 2}, {4, 3, 2}}) {
    std::set<Word> canon;
    std::vector<Word> all{{}};
    for (int len = 1; len <= level; ++len) {
      std::vector<Word> next;
      for (const Word& w : all) {
        if (static_cast<int>(w.size()) != len - 1) continue;
        for (int x = 0; x < na; ++x) {
          Word e = w;
          e.push_back(A(x));
          next.push_back(e);
        }
        for (int y = 0; y < nb; ++y) {
          Word e = w;
          e.push_back(B(y));
          next.push_back(e);
        }
      }
      all.insert(all.end(), next.begin(), next.end());
    }
    for (const Word& w : all) {
      auto forms = dicert::testing::normal_forms(w);
      REQUIRE(forms.size() == 1);
      if (static_cast<int>(forms[0].size()) <= level) canon.insert(forms[0]);
    }
    MomentProblem p = build({na, nb}, level);
    CHECK(static_cast<std::size_t>(p.psd_dim) == canon.size());
  }

  // stability anchor for the largest standard scenario
  CHECK(build({4, 3}, 2).psd_dim == 38);
}

TEST_CASE("moment index is symmetric and identified with adjoints") {
  MomentProblem p = build({2, 2}, 2);
  for (int i = 0; i < p.psd_dim; ++i)
    for (int j = 0; j < p.psd_dim; ++j) CHECK(p.entry(i, j) == p.entry(j, i));
  // <A0 A1> and <A1 A0> are the same real moment
  CHECK(p.var_of({A(0), A(1)}) == p.var_of({A(1), A(0)}));
  CHECK(p.entry(0, 0) == p.identity_var);
  REQUIRE(p.equalities.size() == 1);
  CHECK(p.equalities[0].rhs == 1.0);
}

TEST_CASE("probability functionals") {
  MomentProblem p = build({2, 2}, 2);
  int x = 0, y = 1;
  auto fpp = probability_functional(p, +1, +1, x, y);
  CHECK(fpp.constant == 0.0);
  REQUIRE(fpp.terms.size() == 1);
  CHECK(fpp.terms[0].first == p.var_of({A(x), B(y)}));

  auto fpm = probability_functional(p, +1, -1, x, y);
  CHECK(fpm.constant == 0.0);
  CHECK(fpm.terms.size() == 2);

  // the four functionals at fixed (x,y) sum to the constant 1
  double csum = 0.0;
  std::map<int, double> tsum;
  for (int a : {-1, +1})
    for (int b : {-1, +1}) {
      auto f = probability_functional(p, a, b, x, y);
      csum += f.constant;
      for (auto [v, c] : f.terms) tsum[v] += c;
    }
  CHECK(csum == doctest::Approx(1.0));
  for (auto [v, c] : tsum) CHECK(c == doctest::Approx(0.0));

  CHECK_THROWS_AS(probability_functional(p, +1, +1, 5, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(probability_functional(p, 0, +1, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("bell functional evaluates correctly on quantum moment vectors") {
  MomentProblem p = build({2, 2}, 1);
  auto f = bell_functional(p, chsh());
  std::vector<double> alice{0.0, M_PI / 2}, bob{M_PI / 4, -M_PI / 4};
  auto moments = dicert::testing::oracle_moment_vector(p, alice, bob, 0.0);
  CHECK(f.evaluate(moments) == doctest::Approx(2.8284271).epsilon(1e-6));

  // zero expression -> zero functional; constant-only -> constant
  BellExpression zero;
  zero.scenario = {2, 2};
  zero.correlator_coeffs[{0, 0}] = 0.0;
  auto fz = bell_functional(p, zero);
  CHECK(fz.terms.empty());
  CHECK(fz.constant == 0.0);

  BellExpression conly = zero;
  conly.constant = 2.5;
  auto fc = bell_functional(p, conly);
  CHECK(fc.terms.empty());
  CHECK(fc.constant == 2.5);

  BellExpression wrong = chsh();
  wrong.scenario = {3, 2};
  CHECK_THROWS_AS(bell_functional(p, wrong), std::invalid_argument);
}

TEST_CASE("soundness: realization moment vectors are feasible") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
  std::uniform_real_distribution<double> noise(0.0, 1.0);
  for (auto [na, nb] : {std::pair{2, 2}, {2, 3}, {4, 3}}) {
    MomentProblem p = build({na, nb}, 2);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> a(na), b(nb);
      for (double& t : a) t = ang(rng);
      for (double& t : b) t = ang(rng);
      double pn = noise(rng);
      auto m = dicert::testing::oracle_moment_vector(p, a, b, pn);

      Eigen::MatrixXd mm = dicert::testing::moment_matrix(p, m);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mm);
      CHECK(es.eigenvalues().minCoeff() >= -1e-9);
      for (const auto& eq : p.equalities)
        CHECK(eq.functional.evaluate(m) == doctest::Approx(eq.rhs).epsilon(1e-10));

      // probability functionals reproduce the explicit behavior
      Behavior w = werner_behavior(a, b, pn);
      for (int x = 0; x < na; ++x)
        for (int y = 0; y < nb; ++y)
          for (int oa : {-1, 1})
            for (int ob : {-1, 1}) {
              auto f = probability_functional(p, oa, ob, x, y);
              CHECK(f.evaluate(m) ==
                    doctest::Approx(w.at(x, y, oa, ob)).epsilon(1e-10));
            }
    }
  }
}

TEST_CASE("debug dump is parseable and complete") {
  MomentProblem p = build({2, 2}, 1);
  std::ostringstream os;
  dump(p, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header.find("psd_dim 5") != std::string::npos);
  int lines = 0;
  for (std::string line; std::getline(is, line);) ++lines;
  CHECK(lines == 5 * 6 / 2 + 1);  // upper triangle + one equality
}
