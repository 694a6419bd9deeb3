#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "dicert/scenario.hpp"

namespace dicert::npa {

/// One projector letter: the "+1"-outcome projector of a party's setting.
/// "-1" outcomes are handled as complements, halving the alphabet.
struct Letter {
  std::uint8_t party;  // 0 = Alice, 1 = Bob
  std::uint8_t input;
  auto operator<=>(const Letter&) const = default;
};

using Word = std::vector<Letter>;  // empty word = identity

/// Canonical form: Alice letters before Bob letters (parties commute),
/// adjacent equal letters merged (projector idempotence). Relative order
/// within a party is preserved. Length never increases; idempotent.
Word canonicalize(const Word& word);

/// Adjoint of a word (letters are self-adjoint, so plain reversal),
/// returned in canonical form.
Word word_adjoint(const Word& word);

/// Moment-class representative: canonical form of the word, identified with
/// its adjoint (real symmetric formulation), smaller of the two by
/// (length, lexicographic) order.
Word moment_representative(const Word& word);

/// Affine expression over moment variables: constant + sum coeff * y[var].
struct LinearFunctional {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;  // sorted by var id, merged

  void add(int var, double coeff);
  void normalize();  // sort, merge, drop zeros
  double evaluate(const std::vector<double>& moments) const;
};

enum class Relation { equal, greater_equal };

struct LinearEquality {
  LinearFunctional functional;
  double rhs = 0.0;
  Relation relation = Relation::equal;
};

/// One NPA relaxation level: ordered monomial basis, the moment-variable
/// index of every product m_i^dagger * m_j, and the structural equalities
/// (normalization <1> = 1).
struct MomentProblem {
  Scenario scenario;
  int level = 1;
  std::vector<Word> monomials;  // index 0 is the identity
  int psd_dim = 0;
  int n_vars = 0;
  std::vector<int> entry_var;   // psd_dim * psd_dim, symmetric
  std::vector<Word> var_word;   // representative word per variable
  int identity_var = 0;
  std::vector<LinearEquality> equalities;

  int entry(int i, int j) const { return entry_var[i * psd_dim + j]; }
  /// Moment variable of an arbitrary word; -1 if outside the index.
  int var_of(const Word& word) const;

  std::map<Word, int> word_index;  // representative word -> variable id
};

/// Builds the relaxation from all canonical words of length <= level,
/// plus any explicitly requested extra monomials (intermediate levels).
MomentProblem build(const Scenario& scenario, int level,
                    const std::vector<Word>& extra_monomials = {});

/// Affine expression equal to P(a,b|x,y) on any quantum realization.
LinearFunctional probability_functional(const MomentProblem& problem, int a,
                                        int b, int x, int y);

/// Affine expression equal to C(x,y): 4<AxBy> - 2<Ax> - 2<By> + 1.
LinearFunctional correlator_functional(const MomentProblem& problem, int x,
                                       int y);

/// Affine expression equal to the Bell expression's value.
LinearFunctional bell_functional(const MomentProblem& problem,
                                 const BellExpression& expr);

/// Sparse text dump for cross-validation: one "row col var" line per
/// upper-triangle entry, then the equalities.
void dump(const MomentProblem& problem, std::ostream& os);

}  // namespace dicert::npa
