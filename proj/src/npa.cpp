#include "dicert/npa.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace dicert::npa {

namespace {

// Run-compress a single-party block: merge adjacent equal projectors.
void append_compressed(Word& out, const Word& in, std::uint8_t party) {
  for (const Letter& l : in) {
    if (l.party != party) continue;
    if (!out.empty() && out.back() == l) continue;
    out.push_back(l);
  }
}

bool word_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

Word canonicalize(const Word& word) {
  Word out;
  out.reserve(word.size());
  append_compressed(out, word, 0);
  append_compressed(out, word, 1);
  return out;
}

Word word_adjoint(const Word& word) {
  Word rev(word.rbegin(), word.rend());
  return canonicalize(rev);
}

Word moment_representative(const Word& word) {
  Word c = canonicalize(word);
  Word a = word_adjoint(c);
  return word_less(a, c) ? a : c;
}

void LinearFunctional::add(int var, double coeff) {
  terms.emplace_back(var, coeff);
}

void LinearFunctional::normalize() {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> merged;
  for (const auto& [v, c] : terms) {
    if (!merged.empty() && merged.back().first == v)
      merged.back().second += c;
    else
      merged.emplace_back(v, c);
  }
  std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
  terms = std::move(merged);
}

double LinearFunctional::evaluate(const std::vector<double>& moments) const {
  double v = constant;
  for (const auto& [var, coeff] : terms) v += coeff * moments.at(var);
  return v;
}

int MomentProblem::var_of(const Word& word) const {
  auto it = word_index.find(moment_representative(word));
  return it == word_index.end() ? -1 : it->second;
}

namespace {

// All run-free words over one party's alphabet, of length exactly len.
void party_words(std::uint8_t party, int inputs, int len, Word& scratch,
                 std::vector<Word>& out) {
  if (len == 0) {
    out.push_back(scratch);
    return;
  }
  for (std::uint8_t i = 0; i < inputs; ++i) {
    Letter l{party, i};
    if (!scratch.empty() && scratch.back() == l) continue;
    scratch.push_back(l);
    party_words(party, inputs, len - 1, scratch, out);
    scratch.pop_back();
  }
}

std::vector<Word> party_words_up_to(std::uint8_t party, int inputs,
                                    int max_len) {
  std::vector<Word> out;
  Word scratch;
  for (int len = 0; len <= max_len; ++len)
    party_words(party, inputs, len, scratch, out);
  return out;
}

}  // namespace

MomentProblem build(const Scenario& scenario, int level,
                    const std::vector<Word>& extra_monomials) {
  scenario.validate();
  if (level < 1) throw std::invalid_argument("npa::build: level must be >= 1");

  MomentProblem p;
  p.scenario = scenario;
  p.level = level;

  // Canonical words of length <= level: an Alice block times a Bob block.
  std::vector<Word> alice = party_words_up_to(0, scenario.a_inputs, level);
  std::vector<Word> bob = party_words_up_to(1, scenario.b_inputs, level);
  for (const Word& a : alice) {
    for (const Word& b : bob) {
      if (static_cast<int>(a.size() + b.size()) > level) continue;
      Word w = a;
      w.insert(w.end(), b.begin(), b.end());
      p.monomials.push_back(std::move(w));
    }
  }
  for (const Word& extra : extra_monomials) {
    Word c = canonicalize(extra);
    for (const Letter& l : c) {
      int inputs = l.party == 0 ? scenario.a_inputs : scenario.b_inputs;
      if (l.input >= inputs)
        throw std::invalid_argument("npa::build: extra monomial out of range");
    }
    p.monomials.push_back(std::move(c));
  }
  std::sort(p.monomials.begin(), p.monomials.end(), word_less);
  p.monomials.erase(std::unique(p.monomials.begin(), p.monomials.end()),
                    p.monomials.end());

  const int d = static_cast<int>(p.monomials.size());
  p.psd_dim = d;
  p.entry_var.assign(static_cast<std::size_t>(d) * d, -1);

  // Assign moment variables row-major over the upper triangle so that a
  // variable's representative entry is its first appearance.
  for (int i = 0; i < d; ++i) {
    Word left = word_adjoint(p.monomials[i]);
    for (int j = i; j < d; ++j) {
      Word prod = left;
      prod.insert(prod.end(), p.monomials[j].begin(), p.monomials[j].end());
      Word rep = moment_representative(prod);
      auto [it, inserted] =
          p.word_index.try_emplace(std::move(rep), p.n_vars);
      if (inserted) {
        p.var_word.push_back(it->first);
        ++p.n_vars;
      }
      p.entry_var[i * d + j] = it->second;
      p.entry_var[j * d + i] = it->second;
    }
  }

  p.identity_var = p.entry(0, 0);

  LinearEquality norm;
  norm.functional.add(p.identity_var, 1.0);
  norm.functional.normalize();
  norm.rhs = 1.0;
  p.equalities.push_back(std::move(norm));
  return p;
}

namespace {

int require_var(const MomentProblem& p, const Word& w, const char* what) {
  int v = p.var_of(w);
  if (v < 0)
    throw std::invalid_argument(std::string("npa: missing moment for ") + what);
  return v;
}

}  // namespace

LinearFunctional probability_functional(const MomentProblem& problem, int a,
                                        int b, int x, int y) {
  const Scenario& s = problem.scenario;
  if (x < 0 || x >= s.a_inputs || y < 0 || y >= s.b_inputs)
    throw std::invalid_argument("probability_functional: input out of range");
  if ((a != -1 && a != 1) || (b != -1 && b != 1))
    throw std::invalid_argument("probability_functional: outcome must be +-1");

  Letter ax{0, static_cast<std::uint8_t>(x)};
  Letter by{1, static_cast<std::uint8_t>(y)};
  int va = require_var(problem, {ax}, "Alice projector");
  int vb = require_var(problem, {by}, "Bob projector");
  int vab = require_var(problem, {ax, by}, "projector product");

  // P(+,+) = <AB>; complements handle the "-" outcomes.
  LinearFunctional f;
  if (a > 0 && b > 0) {
    f.add(vab, 1.0);
  } else if (a > 0 && b < 0) {
    f.add(va, 1.0);
    f.add(vab, -1.0);
  } else if (a < 0 && b > 0) {
    f.add(vb, 1.0);
    f.add(vab, -1.0);
  } else {
    f.constant = 1.0;
    f.add(va, -1.0);
    f.add(vb, -1.0);
    f.add(vab, 1.0);
  }
  f.normalize();
  return f;
}

LinearFunctional correlator_functional(const MomentProblem& problem, int x,
                                       int y) {
  const Scenario& s = problem.scenario;
  if (x < 0 || x >= s.a_inputs || y < 0 || y >= s.b_inputs)
    throw std::invalid_argument("correlator_functional: input out of range");
  Letter ax{0, static_cast<std::uint8_t>(x)};
  Letter by{1, static_cast<std::uint8_t>(y)};
  LinearFunctional f;
  f.constant = 1.0;
  f.add(require_var(problem, {ax, by}, "projector product"), 4.0);
  f.add(require_var(problem, {ax}, "Alice projector"), -2.0);
  f.add(require_var(problem, {by}, "Bob projector"), -2.0);
  f.normalize();
  return f;
}

LinearFunctional bell_functional(const MomentProblem& problem,
                                 const BellExpression& expr) {
  if (!(expr.scenario == problem.scenario))
    throw std::invalid_argument(
        "bell_functional: expression scenario does not match problem");
  LinearFunctional f;
  f.constant = expr.constant;
  for (const auto& [xy, c] : expr.correlator_coeffs) {
    if (c == 0.0) continue;
    LinearFunctional corr =
        correlator_functional(problem, xy.first, xy.second);
    f.constant += c * corr.constant;
    for (const auto& [v, w] : corr.terms) f.add(v, c * w);
  }
  f.normalize();
  return f;
}

void dump(const MomentProblem& problem, std::ostream& os) {
  os << "psd_dim " << problem.psd_dim << " vars " << problem.n_vars << "\n";
  for (int i = 0; i < problem.psd_dim; ++i)
    for (int j = i; j < problem.psd_dim; ++j)
      os << i << " " << j << " " << problem.entry(i, j) << "\n";
  for (const auto& eq : problem.equalities) {
    os << "eq";
    for (const auto& [v, c] : eq.functional.terms) os << " " << v << ":" << c;
    if (eq.functional.constant != 0.0) os << " const:" << eq.functional.constant;
    os << (eq.relation == Relation::equal ? " = " : " >= ") << eq.rhs << "\n";
  }
}

}  // namespace dicert::npa
