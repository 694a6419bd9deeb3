// Test-only oracle: exhaustive rewriting closure for projector words.
// Applies every applicable single rewrite (cross-party swap, idempotent
// merge) breadth-first and collects the irreducible forms reached.
#pragma once

#include <set>
#include <vector>

#include "dicert/npa.hpp"

namespace dicert::testing {

inline std::set<npa::Word> rewrite_closure(const npa::Word& start) {
  std::set<npa::Word> seen{start};
  std::vector<npa::Word> frontier{start};
  while (!frontier.empty()) {
    std::vector<npa::Word> next;
    for (const npa::Word& w : frontier) {
      for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        if (w[i] == w[i + 1]) {  // idempotent merge
          npa::Word r = w;
          r.erase(r.begin() + i);
          if (seen.insert(r).second) next.push_back(r);
        } else if (w[i].party != w[i + 1].party) {  // cross-party swap
          npa::Word r = w;
          std::swap(r[i], r[i + 1]);
          if (seen.insert(r).second) next.push_back(r);
        }
      }
    }
    frontier = std::move(next);
  }
  return seen;
}

/// All irreducible (no merge applies, Alice block first) forms in the
/// closure. Confluence means exactly one.
inline std::vector<npa::Word> normal_forms(const npa::Word& start) {
  std::vector<npa::Word> out;
  for (const npa::Word& w : rewrite_closure(start)) {
    bool reduced = true;
    for (std::size_t i = 0; i + 1 < w.size() && reduced; ++i) {
      if (w[i] == w[i + 1]) reduced = false;
      if (w[i].party > w[i + 1].party) reduced = false;  // Bob before Alice
    }
    if (reduced) out.push_back(w);
  }
  return out;
}

}  // namespace dicert::testing
