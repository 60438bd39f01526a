#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "hoi/hoi.hpp"

// Shared fixtures plus brute-force oracles kept independent of the library
// paths they check: the oracle walks the flat table with its own symbol
// arithmetic and accumulates marginals in a map keyed by symbol tuples.

namespace testsup {

inline std::vector<hoi::JointDistribution> random_corpus(std::size_t count, bool with_target,
                                                         std::uint64_t seed0 = 1000) {
  std::vector<hoi::JointDistribution> dists;
  dists.reserve(count);
  auto shapes = hoi::corpus_shapes(count, with_target);
  for (std::size_t i = 0; i < count; ++i)
    dists.push_back(hoi::gen_random(shapes[i], seed0 + i));
  return dists;
}

namespace oracle {

// Decodes state s into symbols, last variable fastest, by repeated div/mod.
inline std::vector<int> decode(std::size_t s, const std::vector<std::size_t>& cards) {
  std::vector<int> sym(cards.size());
  for (std::size_t i = cards.size(); i-- > 0;) {
    sym[i] = static_cast<int>(s % cards[i]);
    s /= cards[i];
  }
  return sym;
}

inline double subset_entropy_bits(const std::vector<double>& probs,
                                  const std::vector<std::size_t>& cards,
                                  const std::vector<std::size_t>& subset) {
  std::map<std::vector<int>, double> marginal;
  for (std::size_t s = 0; s < probs.size(); ++s) {
    std::vector<int> sym = decode(s, cards);
    std::vector<int> key;
    for (std::size_t j : subset) key.push_back(sym[j]);
    marginal[key] += probs[s];
  }
  double h = 0.0;
  for (const auto& [key, p] : marginal)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

}  // namespace oracle

inline std::vector<double> table_of(const hoi::JointDistribution& d) {
  return {d.probs().begin(), d.probs().end()};
}

inline std::vector<std::size_t> cards_of(const hoi::SystemShape& shape) {
  std::vector<std::size_t> cards;
  for (const auto& v : shape.vars()) cards.push_back(v.cardinality);
  return cards;
}

}  // namespace testsup
