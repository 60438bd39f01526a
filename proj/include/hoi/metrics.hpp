#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hoi/distribution.hpp"

// Multivariate interdependence metrics over discrete joint distributions:
// total correlation, dual total correlation, interaction information,
// O-information and the redundancy-synergy index, together with their
// conditional versions and the identity-based re-derivations used for
// cross-checking. Everything is computed through the single subset_entropy
// kernel so that residuals between two routes isolate formula errors rather
// than kernel discrepancies.

namespace hoi {

namespace detail {

inline void check_disjoint(const VariableSubset& a, const VariableSubset& b, const char* what) {
  if (!a.disjoint_from(b)) fail(Errc::overlapping_blocks, what);
}

// Positions in the frame that remains after removing `given`.
inline std::size_t remap_index(std::size_t idx, const VariableSubset& given) {
  std::size_t shift = 0;
  for (std::size_t g : given.indices())
    if (g < idx) ++shift;
  return idx - shift;
}

inline VariableSubset remap_subset(const VariableSubset& subset, const VariableSubset& given) {
  std::vector<std::size_t> out;
  out.reserve(subset.size());
  for (std::size_t i : subset.indices()) out.push_back(remap_index(i, given));
  return VariableSubset(std::move(out));
}

// Average of fn over the conditional distributions given each joint value of
// `given`, weighted by the value's probability. Zero-probability events are
// skipped. fn receives distributions whose variable indices live in the
// reduced frame; remap arguments with remap_subset before capturing them.
template <class Fn>
double average_over_conditionals(const JointDistribution& dist, const VariableSubset& given,
                                 Fn&& fn) {
  if (given.empty()) return fn(dist);
  const SystemShape& shape = dist.shape();
  shape.check_subset(given);
  std::vector<int> values(given.size(), 0);
  double acc = 0.0;
  for (;;) {
    if (auto c = condition(dist, given, values)) acc += c->weight * fn(c->dist);
    std::size_t j = given.size();
    while (j-- > 0) {
      std::size_t card = shape.var(given.indices()[j]).cardinality;
      if (static_cast<std::size_t>(++values[j]) < card) break;
      values[j] = 0;
      if (j == 0) return acc;
    }
  }
}

}  // namespace detail

// --------------------------------------------------------------------------
// Mutual information on blocks of variables
// --------------------------------------------------------------------------

// I(A;B) = H(A) + H(B) - H(A,B). Zero if either block is empty.
inline double mutual_information(const JointDistribution& dist, const VariableSubset& a,
                                 const VariableSubset& b, double base = log_base_bits) {
  detail::check_disjoint(a, b, "mutual information blocks overlap");
  return subset_entropy(dist, a, base) + subset_entropy(dist, b, base) -
         subset_entropy(dist, a.unioned(b), base);
}

// I(A;B|C) = H(A,C) + H(B,C) - H(C) - H(A,B,C).
inline double conditional_mutual_information(const JointDistribution& dist,
                                             const VariableSubset& a, const VariableSubset& b,
                                             const VariableSubset& c,
                                             double base = log_base_bits) {
  detail::check_disjoint(a, b, "mutual information blocks overlap");
  detail::check_disjoint(a, c, "conditioning block overlaps first block");
  detail::check_disjoint(b, c, "conditioning block overlaps second block");
  return subset_entropy(dist, a.unioned(c), base) + subset_entropy(dist, b.unioned(c), base) -
         subset_entropy(dist, c, base) - subset_entropy(dist, a.unioned(b).unioned(c), base);
}

// Three-way interaction on grouped blocks, I(A;B;C) = I(A;B) - I(A;B|C).
// Symmetric in all three blocks; any empty block makes it 0, consistent with
// the interaction-information chain rule (an empty block is a deterministic
// constant, so it neither carries nor destroys information).
inline double three_way_interaction(const JointDistribution& dist, const VariableSubset& a,
                                    const VariableSubset& b, const VariableSubset& c,
                                    double base = log_base_bits) {
  return mutual_information(dist, a, b, base) -
         conditional_mutual_information(dist, a, b, c, base);
}

// --------------------------------------------------------------------------
// Core metrics
// --------------------------------------------------------------------------

// TC(X) = sum_j H(X_j) - H(X). Non-negative; 0 for a single variable.
inline double total_correlation(const JointDistribution& dist, const VariableSubset& subset,
                                double base = log_base_bits) {
  dist.shape().check_subset(subset);
  if (subset.empty()) fail(Errc::invalid_subset, "total correlation needs a non-empty subset");
  double sum = 0.0;
  for (std::size_t j : subset.indices()) sum += subset_entropy(dist, {j}, base);
  return sum - subset_entropy(dist, subset, base);
}

// DTC(X) = H(X) - sum_j H(X_j | X_{-j}). Non-negative; 0 for one variable.
inline double dual_total_correlation(const JointDistribution& dist, const VariableSubset& subset,
                                     double base = log_base_bits) {
  dist.shape().check_subset(subset);
  if (subset.empty())
    fail(Errc::invalid_subset, "dual total correlation needs a non-empty subset");
  double joint = subset_entropy(dist, subset, base);
  double cond_sum = 0.0;
  for (std::size_t j : subset.indices()) {
    std::vector<std::size_t> rest;
    for (std::size_t i : subset.indices())
      if (i != j) rest.push_back(i);
    cond_sum += joint - subset_entropy(dist, VariableSubset(std::move(rest)), base);
  }
  return joint - cond_sum;
}

// II(X) = sum over non-empty subsets g of (-1)^(|g|+1) H(X^g). Exponential in
// the subset size, hence the enumeration cap.
inline double interaction_information(const JointDistribution& dist, const VariableSubset& subset,
                                      double base = log_base_bits, std::size_t max_vars = 20) {
  dist.shape().check_subset(subset);
  if (subset.size() < 2)
    fail(Errc::invalid_subset, "interaction information needs at least 2 variables");
  if (subset.size() > max_vars)
    fail(Errc::subset_too_large, "interaction information enumeration capped at " +
                                     std::to_string(max_vars) + " variables");
  const auto& idx = subset.indices();
  double acc = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << idx.size()); ++mask) {
    std::vector<std::size_t> members;
    for (std::size_t b = 0; b < idx.size(); ++b)
      if (mask & (std::size_t{1} << b)) members.push_back(idx[b]);
    const bool odd = members.size() % 2 == 1;
    double h = subset_entropy(dist, VariableSubset(std::move(members)), base);
    acc += odd ? h : -h;
  }
  return acc;
}

// O-information: (n-2) H(X) + sum_j (H(X_j) - H(X_{-j})). Signed balance of
// redundancy (positive) against synergy (negative); identically 0 for n = 2.
inline double o_information(const JointDistribution& dist, const VariableSubset& subset,
                            double base = log_base_bits) {
  dist.shape().check_subset(subset);
  if (subset.size() < 2) fail(Errc::invalid_subset, "O-information needs at least 2 variables");
  const double joint = subset_entropy(dist, subset, base);
  double acc = (static_cast<double>(subset.size()) - 2.0) * joint;
  for (std::size_t j : subset.indices()) {
    std::vector<std::size_t> rest;
    for (std::size_t i : subset.indices())
      if (i != j) rest.push_back(i);
    acc += subset_entropy(dist, {j}, base) - subset_entropy(dist, VariableSubset(std::move(rest)), base);
  }
  return acc;
}

// Redundancy-synergy index: sum_j I(X_j;Y) - I(X;Y). Positive when the
// sources are redundant about the target, negative when synergistic.
inline double rsi(const JointDistribution& dist, const VariableSubset& sources,
                  std::size_t target, double base = log_base_bits) {
  dist.shape().check_subset(sources);
  dist.shape().check_subset({target});
  if (sources.empty()) fail(Errc::invalid_subset, "RSI needs at least one source");
  if (sources.contains(target)) fail(Errc::overlapping_blocks, "target is among the sources");
  VariableSubset y{target};
  double acc = 0.0;
  for (std::size_t j : sources.indices()) acc += mutual_information(dist, {j}, y, base);
  return acc - mutual_information(dist, sources, y, base);
}

// --------------------------------------------------------------------------
// Conditional versions: the average of the metric over the conditional
// distributions, weighted by the conditioning value's probability.
// --------------------------------------------------------------------------

inline double conditional_total_correlation(const JointDistribution& dist,
                                            const VariableSubset& subset,
                                            const VariableSubset& given,
                                            double base = log_base_bits) {
  detail::check_disjoint(subset, given, "conditioning variables overlap the subset");
  VariableSubset sub = detail::remap_subset(subset, given);
  return detail::average_over_conditionals(dist, given, [&](const JointDistribution& d) {
    return total_correlation(d, sub, base);
  });
}

inline double conditional_dual_total_correlation(const JointDistribution& dist,
                                                 const VariableSubset& subset,
                                                 const VariableSubset& given,
                                                 double base = log_base_bits) {
  detail::check_disjoint(subset, given, "conditioning variables overlap the subset");
  VariableSubset sub = detail::remap_subset(subset, given);
  return detail::average_over_conditionals(dist, given, [&](const JointDistribution& d) {
    return dual_total_correlation(d, sub, base);
  });
}

inline double conditional_o_information(const JointDistribution& dist,
                                        const VariableSubset& subset,
                                        const VariableSubset& given,
                                        double base = log_base_bits) {
  detail::check_disjoint(subset, given, "conditioning variables overlap the subset");
  VariableSubset sub = detail::remap_subset(subset, given);
  return detail::average_over_conditionals(dist, given, [&](const JointDistribution& d) {
    return o_information(d, sub, base);
  });
}

inline double conditional_interaction_information(const JointDistribution& dist,
                                                  const VariableSubset& subset,
                                                  const VariableSubset& given,
                                                  double base = log_base_bits,
                                                  std::size_t max_vars = 20) {
  detail::check_disjoint(subset, given, "conditioning variables overlap the subset");
  VariableSubset sub = detail::remap_subset(subset, given);
  return detail::average_over_conditionals(dist, given, [&](const JointDistribution& d) {
    return interaction_information(d, sub, base, max_vars);
  });
}

inline double conditional_rsi(const JointDistribution& dist, const VariableSubset& sources,
                              std::size_t target, const VariableSubset& given,
                              double base = log_base_bits) {
  detail::check_disjoint(sources, given, "conditioning variables overlap the sources");
  detail::check_disjoint(VariableSubset{target}, given, "conditioning variables overlap the target");
  VariableSubset src = detail::remap_subset(sources, given);
  std::size_t tgt = detail::remap_index(target, given);
  return detail::average_over_conditionals(
      dist, given, [&](const JointDistribution& d) { return rsi(d, src, tgt, base); });
}

inline double conditional_three_way_interaction(const JointDistribution& dist,
                                                const VariableSubset& a, const VariableSubset& b,
                                                const VariableSubset& c,
                                                const VariableSubset& given,
                                                double base = log_base_bits) {
  detail::check_disjoint(a, given, "conditioning variables overlap block A");
  detail::check_disjoint(b, given, "conditioning variables overlap block B");
  detail::check_disjoint(c, given, "conditioning variables overlap block C");
  VariableSubset ra = detail::remap_subset(a, given);
  VariableSubset rb = detail::remap_subset(b, given);
  VariableSubset rc = detail::remap_subset(c, given);
  return detail::average_over_conditionals(dist, given, [&](const JointDistribution& d) {
    return three_way_interaction(d, ra, rb, rc, base);
  });
}

enum class Metric {
  total_correlation,
  dual_total_correlation,
  o_information,
  interaction_information,
  rsi,
};

// Dispatching front end over the conditional versions above. `target` is
// required for Metric::rsi and ignored otherwise.
inline double conditional_metric(Metric metric, const JointDistribution& dist,
                                 const VariableSubset& args, std::optional<std::size_t> target,
                                 const VariableSubset& given, double base = log_base_bits) {
  switch (metric) {
    case Metric::total_correlation:
      return conditional_total_correlation(dist, args, given, base);
    case Metric::dual_total_correlation:
      return conditional_dual_total_correlation(dist, args, given, base);
    case Metric::o_information:
      return conditional_o_information(dist, args, given, base);
    case Metric::interaction_information:
      return conditional_interaction_information(dist, args, given, base);
    case Metric::rsi:
      if (!target) fail(Errc::missing_target, "conditional RSI needs a target");
      return conditional_rsi(dist, args, *target, given, base);
  }
  fail(Errc::invalid_argument, "unknown metric");
}

// --------------------------------------------------------------------------
// Identity-based re-derivations. Each one must agree with its direct
// counterpart; the identity suite asserts the residuals.
// --------------------------------------------------------------------------

// TC as the telescoping expansion sum_{j=2..n} I(X^{j-1}; X_j).
inline double tc_via_mi_chain(const JointDistribution& dist, const VariableSubset& subset,
                              double base = log_base_bits) {
  dist.shape().check_subset(subset);
  const auto& idx = subset.indices();
  double acc = 0.0;
  for (std::size_t j = 1; j < idx.size(); ++j) {
    VariableSubset prefix(std::vector<std::size_t>(idx.begin(), idx.begin() + j));
    acc += mutual_information(dist, prefix, {idx[j]}, base);
  }
  return acc;
}

// DTC as I(X^{n-1}; X_n) + sum_{j=2..n-1} I(X^{j-1}; X_j | X_{j+1}^n).
inline double dtc_via_mi_chain(const JointDistribution& dist, const VariableSubset& subset,
                               double base = log_base_bits) {
  dist.shape().check_subset(subset);
  const auto& idx = subset.indices();
  const std::size_t n = idx.size();
  if (n < 2) return 0.0;
  VariableSubset head(std::vector<std::size_t>(idx.begin(), idx.end() - 1));
  double acc = mutual_information(dist, head, {idx[n - 1]}, base);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    VariableSubset prefix(std::vector<std::size_t>(idx.begin(), idx.begin() + j));
    VariableSubset tail(std::vector<std::size_t>(idx.begin() + j + 1, idx.end()));
    acc += conditional_mutual_information(dist, prefix, {idx[j]}, tail, base);
  }
  return acc;
}

// O-information as the sum of three-way interactions over successive cuts,
// sum_{j=2..n-1} I(X^{j-1}; X_j; X_{j+1}^n).
inline double o_info_via_decomposition(const JointDistribution& dist,
                                       const VariableSubset& subset,
                                       double base = log_base_bits) {
  dist.shape().check_subset(subset);
  const auto& idx = subset.indices();
  if (idx.size() < 3)
    fail(Errc::invalid_subset, "cut decomposition needs at least 3 variables");
  double acc = 0.0;
  for (std::size_t j = 1; j + 1 < idx.size(); ++j) {
    VariableSubset prefix(std::vector<std::size_t>(idx.begin(), idx.begin() + j));
    VariableSubset tail(std::vector<std::size_t>(idx.begin() + j + 1, idx.end()));
    acc += three_way_interaction(dist, prefix, {idx[j]}, tail, base);
  }
  return acc;
}

// RSI as sum_{j=2..n} I(X^{j-1}; X_j; Y). The j = 1 term has an empty prefix
// and is identically zero, so it is omitted; stopping at n-1 instead would
// drop a real term and break the identity against the direct definition.
inline double rsi_via_decomposition(const JointDistribution& dist, const VariableSubset& sources,
                                    std::size_t target, double base = log_base_bits) {
  dist.shape().check_subset(sources);
  if (sources.contains(target)) fail(Errc::overlapping_blocks, "target is among the sources");
  const auto& idx = sources.indices();
  VariableSubset y{target};
  double acc = 0.0;
  for (std::size_t j = 1; j < idx.size(); ++j) {
    VariableSubset prefix(std::vector<std::size_t>(idx.begin(), idx.begin() + j));
    acc += three_way_interaction(dist, prefix, {idx[j]}, y, base);
  }
  return acc;
}

// RSI as Omega(X,Y) - Omega(X|Y).
inline double rsi_via_oinfo(const JointDistribution& dist, const VariableSubset& sources,
                            std::size_t target, double base = log_base_bits) {
  dist.shape().check_subset(sources);
  if (sources.contains(target)) fail(Errc::overlapping_blocks, "target is among the sources");
  if (sources.empty()) fail(Errc::invalid_subset, "RSI needs at least one source");
  double whole = o_information(dist, sources.unioned({target}), base);
  if (sources.size() < 2) return whole;  // Omega over one conditioned variable is 0
  return whole - conditional_o_information(dist, sources, {target}, base);
}

// O-information as a chain of conditional RSIs over successive cuts,
// sum_{j=2..n-1} RSI(X^j; X_{j+1} | X_{j+2}^n); the last term conditions on
// the empty set.
inline double oinfo_via_rsi_chain(const JointDistribution& dist, const VariableSubset& subset,
                                  double base = log_base_bits) {
  dist.shape().check_subset(subset);
  const auto& idx = subset.indices();
  if (idx.size() < 2) fail(Errc::invalid_subset, "O-information needs at least 2 variables");
  double acc = 0.0;
  for (std::size_t j = 2; j + 1 <= idx.size(); ++j) {
    VariableSubset prefix(std::vector<std::size_t>(idx.begin(), idx.begin() + j));
    VariableSubset given(std::vector<std::size_t>(idx.begin() + j + 1, idx.end()));
    acc += conditional_rsi(dist, prefix, idx[j], given, base);
  }
  return acc;
}

// Chain-rule residual |I(A;B;(C,D)) - I(A;B;C) - I(A;B;D|C)|. The right-hand
// side goes through the conditional-averaging machinery so the two sides are
// computed along genuinely different routes.
inline double chain_rule_residual(const JointDistribution& dist, const VariableSubset& a,
                                  const VariableSubset& b, const VariableSubset& c,
                                  const VariableSubset& d, double base = log_base_bits) {
  detail::check_disjoint(c, d, "blocks C and D overlap");
  double lhs = three_way_interaction(dist, a, b, c.unioned(d), base);
  double rhs = three_way_interaction(dist, a, b, c, base) +
               conditional_three_way_interaction(dist, a, b, d, c, base);
  return std::abs(lhs - rhs);
}

// --------------------------------------------------------------------------
// Bounds
// --------------------------------------------------------------------------

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
};

// |Omega| <= (n-2) log |X_max| with |X_max| the largest alphabet in the set.
inline Bounds o_information_bounds(const SystemShape& shape, const VariableSubset& subset,
                                   double base = log_base_bits) {
  shape.check_subset(subset);
  if (subset.size() < 2) fail(Errc::invalid_subset, "O-information needs at least 2 variables");
  std::size_t max_card = 1;
  for (std::size_t j : subset.indices()) max_card = std::max(max_card, shape.var(j).cardinality);
  double u = (static_cast<double>(subset.size()) - 2.0) *
             detail::log_in_base(static_cast<double>(max_card), base);
  return Bounds{-u, u};
}

// (n-1) log min{|Y|, |X_max|} >= RSI >= -log min{|Y|, prod |X_i|}.
inline Bounds rsi_bounds(const SystemShape& shape, const VariableSubset& sources,
                         std::size_t target, double base = log_base_bits) {
  shape.check_subset(sources);
  shape.check_subset({target});
  if (sources.empty()) fail(Errc::invalid_subset, "RSI needs at least one source");
  if (sources.contains(target)) fail(Errc::overlapping_blocks, "target is among the sources");
  const std::size_t card_y = shape.var(target).cardinality;
  std::size_t max_card = 1;
  std::size_t product = 1;
  for (std::size_t j : sources.indices()) {
    std::size_t c = shape.var(j).cardinality;
    max_card = std::max(max_card, c);
    if (product < card_y) product *= c;  // only its min with |Y| matters
  }
  double upper = (static_cast<double>(sources.size()) - 1.0) *
                 detail::log_in_base(static_cast<double>(std::min(card_y, max_card)), base);
  double lower = -detail::log_in_base(static_cast<double>(std::min(card_y, product)), base);
  return Bounds{lower, upper};
}

// |I(A;B;C)| <= log of the smallest block alphabet.
inline double three_way_interaction_bound(const SystemShape& shape, const VariableSubset& a,
                                          const VariableSubset& b, const VariableSubset& c,
                                          double base = log_base_bits) {
  auto block_states = [&](const VariableSubset& s) {
    std::size_t n = 1;
    for (std::size_t j : s.indices()) n *= shape.var(j).cardinality;
    return n;
  };
  std::size_t smallest = std::min({block_states(a), block_states(b), block_states(c)});
  return detail::log_in_base(static_cast<double>(smallest), base);
}

// --------------------------------------------------------------------------
// Combined report
// --------------------------------------------------------------------------

struct MetricReport {
  double tc = 0.0;
  double dtc = 0.0;
  double o_info = 0.0;
  std::optional<double> interaction_info;  // absent above the enumeration cap
  std::optional<double> rsi;               // absent without a target
  std::map<std::string, double> residuals;
  double log_base = log_base_bits;
};

// All applicable metrics over `sources` (and `target` when given) plus the
// identity residuals between each metric and its re-derivations.
inline MetricReport compute_report(const JointDistribution& dist, const VariableSubset& sources,
                                   std::optional<std::size_t> target,
                                   double base = log_base_bits, std::size_t ii_cap = 20) {
  MetricReport r;
  r.log_base = base;
  if (sources.size() < 2) {
    // Degenerate single-variable system: no higher-order structure.
    r.tc = 0.0;
    r.dtc = 0.0;
    r.o_info = 0.0;
    if (target) r.rsi = 0.0;
    return r;
  }
  r.tc = total_correlation(dist, sources, base);
  r.dtc = dual_total_correlation(dist, sources, base);
  r.o_info = o_information(dist, sources, base);
  if (sources.size() <= ii_cap)
    r.interaction_info = interaction_information(dist, sources, base, ii_cap);

  r.residuals["oinfo_tc_dtc"] = std::abs(r.o_info - (r.tc - r.dtc));
  r.residuals["tc_expansion"] = std::abs(r.tc - tc_via_mi_chain(dist, sources, base));
  r.residuals["dtc_expansion"] = std::abs(r.dtc - dtc_via_mi_chain(dist, sources, base));
  if (sources.size() >= 3) {
    r.residuals["oinfo_decomposition"] =
        std::abs(r.o_info - o_info_via_decomposition(dist, sources, base));
    r.residuals["oinfo_rsi_chain"] = std::abs(r.o_info - oinfo_via_rsi_chain(dist, sources, base));
  }
  if (target) {
    double v = rsi(dist, sources, *target, base);
    r.rsi = v;
    r.residuals["rsi_conditional_tc"] =
        std::abs(v - (r.tc - conditional_total_correlation(dist, sources, {*target}, base)));
    r.residuals["rsi_decomposition"] =
        std::abs(v - rsi_via_decomposition(dist, sources, *target, base));
    r.residuals["rsi_via_oinfo"] = std::abs(v - rsi_via_oinfo(dist, sources, *target, base));
  }
  return r;
}

}  // namespace hoi
