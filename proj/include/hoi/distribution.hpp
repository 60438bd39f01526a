#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hoi/error.hpp"

namespace hoi {

// Log bases accepted throughout. Results are bits for base 2 and nats for e.
inline constexpr double log_base_bits = 2.0;
inline constexpr double log_base_nats = std::numbers::e;

// Dense tables only; shapes whose state count exceeds the cap are rejected
// up front instead of failing on allocation.
inline constexpr std::size_t default_state_cap = std::size_t{1} << 26;

namespace detail {

// std::log2 is exact on powers of two, which is what lets the dyadic
// copy/xor families land exactly on integer bit values.
inline double log_in_base(double x, double base) {
  if (base == log_base_bits) return std::log2(x);
  if (base == log_base_nats) return std::log(x);
  return std::log(x) / std::log(base);
}

}  // namespace detail

struct Variable {
  std::string name;
  std::size_t cardinality = 0;
};

// Sorted set of variable indices. May be empty: the empty subset denotes the
// deterministic empty block (entropy 0, one joint state).
class VariableSubset {
 public:
  VariableSubset() = default;
  VariableSubset(std::initializer_list<std::size_t> indices)
      : VariableSubset(std::vector<std::size_t>(indices)) {}
  explicit VariableSubset(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  }

  static VariableSubset all(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return VariableSubset(std::move(idx));
  }

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }

  bool contains(std::size_t i) const {
    return std::binary_search(indices_.begin(), indices_.end(), i);
  }

  bool disjoint_from(const VariableSubset& other) const {
    for (std::size_t i : other.indices_)
      if (contains(i)) return false;
    return true;
  }

  VariableSubset unioned(const VariableSubset& other) const {
    std::vector<std::size_t> merged;
    merged.reserve(indices_.size() + other.indices_.size());
    std::merge(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
               std::back_inserter(merged));
    return VariableSubset(std::move(merged));
  }

  VariableSubset complement(std::size_t n) const {
    std::vector<std::size_t> rest;
    rest.reserve(n - indices_.size());
    for (std::size_t i = 0; i < n; ++i)
      if (!contains(i)) rest.push_back(i);
    return VariableSubset(std::move(rest));
  }

  bool operator==(const VariableSubset& other) const = default;

 private:
  std::vector<std::size_t> indices_;
};

// Ordered list of named finite-alphabet variables, optionally with one marked
// as the target Y. States are addressed row-major with the last variable
// varying fastest.
class SystemShape {
 public:
  SystemShape() = default;

  // Public construction: at least one variable, unique names, cardinalities
  // >= 1, state count under the cap.
  static SystemShape make(std::vector<Variable> vars,
                          std::optional<std::size_t> target = std::nullopt,
                          std::size_t state_cap = default_state_cap) {
    if (vars.empty()) fail(Errc::empty_shape, "shape needs at least one variable");
    return checked(std::move(vars), target, state_cap);
  }

  // Marginal/conditional results may legitimately cover zero variables (the
  // deterministic empty block, one state); only this path builds those.
  static SystemShape reduced(const SystemShape& base, const VariableSubset& keep) {
    std::vector<Variable> vars;
    vars.reserve(keep.size());
    std::optional<std::size_t> target;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      std::size_t i = keep.indices()[k];
      vars.push_back(base.var(i));
      if (base.target() && *base.target() == i) target = k;
    }
    return checked(std::move(vars), target, default_state_cap);
  }

  std::size_t var_count() const noexcept { return vars_.size(); }
  const Variable& var(std::size_t i) const { return vars_[i]; }
  const std::vector<Variable>& vars() const noexcept { return vars_; }
  std::optional<std::size_t> target() const noexcept { return target_; }
  std::size_t state_count() const noexcept { return state_count_; }
  std::size_t stride(std::size_t i) const { return strides_[i]; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i].name == name) return i;
    return std::nullopt;
  }

  int symbol_of(std::size_t state, std::size_t var) const {
    return static_cast<int>((state / strides_[var]) % vars_[var].cardinality);
  }

  std::size_t encode(std::span<const int> symbols) const {
    std::size_t state = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      state += static_cast<std::size_t>(symbols[i]) * strides_[i];
    return state;
  }

  void decode(std::size_t state, std::span<int> symbols) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) symbols[i] = symbol_of(state, i);
  }

  // Same variable list (names and cardinalities), target ignored.
  bool same_layout(const SystemShape& other) const {
    if (vars_.size() != other.vars_.size()) return false;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i].name != other.vars_[i].name ||
          vars_[i].cardinality != other.vars_[i].cardinality)
        return false;
    return true;
  }

  bool same_cardinalities(const SystemShape& other) const {
    if (vars_.size() != other.vars_.size()) return false;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i].cardinality != other.vars_[i].cardinality) return false;
    return true;
  }

  void check_subset(const VariableSubset& subset) const {
    for (std::size_t i : subset.indices())
      if (i >= vars_.size())
        fail(Errc::invalid_subset, "variable index " + std::to_string(i) + " out of range");
  }

 private:
  static SystemShape checked(std::vector<Variable> vars, std::optional<std::size_t> target,
                             std::size_t state_cap) {
    SystemShape s;
    s.vars_ = std::move(vars);
    s.target_ = target;
    for (std::size_t i = 0; i < s.vars_.size(); ++i) {
      if (s.vars_[i].cardinality == 0)
        fail(Errc::bad_cardinality, "variable '" + s.vars_[i].name + "' has cardinality 0");
      for (std::size_t j = i + 1; j < s.vars_.size(); ++j)
        if (s.vars_[i].name == s.vars_[j].name)
          fail(Errc::duplicate_name, "duplicate variable name '" + s.vars_[i].name + "'");
    }
    if (target && *target >= s.vars_.size())
      fail(Errc::bad_target, "target index out of range");
    std::size_t count = 1;
    for (const auto& v : s.vars_) {
      if (v.cardinality != 0 && count > state_cap / v.cardinality)
        fail(Errc::state_cap_exceeded,
             "state count exceeds cap of " + std::to_string(state_cap));
      count *= v.cardinality;
    }
    s.state_count_ = count;
    s.strides_.assign(s.vars_.size(), 1);
    for (std::size_t i = s.vars_.size(); i-- > 1;)
      s.strides_[i - 1] = s.strides_[i] * s.vars_[i].cardinality;
    return s;
  }

  std::vector<Variable> vars_;
  std::optional<std::size_t> target_;
  std::size_t state_count_ = 1;
  std::vector<std::size_t> strides_;
};

// Dense probability table over a SystemShape. Immutable after construction;
// every operation below is a pure function, so concurrent reads are safe.
class JointDistribution {
 public:
  // Validates length, non-negativity and that the raw sum is within 1e-6 of
  // 1, then normalizes by the raw sum. Tables already summing to 1 within
  // 1e-12 are kept bit-identical so that seeded outputs and file round-trips
  // stay exact.
  static JointDistribution make(SystemShape shape, std::vector<double> probs) {
    if (probs.size() != shape.state_count())
      fail(Errc::length_mismatch, "expected " + std::to_string(shape.state_count()) +
                                      " probabilities, got " + std::to_string(probs.size()));
    double sum = 0.0;
    for (double p : probs) {
      if (p < 0.0) fail(Errc::negative_probability, "negative probability entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      fail(Errc::normalization, "probabilities sum to " + std::to_string(sum));
    if (std::abs(sum - 1.0) > 1e-12)
      for (double& p : probs) p /= sum;
    JointDistribution d;
    d.shape_ = std::move(shape);
    d.probs_ = std::move(probs);
    return d;
  }

  const SystemShape& shape() const noexcept { return shape_; }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t state) const { return probs_[state]; }
  std::size_t state_count() const noexcept { return probs_.size(); }

 private:
  SystemShape shape_;
  std::vector<double> probs_;
};

// Marginal over the kept variables; removed axes are summed out. Kept
// variables preserve their original order.
inline JointDistribution marginalize(const JointDistribution& dist, const VariableSubset& keep) {
  const SystemShape& shape = dist.shape();
  shape.check_subset(keep);
  if (keep.size() == shape.var_count()) return dist;

  SystemShape out_shape = SystemShape::reduced(shape, keep);
  std::vector<double> out(out_shape.state_count(), 0.0);
  const std::size_t k = keep.size();
  for (std::size_t s = 0; s < dist.state_count(); ++s) {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < k; ++j)
      idx += static_cast<std::size_t>(shape.symbol_of(s, keep.indices()[j])) * out_shape.stride(j);
    out[idx] += dist[s];
  }
  return JointDistribution::make(std::move(out_shape), std::move(out));
}

struct Conditional {
  JointDistribution dist;  // over the remaining variables
  double weight = 0.0;     // P(on = values)
};

// Conditional distribution given `on = values`, plus the event weight.
// A zero-probability conditioning event returns nullopt so callers can skip
// the term (the 0 * metric = 0 convention in conditional metrics).
inline std::optional<Conditional> condition(const JointDistribution& dist,
                                            const VariableSubset& on,
                                            std::span<const int> values) {
  const SystemShape& shape = dist.shape();
  shape.check_subset(on);
  if (values.size() != on.size())
    fail(Errc::invalid_argument, "conditioning values do not match subset size");
  for (std::size_t j = 0; j < on.size(); ++j) {
    std::size_t card = shape.var(on.indices()[j]).cardinality;
    if (values[j] < 0 || static_cast<std::size_t>(values[j]) >= card)
      fail(Errc::invalid_symbol, "conditioning value out of range");
  }

  VariableSubset rest = on.complement(shape.var_count());
  SystemShape out_shape = SystemShape::reduced(shape, rest);
  std::vector<double> out(out_shape.state_count(), 0.0);
  double weight = 0.0;
  for (std::size_t s = 0; s < dist.state_count(); ++s) {
    bool match = true;
    for (std::size_t j = 0; j < on.size(); ++j)
      if (shape.symbol_of(s, on.indices()[j]) != values[j]) {
        match = false;
        break;
      }
    if (!match) continue;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < rest.size(); ++j)
      idx += static_cast<std::size_t>(shape.symbol_of(s, rest.indices()[j])) * out_shape.stride(j);
    out[idx] += dist[s];
    weight += dist[s];
  }
  if (weight <= 0.0) return std::nullopt;
  for (double& p : out) p /= weight;
  return Conditional{JointDistribution::make(std::move(out_shape), std::move(out)), weight};
}

// Shannon entropy, -sum p log p with 0 log 0 = 0. The zero convention is a
// branch on p <= 0 exactly, not an epsilon clamp.
inline double entropy(const JointDistribution& dist, double base = log_base_bits) {
  double h = 0.0;
  for (double p : dist.probs())
    if (p > 0.0) h -= p * detail::log_in_base(p, base);
  return h;
}

// Entropy of the marginal on `subset`; the empty subset has entropy 0.
inline double subset_entropy(const JointDistribution& dist, const VariableSubset& subset,
                             double base = log_base_bits) {
  dist.shape().check_subset(subset);
  if (subset.empty()) return 0.0;
  return entropy(marginalize(dist, subset), base);
}

// Relabeling: variable k of the result is variable perm[k] of the input.
inline JointDistribution permute_variables(const JointDistribution& dist,
                                           std::span<const std::size_t> perm) {
  const SystemShape& shape = dist.shape();
  if (perm.size() != shape.var_count())
    fail(Errc::invalid_argument, "permutation size does not match variable count");
  std::vector<Variable> vars;
  vars.reserve(perm.size());
  std::optional<std::size_t> target;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    if (perm[k] >= shape.var_count()) fail(Errc::invalid_argument, "permutation index out of range");
    vars.push_back(shape.var(perm[k]));
    if (shape.target() && *shape.target() == perm[k]) target = k;
  }
  SystemShape out_shape = SystemShape::make(std::move(vars), target);
  std::vector<double> out(out_shape.state_count(), 0.0);
  for (std::size_t s = 0; s < dist.state_count(); ++s) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < perm.size(); ++k)
      idx += static_cast<std::size_t>(shape.symbol_of(s, perm[k])) * out_shape.stride(k);
    out[idx] = dist[s];
  }
  return JointDistribution::make(std::move(out_shape), std::move(out));
}

}  // namespace hoi
