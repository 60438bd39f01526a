#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hoi/distribution.hpp"
#include "hoi/metrics.hpp"
#include "hoi/random.hpp"

// Graphical-model classes with closed-form M-projections, the KL divergence
// between dense tables, and generators for the synthetic systems (copy, xor,
// parity, random, random-in-class) used throughout the test suites.
//
// Class factorizations, with Y the designated target and X_j the rest:
//   tail-to-tail  q(X,Y) = q(Y) prod_j q(X_j|Y)        (max redundancy)
//   head-to-head  q(X,Y) = q(Y|X) prod_j q(X_j)        (max synergy)
//   k-tail:j      q(X) = q(X_j) q(X^{j-1}|X_j) q(X_{j+1}^n|X_j)
//   k-head:j      q(X) = q(X_j|X_{-j}) q(X^{j-1}) q(X_{j+1}^n)
// The K classes split the system at the 1-based cut variable j, 2 <= j <= n-1.

namespace hoi {

enum class ClassKind { tail_to_tail, head_to_head, k_tail, k_head };

class ModelClass {
 public:
  static ModelClass tail_to_tail(SystemShape shape) {
    if (!shape.target()) fail(Errc::missing_target, "tail-to-tail class needs a target");
    return ModelClass(ClassKind::tail_to_tail, std::move(shape), 0);
  }

  static ModelClass head_to_head(SystemShape shape) {
    if (!shape.target()) fail(Errc::missing_target, "head-to-head class needs a target");
    return ModelClass(ClassKind::head_to_head, std::move(shape), 0);
  }

  static ModelClass k_tail(SystemShape shape, std::size_t cut) {
    check_cut(shape, cut);
    return ModelClass(ClassKind::k_tail, std::move(shape), cut);
  }

  static ModelClass k_head(SystemShape shape, std::size_t cut) {
    check_cut(shape, cut);
    return ModelClass(ClassKind::k_head, std::move(shape), cut);
  }

  ClassKind kind() const noexcept { return kind_; }
  std::size_t cut() const noexcept { return cut_; }  // 1-based, K classes only
  const SystemShape& shape() const noexcept { return shape_; }

  std::string name() const {
    switch (kind_) {
      case ClassKind::tail_to_tail: return "tail-to-tail";
      case ClassKind::head_to_head: return "head-to-head";
      case ClassKind::k_tail: return "k-tail:" + std::to_string(cut_);
      case ClassKind::k_head: return "k-head:" + std::to_string(cut_);
    }
    return {};
  }

  static ModelClass parse(std::string_view name, SystemShape shape) {
    if (name == "tail-to-tail") return tail_to_tail(std::move(shape));
    if (name == "head-to-head") return head_to_head(std::move(shape));
    auto cut_of = [&](std::string_view rest) -> std::size_t {
      std::size_t value = 0;
      if (rest.empty()) fail(Errc::parse_error, "missing cut index in class name");
      for (char ch : rest) {
        if (ch < '0' || ch > '9') fail(Errc::parse_error, "bad cut index in class name");
        value = value * 10 + static_cast<std::size_t>(ch - '0');
      }
      return value;
    };
    if (name.starts_with("k-tail:")) return k_tail(std::move(shape), cut_of(name.substr(7)));
    if (name.starts_with("k-head:")) return k_head(std::move(shape), cut_of(name.substr(7)));
    fail(Errc::parse_error, "unknown model class '" + std::string(name) + "'");
  }

 private:
  ModelClass(ClassKind kind, SystemShape shape, std::size_t cut)
      : kind_(kind), shape_(std::move(shape)), cut_(cut) {}

  static void check_cut(const SystemShape& shape, std::size_t cut) {
    if (cut < 2 || cut + 1 > shape.var_count())
      fail(Errc::invalid_cut, "cut must satisfy 2 <= j <= n-1");
  }

  ClassKind kind_;
  SystemShape shape_;
  std::size_t cut_;
};

namespace detail {

// Addressing for a block of variables within a joint state: sub-index with
// the block's last variable fastest, matching the joint layout convention.
class BlockIndexer {
 public:
  BlockIndexer(const SystemShape& shape, const VariableSubset& block)
      : shape_(&shape), vars_(block.indices()) {
    strides_.assign(vars_.size(), 1);
    for (std::size_t i = vars_.size(); i-- > 1;)
      strides_[i - 1] = strides_[i] * shape.var(vars_[i]).cardinality;
    states_ = vars_.empty() ? 1 : strides_[0] * shape.var(vars_[0]).cardinality;
  }

  std::size_t states() const noexcept { return states_; }

  std::size_t of(std::size_t joint_state) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i)
      idx += static_cast<std::size_t>(shape_->symbol_of(joint_state, vars_[i])) * strides_[i];
    return idx;
  }

 private:
  const SystemShape* shape_;
  std::vector<std::size_t> vars_;
  std::vector<std::size_t> strides_;
  std::size_t states_ = 1;
};

// Conditional table q(block | given) with rows indexed by the given-block
// state: flat [given_state * block_states + block_state]. Rows at
// zero-probability given-events are filled uniformly; they carry no weight
// in any product, but the table stays well-formed.
inline std::vector<double> cond_table(const JointDistribution& p, const VariableSubset& block,
                                      const VariableSubset& given) {
  BlockIndexer bi(p.shape(), block);
  BlockIndexer gi(p.shape(), given);
  std::vector<double> table(gi.states() * bi.states(), 0.0);
  for (std::size_t s = 0; s < p.state_count(); ++s)
    table[gi.of(s) * bi.states() + bi.of(s)] += p[s];
  for (std::size_t g = 0; g < gi.states(); ++g) {
    double row_sum = 0.0;
    for (std::size_t b = 0; b < bi.states(); ++b) row_sum += table[g * bi.states() + b];
    if (row_sum > 0.0) {
      for (std::size_t b = 0; b < bi.states(); ++b) table[g * bi.states() + b] /= row_sum;
    } else {
      double u = 1.0 / static_cast<double>(bi.states());
      for (std::size_t b = 0; b < bi.states(); ++b) table[g * bi.states() + b] = u;
    }
  }
  return table;
}

struct KBlocks {
  VariableSubset head;    // X^{j-1}
  VariableSubset middle;  // X_j
  VariableSubset tail;    // X_{j+1}^n
};

inline KBlocks k_blocks(const SystemShape& shape, std::size_t cut) {
  std::vector<std::size_t> head, tail;
  for (std::size_t i = 0; i + 1 < cut; ++i) head.push_back(i);
  for (std::size_t i = cut; i < shape.var_count(); ++i) tail.push_back(i);
  return KBlocks{VariableSubset(std::move(head)), VariableSubset{cut - 1},
                 VariableSubset(std::move(tail))};
}

}  // namespace detail

struct ProjectionResult {
  JointDistribution projected;
  double divergence = 0.0;  // D(p || projected) in the requested base
};

// M-projection of p onto the class: the in-class distribution whose factors
// are the corresponding marginals/conditionals of p, which minimizes
// D(p || q) over the class. The divergence comes from the entropy closed
// form (tail-to-tail: TC(X|Y); head-to-head: TC(X); k-tail: I(head;tail|X_j);
// k-head: I(head;tail)); kl_divergence(p, projected) must agree with it.
inline ProjectionResult project(const JointDistribution& p, const ModelClass& cls,
                                double base = log_base_bits) {
  const SystemShape& shape = p.shape();
  if (!shape.same_layout(cls.shape()) || shape.target() != cls.shape().target())
    fail(Errc::shape_mismatch, "distribution does not match the class shape");

  std::vector<double> q(p.state_count(), 0.0);
  double divergence = 0.0;

  if (cls.kind() == ClassKind::tail_to_tail || cls.kind() == ClassKind::head_to_head) {
    const std::size_t t = *shape.target();
    VariableSubset y{t};
    VariableSubset sources = y.complement(shape.var_count());

    if (cls.kind() == ClassKind::tail_to_tail) {
      std::vector<double> p_y = detail::cond_table(p, y, {});
      std::vector<std::vector<double>> factor;
      for (std::size_t j : sources.indices())
        factor.push_back(detail::cond_table(p, {j}, y));
      for (std::size_t s = 0; s < q.size(); ++s) {
        std::size_t ys = static_cast<std::size_t>(shape.symbol_of(s, t));
        double value = p_y[ys];
        for (std::size_t k = 0; k < sources.size(); ++k) {
          std::size_t j = sources.indices()[k];
          std::size_t card_j = shape.var(j).cardinality;
          value *= factor[k][ys * card_j + static_cast<std::size_t>(shape.symbol_of(s, j))];
        }
        q[s] = value;
      }
      // TC(X|Y) = sum_j H(X_j|Y) - H(X|Y), all from the subset-entropy kernel
      double h_y = subset_entropy(p, y, base);
      double acc = 0.0;
      for (std::size_t j : sources.indices())
        acc += subset_entropy(p, y.unioned({j}), base) - h_y;
      divergence = acc - (subset_entropy(p, VariableSubset::all(shape.var_count()), base) - h_y);
    } else {
      std::vector<std::vector<double>> marg;
      for (std::size_t j : sources.indices()) marg.push_back(detail::cond_table(p, {j}, {}));
      std::vector<double> y_given_x = detail::cond_table(p, y, sources);
      detail::BlockIndexer xi(shape, sources);
      std::size_t card_y = shape.var(t).cardinality;
      for (std::size_t s = 0; s < q.size(); ++s) {
        double value = y_given_x[xi.of(s) * card_y + static_cast<std::size_t>(shape.symbol_of(s, t))];
        for (std::size_t k = 0; k < sources.size(); ++k)
          value *= marg[k][static_cast<std::size_t>(shape.symbol_of(s, sources.indices()[k]))];
        q[s] = value;
      }
      divergence = total_correlation(p, sources, base);
    }
  } else {
    auto blocks = detail::k_blocks(shape, cls.cut());
    detail::BlockIndexer ai(shape, blocks.head);
    detail::BlockIndexer ci(shape, blocks.tail);
    std::size_t card_b = shape.var(blocks.middle.indices()[0]).cardinality;

    if (cls.kind() == ClassKind::k_tail) {
      std::vector<double> p_b = detail::cond_table(p, blocks.middle, {});
      std::vector<double> a_given_b = detail::cond_table(p, blocks.head, blocks.middle);
      std::vector<double> c_given_b = detail::cond_table(p, blocks.tail, blocks.middle);
      for (std::size_t s = 0; s < q.size(); ++s) {
        std::size_t b = static_cast<std::size_t>(shape.symbol_of(s, blocks.middle.indices()[0]));
        q[s] = p_b[b] * a_given_b[b * ai.states() + ai.of(s)] *
               c_given_b[b * ci.states() + ci.of(s)];
      }
      divergence =
          conditional_mutual_information(p, blocks.head, blocks.tail, blocks.middle, base);
    } else {
      std::vector<double> p_a = detail::cond_table(p, blocks.head, {});
      std::vector<double> p_c = detail::cond_table(p, blocks.tail, {});
      VariableSubset rest = blocks.head.unioned(blocks.tail);
      std::vector<double> b_given_rest = detail::cond_table(p, blocks.middle, rest);
      detail::BlockIndexer ri(shape, rest);
      for (std::size_t s = 0; s < q.size(); ++s) {
        std::size_t b = static_cast<std::size_t>(shape.symbol_of(s, blocks.middle.indices()[0]));
        q[s] = p_a[ai.of(s)] * p_c[ci.of(s)] * b_given_rest[ri.of(s) * card_b + b];
      }
      divergence = mutual_information(p, blocks.head, blocks.tail, base);
    }
  }

  return ProjectionResult{JointDistribution::make(shape, std::move(q)), divergence};
}

// D(p||q) = sum p log(p/q); +infinity when p has mass outside q's support.
// Infinity is a legitimate divergence value here, not an error.
inline double kl_divergence(const JointDistribution& p, const JointDistribution& q,
                            double base = log_base_bits) {
  if (!p.shape().same_cardinalities(q.shape()))
    fail(Errc::shape_mismatch, "KL divergence needs identical shapes");
  double acc = 0.0;
  for (std::size_t s = 0; s < p.state_count(); ++s) {
    double ps = p[s];
    if (ps <= 0.0) continue;
    if (q[s] <= 0.0) return std::numeric_limits<double>::infinity();
    acc += ps * detail::log_in_base(ps / q[s], base);
  }
  return acc;
}

// Max-norm distance between p and its projection; 0 (within float error)
// exactly when p belongs to the class.
inline double membership_residual(const JointDistribution& p, const ModelClass& cls) {
  ProjectionResult r = project(p, cls);
  double worst = 0.0;
  for (std::size_t s = 0; s < p.state_count(); ++s)
    worst = std::max(worst, std::abs(p[s] - r.projected[s]));
  return worst;
}

// --------------------------------------------------------------------------
// Synthetic systems
// --------------------------------------------------------------------------

namespace detail {

inline SystemShape binary_shape(std::size_t n, bool with_target) {
  std::vector<Variable> vars;
  vars.reserve(n + (with_target ? 1 : 0));
  for (std::size_t i = 1; i <= n; ++i) vars.push_back({"X" + std::to_string(i), 2});
  std::optional<std::size_t> target;
  if (with_target) {
    vars.push_back({"Y", 2});
    target = n;
  }
  return SystemShape::make(std::move(vars), target);
}

inline int parity_of(std::size_t state, std::size_t bits) {
  int parity = 0;
  for (std::size_t b = 0; b < bits; ++b) parity ^= static_cast<int>((state >> b) & 1u);
  return parity;
}

}  // namespace detail

// n copied fair bits (all equal), optionally with an equal target Y. Two
// equally likely all-same states.
inline JointDistribution gen_copy(std::size_t n, bool with_target) {
  if (n < 1) fail(Errc::invalid_argument, "copy system needs n >= 1");
  SystemShape shape = detail::binary_shape(n, with_target);
  std::vector<double> probs(shape.state_count(), 0.0);
  probs.front() = 0.5;
  probs.back() = 0.5;
  return JointDistribution::make(std::move(shape), std::move(probs));
}

// X_1..X_{n-1} i.i.d. fair bits, X_n their parity: the 2^{n-1} even-parity
// states, equally likely.
inline JointDistribution gen_xor(std::size_t n) {
  if (n < 2) fail(Errc::invalid_argument, "xor system needs n >= 2");
  SystemShape shape = detail::binary_shape(n, false);
  std::vector<double> probs(shape.state_count(), 0.0);
  double mass = 1.0 / static_cast<double>(shape.state_count() / 2);
  for (std::size_t s = 0; s < probs.size(); ++s)
    if (detail::parity_of(s, n) == 0) probs[s] = mass;
  return JointDistribution::make(std::move(shape), std::move(probs));
}

// n i.i.d. fair bits with target Y = their parity.
inline JointDistribution gen_parity_target(std::size_t n) {
  if (n < 1) fail(Errc::invalid_argument, "parity system needs n >= 1");
  SystemShape shape = detail::binary_shape(n, true);
  std::vector<double> probs(shape.state_count(), 0.0);
  double mass = 1.0 / static_cast<double>(std::size_t{1} << n);
  for (std::size_t s = 0; s < probs.size(); ++s)
    if (detail::parity_of(s, n + 1) == 0) probs[s] = mass;
  return JointDistribution::make(std::move(shape), std::move(probs));
}

// Flat-Dirichlet table: every cell an i.i.d. unit-rate exponential draw,
// normalized. Full support almost surely, which keeps projection tests away
// from infinite KL.
inline JointDistribution gen_random(const SystemShape& shape, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<double> probs(shape.state_count());
  for (double& p : probs) p = rng.exponential();
  double sum = 0.0;
  for (double p : probs) sum += p;
  for (double& p : probs) p /= sum;
  return JointDistribution::make(shape, std::move(probs));
}

// Random member of a model class: each factor row drawn flat-Dirichlet, then
// multiplied per the class factorization. Deterministic given the seed.
inline JointDistribution gen_random_in_class(const ModelClass& cls, std::uint64_t seed) {
  SeededRng rng(seed);
  const SystemShape& shape = cls.shape();
  auto draw_rows = [&rng](std::size_t rows, std::size_t cols) {
    std::vector<double> table(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        table[r * cols + c] = rng.exponential();
        sum += table[r * cols + c];
      }
      for (std::size_t c = 0; c < cols; ++c) table[r * cols + c] /= sum;
    }
    return table;
  };

  std::vector<double> probs(shape.state_count(), 0.0);
  if (cls.kind() == ClassKind::tail_to_tail || cls.kind() == ClassKind::head_to_head) {
    const std::size_t t = *shape.target();
    VariableSubset y{t};
    VariableSubset sources = y.complement(shape.var_count());
    std::size_t card_y = shape.var(t).cardinality;

    if (cls.kind() == ClassKind::tail_to_tail) {
      std::vector<double> q_y = draw_rows(1, card_y);
      std::vector<std::vector<double>> factor;
      for (std::size_t j : sources.indices())
        factor.push_back(draw_rows(card_y, shape.var(j).cardinality));
      for (std::size_t s = 0; s < probs.size(); ++s) {
        std::size_t ys = static_cast<std::size_t>(shape.symbol_of(s, t));
        double value = q_y[ys];
        for (std::size_t k = 0; k < sources.size(); ++k) {
          std::size_t j = sources.indices()[k];
          value *= factor[k][ys * shape.var(j).cardinality +
                             static_cast<std::size_t>(shape.symbol_of(s, j))];
        }
        probs[s] = value;
      }
    } else {
      std::vector<std::vector<double>> marg;
      for (std::size_t j : sources.indices()) marg.push_back(draw_rows(1, shape.var(j).cardinality));
      detail::BlockIndexer xi(shape, sources);
      std::vector<double> y_given_x = draw_rows(xi.states(), card_y);
      for (std::size_t s = 0; s < probs.size(); ++s) {
        double value = y_given_x[xi.of(s) * card_y + static_cast<std::size_t>(shape.symbol_of(s, t))];
        for (std::size_t k = 0; k < sources.size(); ++k)
          value *= marg[k][static_cast<std::size_t>(shape.symbol_of(s, sources.indices()[k]))];
        probs[s] = value;
      }
    }
  } else {
    auto blocks = detail::k_blocks(shape, cls.cut());
    detail::BlockIndexer ai(shape, blocks.head);
    detail::BlockIndexer ci(shape, blocks.tail);
    std::size_t card_b = shape.var(blocks.middle.indices()[0]).cardinality;

    if (cls.kind() == ClassKind::k_tail) {
      std::vector<double> p_b = draw_rows(1, card_b);
      std::vector<double> a_given_b = draw_rows(card_b, ai.states());
      std::vector<double> c_given_b = draw_rows(card_b, ci.states());
      for (std::size_t s = 0; s < probs.size(); ++s) {
        std::size_t b = static_cast<std::size_t>(shape.symbol_of(s, blocks.middle.indices()[0]));
        probs[s] = p_b[b] * a_given_b[b * ai.states() + ai.of(s)] *
                   c_given_b[b * ci.states() + ci.of(s)];
      }
    } else {
      std::vector<double> p_a = draw_rows(1, ai.states());
      std::vector<double> p_c = draw_rows(1, ci.states());
      VariableSubset rest = blocks.head.unioned(blocks.tail);
      detail::BlockIndexer ri(shape, rest);
      std::vector<double> b_given_rest = draw_rows(ri.states(), card_b);
      for (std::size_t s = 0; s < probs.size(); ++s) {
        std::size_t b = static_cast<std::size_t>(shape.symbol_of(s, blocks.middle.indices()[0]));
        probs[s] = p_a[ai.of(s)] * p_c[ci.of(s)] * b_given_rest[ri.of(s) * card_b + b];
      }
    }
  }
  return JointDistribution::make(shape, std::move(probs));
}

// Deterministic family of small mixed-cardinality shapes for identity
// sweeps: n cycles through 3,4,5 and cardinalities through 2,3.
inline std::vector<SystemShape> corpus_shapes(std::size_t count, bool with_target) {
  std::vector<SystemShape> shapes;
  shapes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t n = 3 + (i % 3);
    std::vector<Variable> vars;
    for (std::size_t k = 0; k < n; ++k)
      vars.push_back({"X" + std::to_string(k + 1), 2 + ((i + k) % 2)});
    std::optional<std::size_t> target;
    if (with_target) {
      vars.push_back({"Y", 2 + (i % 2)});
      target = n;
    }
    shapes.push_back(SystemShape::make(std::move(vars), target));
  }
  return shapes;
}

}  // namespace hoi
