#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hoi/distribution.hpp"
#include "hoi/metrics.hpp"
#include "hoi/models.hpp"
#include "hoi/random.hpp"

// Finite-sample machinery: i.i.d. sampling from a joint table, the empirical
// (plug-in) distribution, sample log-likelihoods, and the generalized
// likelihood ratio tests between the redundancy- and synergy-dominated model
// classes. The per-sample GLRT between tail-to-tail and head-to-head equals
// the plug-in RSI of the empirical distribution exactly (the in-class MLE is
// the factorized empirical distribution); the summed K-class GLRTs equal the
// plug-in O-information the same way. Tests assert both identities.

namespace hoi {

// m rows of joint observations, one integer symbol per variable.
class SampleSet {
 public:
  static SampleSet make(SystemShape shape, std::vector<int> data) {
    const std::size_t k = shape.var_count();
    if (k == 0) fail(Errc::empty_shape, "samples need at least one variable");
    if (data.empty() || data.size() % k != 0)
      fail(Errc::length_mismatch, "sample data is not a whole number of rows");
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::size_t card = shape.var(i % k).cardinality;
      if (data[i] < 0 || static_cast<std::size_t>(data[i]) >= card)
        fail(Errc::invalid_symbol,
             "symbol out of range at row " + std::to_string(i / k + 1));
    }
    SampleSet s;
    s.shape_ = std::move(shape);
    s.data_ = std::move(data);
    return s;
  }

  const SystemShape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size() / shape_.var_count(); }
  int symbol(std::size_t row, std::size_t var) const {
    return data_[row * shape_.var_count() + var];
  }
  std::span<const int> row(std::size_t i) const {
    return {data_.data() + i * shape_.var_count(), shape_.var_count()};
  }

 private:
  SystemShape shape_;
  std::vector<int> data_;
};

// m i.i.d. draws by inverse-CDF over the cumulative flat table (binary
// search per draw). Reproducible given (dist, m, seed).
inline SampleSet sample(const JointDistribution& dist, std::size_t m, std::uint64_t seed) {
  if (m < 1) fail(Errc::invalid_argument, "need at least one sample");
  const SystemShape& shape = dist.shape();
  std::vector<double> cdf(dist.state_count());
  double acc = 0.0;
  for (std::size_t s = 0; s < dist.state_count(); ++s) {
    acc += dist[s];
    cdf[s] = acc;
  }
  cdf.back() = 1.0;

  SeededRng rng(seed);
  const std::size_t k = shape.var_count();
  std::vector<int> data(m * k);
  for (std::size_t i = 0; i < m; ++i) {
    double u = rng.uniform01();
    std::size_t state = static_cast<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (state >= cdf.size()) state = cdf.size() - 1;
    shape.decode(state, std::span<int>(data.data() + i * k, k));
  }
  return SampleSet::make(shape, std::move(data));
}

// Relative-frequency table over the full shape; unobserved states get 0.
inline JointDistribution empirical(const SampleSet& samples) {
  const SystemShape& shape = samples.shape();
  std::vector<std::size_t> counts(shape.state_count(), 0);
  for (std::size_t i = 0; i < samples.size(); ++i) ++counts[shape.encode(samples.row(i))];
  std::vector<double> probs(shape.state_count());
  const double m = static_cast<double>(samples.size());
  for (std::size_t s = 0; s < probs.size(); ++s)
    probs[s] = static_cast<double>(counts[s]) / m;
  return JointDistribution::make(shape, std::move(probs));
}

// sum_k log q(x^(k)); -infinity when a sample falls outside q's support.
inline double log_likelihood(const SampleSet& samples, const JointDistribution& model,
                             double base = log_base_bits) {
  if (!samples.shape().same_cardinalities(model.shape()))
    fail(Errc::shape_mismatch, "samples do not match the model shape");
  double acc = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double q = model[model.shape().encode(samples.row(i))];
    if (q <= 0.0) return -std::numeric_limits<double>::infinity();
    acc += detail::log_in_base(q, base);
  }
  return acc;
}

struct GlrtResult {
  std::size_t m = 0;
  double lambda_t_per_m = 0.0;  // per-sample log-likelihood, in-class MLE, T side
  double lambda_h_per_m = 0.0;  // same, H side
  double glrt_per_m = 0.0;      // (lambda_T - lambda_H) / m
  double plugin_metric = 0.0;   // the same statistic from empirical entropies
  double log_base = log_base_bits;
};

// GLRT between tail-to-tail and head-to-head. The suprema over each class
// are attained at the projections of the empirical distribution, so the
// lambdas are actual sample log-likelihoods under those fitted models; the
// plug-in metric is the RSI of the empirical distribution.
inline GlrtResult glrt_rsi(const SampleSet& samples, double base = log_base_bits) {
  const SystemShape& shape = samples.shape();
  if (!shape.target()) fail(Errc::missing_target, "GLRT for RSI needs a target variable");
  JointDistribution fitted = empirical(samples);
  ProjectionResult proj_t = project(fitted, ModelClass::tail_to_tail(shape), base);
  ProjectionResult proj_h = project(fitted, ModelClass::head_to_head(shape), base);

  GlrtResult r;
  r.m = samples.size();
  r.log_base = base;
  const double m = static_cast<double>(r.m);
  r.lambda_t_per_m = log_likelihood(samples, proj_t.projected, base) / m;
  r.lambda_h_per_m = log_likelihood(samples, proj_h.projected, base) / m;
  r.glrt_per_m = r.lambda_t_per_m - r.lambda_h_per_m;
  VariableSubset sources = VariableSubset{*shape.target()}.complement(shape.var_count());
  r.plugin_metric = rsi(fitted, sources, *shape.target(), base);
  return r;
}

// One GLRT between k-tail:j and k-head:j; its per-sample value equals the
// empirical three-way interaction I(X^{j-1}; X_j; X_{j+1}^n) of that cut.
inline GlrtResult glrt_oinfo_cut(const SampleSet& samples, std::size_t cut,
                                 double base = log_base_bits) {
  const SystemShape& shape = samples.shape();
  JointDistribution fitted = empirical(samples);
  ProjectionResult proj_t = project(fitted, ModelClass::k_tail(shape, cut), base);
  ProjectionResult proj_h = project(fitted, ModelClass::k_head(shape, cut), base);

  GlrtResult r;
  r.m = samples.size();
  r.log_base = base;
  const double m = static_cast<double>(r.m);
  r.lambda_t_per_m = log_likelihood(samples, proj_t.projected, base) / m;
  r.lambda_h_per_m = log_likelihood(samples, proj_h.projected, base) / m;
  r.glrt_per_m = r.lambda_t_per_m - r.lambda_h_per_m;
  auto blocks = detail::k_blocks(shape, cut);
  r.plugin_metric = three_way_interaction(fitted, blocks.head, blocks.middle, blocks.tail, base);
  return r;
}

// Summed K-class GLRTs over all cuts j = 2..n-1; converges to the
// O-information, and equals the plug-in O-information of the empirical
// distribution at every finite m.
inline GlrtResult glrt_oinfo(const SampleSet& samples, double base = log_base_bits) {
  const SystemShape& shape = samples.shape();
  const std::size_t n = shape.var_count();
  if (n < 2) fail(Errc::invalid_subset, "O-information GLRT needs at least 2 variables");

  GlrtResult r;
  r.m = samples.size();
  r.log_base = base;
  for (std::size_t cut = 2; cut + 1 <= n; ++cut) {
    GlrtResult one = glrt_oinfo_cut(samples, cut, base);
    r.lambda_t_per_m += one.lambda_t_per_m;
    r.lambda_h_per_m += one.lambda_h_per_m;
  }
  r.glrt_per_m = r.lambda_t_per_m - r.lambda_h_per_m;
  r.plugin_metric = o_information(empirical(samples), VariableSubset::all(n), base);
  return r;
}

struct SweepRow {
  std::size_t m = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double glrt_per_m = 0.0;
  double plugin = 0.0;
  double analytic = 0.0;   // metric of the true distribution
  double abs_error = 0.0;  // |glrt_per_m - analytic|
};

// Sample/estimate grid over (m, trial). RSI mode when the shape has a
// target, O-information mode otherwise. Trial seeds are base_seed + trial,
// so rows are reproducible independent of execution order.
inline std::vector<SweepRow> convergence_sweep(const JointDistribution& true_dist,
                                               const std::vector<std::size_t>& m_grid,
                                               std::size_t trials, std::uint64_t base_seed,
                                               double base = log_base_bits) {
  const SystemShape& shape = true_dist.shape();
  const bool directed = shape.target().has_value();
  double analytic;
  if (directed) {
    VariableSubset sources = VariableSubset{*shape.target()}.complement(shape.var_count());
    analytic = rsi(true_dist, sources, *shape.target(), base);
  } else {
    analytic = o_information(true_dist, VariableSubset::all(shape.var_count()), base);
  }

  std::vector<SweepRow> rows;
  rows.reserve(m_grid.size() * trials);
  for (std::size_t m : m_grid) {
    for (std::size_t t = 0; t < trials; ++t) {
      std::uint64_t seed = base_seed + t;
      SampleSet s = sample(true_dist, m, seed);
      GlrtResult g = directed ? glrt_rsi(s, base) : glrt_oinfo(s, base);
      rows.push_back(SweepRow{m, t, seed, g.glrt_per_m, g.plugin_metric, analytic,
                              std::abs(g.glrt_per_m - analytic)});
    }
  }
  return rows;
}

}  // namespace hoi
