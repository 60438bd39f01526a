#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hoi/hoi.hpp"
#include "support.hpp"

using namespace hoi;

namespace {

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

TEST_CASE("sampling") {
  SECTION("a point mass yields identical rows") {
    auto point = JointDistribution::make(SystemShape::make({{"A", 2}, {"B", 3}}),
                                         {0, 0, 0, 0, 1, 0});
    auto s = sample(point, 50, 4);
    for (std::size_t r = 0; r < s.size(); ++r) {
      CHECK(s.symbol(r, 0) == 1);
      CHECK(s.symbol(r, 1) == 1);
    }
  }

  SECTION("uniform-bit frequencies concentrate") {
    auto bit = JointDistribution::make(SystemShape::make({{"X1", 2}}), {0.5, 0.5});
    auto s = sample(bit, 100000, 7);
    double ones = 0;
    for (std::size_t r = 0; r < s.size(); ++r) ones += s.symbol(r, 0);
    // binomial sd is ~0.00158 at this m; 0.01 is a >6 sigma margin
    CHECK(ones / 100000.0 == Approx(0.5).margin(0.01));
  }

  SECTION("same inputs give identical sample sets") {
    auto d = gen_random(SystemShape::make({{"A", 3}, {"B", 2}}), 11);
    auto s1 = sample(d, 500, 123);
    auto s2 = sample(d, 500, 123);
    for (std::size_t r = 0; r < s1.size(); ++r)
      for (std::size_t v = 0; v < 2; ++v) CHECK(s1.symbol(r, v) == s2.symbol(r, v));
  }

  CHECK_THROWS_AS(sample(gen_copy(2, false), 0, 1), Error);
}

TEST_CASE("sample set validation") {
  auto shape = SystemShape::make({{"A", 2}, {"B", 2}});
  CHECK_THROWS_AS(SampleSet::make(shape, {0, 1, 1}), Error);
  CHECK_THROWS_AS(SampleSet::make(shape, {0, 2}), Error);
  CHECK_THROWS_AS(SampleSet::make(shape, {}), Error);
}

TEST_CASE("empirical distributions") {
  auto shape = SystemShape::make({{"X1", 2}});
  auto two = SampleSet::make(shape, {0, 1});
  auto fitted = empirical(two);
  CHECK(fitted[0] == 0.5);
  CHECK(fitted[1] == 0.5);

  auto point = JointDistribution::make(SystemShape::make({{"A", 2}, {"B", 2}}), {0, 1, 0, 0});
  auto fit_point = empirical(sample(point, 25, 3));
  CHECK(fit_point[1] == 1.0);

  SECTION("large samples approach the truth in total variation") {
    auto copy3 = gen_copy(3, false);
    auto fit = empirical(sample(copy3, 100000, 17));
    double tv = 0.0;
    for (std::size_t s = 0; s < copy3.state_count(); ++s)
      tv += 0.5 * std::abs(copy3[s] - fit[s]);
    CHECK(tv < 0.01);
  }
}

TEST_CASE("log likelihood") {
  auto shape = SystemShape::make({{"X1", 2}});
  auto point = JointDistribution::make(shape, {0.0, 1.0});
  auto ones = SampleSet::make(shape, {1, 1, 1});
  CHECK(log_likelihood(ones, point) == 0.0);

  auto uniform = JointDistribution::make(shape, {0.5, 0.5});
  auto mixed = SampleSet::make(shape, {0, 1, 0, 1, 1});
  CHECK(log_likelihood(mixed, uniform) == Approx(-5.0).margin(1e-12));

  auto zeros = SampleSet::make(shape, {0});
  CHECK(std::isinf(log_likelihood(zeros, point)));
  CHECK(log_likelihood(zeros, point) < 0);
}

TEST_CASE("GLRT for the RSI on canonical systems") {
  auto copy3y = gen_copy(3, true);
  auto g = glrt_rsi(sample(copy3y, 10000, 5));
  CHECK(g.glrt_per_m == Approx(2.0).margin(0.05));
  CHECK(g.m == 10000);

  auto par3 = gen_parity_target(3);
  auto gp = glrt_rsi(sample(par3, 10000, 6));
  CHECK(gp.glrt_per_m == Approx(-1.0).margin(0.05));

  auto no_target = gen_copy(3, false);
  CHECK_THROWS_AS(glrt_rsi(sample(no_target, 10, 1)), Error);
}

TEST_CASE("GLRT equals the plug-in metric exactly") {
  // the likelihood route and the empirical-entropy route must agree to
  // float precision on every sample set, not just in the limit
  std::size_t count = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    auto shapes = corpus_shapes(50, true);
    auto truth = gen_random(shapes[i], 900 + i);
    for (std::size_t m : {10, 100, 1000}) {
      auto s = sample(truth, m, 30 + i);
      auto g = glrt_rsi(s);
      CHECK(std::abs(g.glrt_per_m - g.plugin_metric) < 1e-9);
      CHECK(std::isfinite(g.lambda_t_per_m));
      CHECK(std::isfinite(g.lambda_h_per_m));
      ++count;
    }
  }
  CHECK(count == 150);
}

TEST_CASE("GLRT lambdas match their entropy closed forms") {
  for (std::size_t i = 0; i < 10; ++i) {
    auto truth = gen_random(corpus_shapes(10, true)[i], 1200 + i);
    auto s = sample(truth, 400, 55 + i);
    auto fitted = empirical(s);
    const auto& shape = fitted.shape();
    std::size_t t = *shape.target();
    VariableSubset y{t};
    VariableSubset sources = y.complement(shape.var_count());

    auto g = glrt_rsi(s);
    double h_y = subset_entropy(fitted, y);
    double lambda_t = -h_y;
    for (std::size_t j : sources.indices())
      lambda_t -= subset_entropy(fitted, y.unioned({j})) - h_y;
    CHECK(g.lambda_t_per_m == Approx(lambda_t).margin(1e-9));

    double h_all = subset_entropy(fitted, VariableSubset::all(shape.var_count()));
    double h_x = subset_entropy(fitted, sources);
    double lambda_h = -(h_all - h_x);
    for (std::size_t j : sources.indices()) lambda_h -= subset_entropy(fitted, {j});
    CHECK(g.lambda_h_per_m == Approx(lambda_h).margin(1e-9));
  }
}

TEST_CASE("GLRT difference equals the projection divergences at the empirical fit") {
  for (std::size_t i = 0; i < 10; ++i) {
    auto truth = gen_random(corpus_shapes(10, true)[i], 2100 + i);
    auto s = sample(truth, 200, 77 + i);
    auto fitted = empirical(s);
    auto g = glrt_rsi(s);
    double dh = kl_divergence(fitted, project(fitted, ModelClass::head_to_head(fitted.shape())).projected);
    double dt = kl_divergence(fitted, project(fitted, ModelClass::tail_to_tail(fitted.shape())).projected);
    CHECK(g.glrt_per_m == Approx(dh - dt).margin(1e-9));
  }
}

TEST_CASE("GLRT for the O-information") {
  auto g_xor = glrt_oinfo(sample(gen_xor(4), 10000, 8));
  CHECK(g_xor.glrt_per_m == Approx(-2.0).margin(0.1));

  auto g_copy = glrt_oinfo(sample(gen_copy(4, false), 10000, 9));
  CHECK(g_copy.glrt_per_m == Approx(2.0).margin(0.1));

  SECTION("each cut reproduces the empirical three-way interaction") {
    for (std::size_t i = 0; i < 8; ++i) {
      auto truth = gen_random(corpus_shapes(8, false)[i], 3300 + i);
      auto s = sample(truth, 300, 41 + i);
      auto fitted = empirical(s);
      std::size_t n = fitted.shape().var_count();
      double sum = 0.0;
      for (std::size_t cut = 2; cut + 1 <= n; ++cut) {
        auto one = glrt_oinfo_cut(s, cut);
        CHECK(std::abs(one.glrt_per_m - one.plugin_metric) < 1e-9);
        std::vector<std::size_t> head, tail;
        for (std::size_t k = 0; k + 1 < cut; ++k) head.push_back(k);
        for (std::size_t k = cut; k < n; ++k) tail.push_back(k);
        CHECK(one.plugin_metric == Approx(three_way_interaction(
                                       fitted, VariableSubset(head), {cut - 1},
                                       VariableSubset(tail)))
                                       .margin(1e-12));
        sum += one.glrt_per_m;
      }
      auto total = glrt_oinfo(s);
      CHECK(total.glrt_per_m == Approx(sum).margin(1e-12));
      CHECK(std::abs(total.glrt_per_m - total.plugin_metric) < 1e-9);
    }
  }
}

TEST_CASE("convergence sweep") {
  SECTION("degenerate grid gives one row consistent with the direct GLRT") {
    auto copy3y = gen_copy(3, true);
    auto rows = convergence_sweep(copy3y, {100}, 1, 12);
    REQUIRE(rows.size() == 1);
    auto direct = glrt_rsi(sample(copy3y, 100, 12));
    CHECK(rows[0].glrt_per_m == direct.glrt_per_m);
    CHECK(rows[0].analytic == Approx(2.0).margin(1e-12));
    CHECK(rows[0].abs_error == Approx(std::abs(direct.glrt_per_m - 2.0)).margin(1e-15));
  }

  SECTION("rows are bit-identical across runs") {
    auto par3 = gen_parity_target(3);
    auto a = convergence_sweep(par3, {50, 200}, 3, 7);
    auto b = convergence_sweep(par3, {50, 200}, 3, 7);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].glrt_per_m == b[i].glrt_per_m);
      CHECK(a[i].seed == b[i].seed);
      CHECK(a[i].m == b[i].m);
    }
  }

  SECTION("median error shrinks with m") {
    auto copy3y = gen_copy(3, true);
    auto rows = convergence_sweep(copy3y, {100, 1000, 10000}, 10, 21);
    std::vector<double> medians;
    for (std::size_t m : {100, 1000, 10000}) {
      std::vector<double> errors;
      for (const auto& r : rows)
        if (r.m == m) errors.push_back(r.abs_error);
      medians.push_back(median(std::move(errors)));
    }
    std::size_t inversions = 0;
    for (std::size_t i = 0; i + 1 < medians.size(); ++i)
      if (medians[i + 1] > medians[i]) ++inversions;
    CHECK(inversions <= 1);
  }

  SECTION("undirected shapes sweep the O-information") {
    auto xor3 = gen_xor(3);
    auto rows = convergence_sweep(xor3, {200}, 2, 5);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].analytic == Approx(-1.0).margin(1e-12));
  }

  SECTION("every parity-system error at m = 1e5 sits below 0.02 bits") {
    // plug-in bias for the 16-state parity system at this m is ~1e-4, so
    // 0.02 leaves two orders of magnitude of headroom
    auto par3 = gen_parity_target(3);
    auto rows = convergence_sweep(par3, {100000}, 20, 33);
    for (const auto& r : rows) CHECK(r.abs_error < 0.02);
  }
}
