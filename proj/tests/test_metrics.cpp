#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hoi/hoi.hpp"
#include "support.hpp"

using namespace hoi;

namespace {

JointDistribution independent_bits(std::size_t n, std::uint64_t seed) {
  // product of n independent (biased) bits, built cell by cell
  SeededRng rng(seed);
  std::vector<double> bias(n);
  for (auto& b : bias) b = 0.2 + 0.6 * rng.uniform01();
  std::vector<Variable> vars;
  for (std::size_t i = 1; i <= n; ++i) vars.push_back({"X" + std::to_string(i), 2});
  SystemShape shape = SystemShape::make(std::move(vars));
  std::vector<double> probs(shape.state_count());
  for (std::size_t s = 0; s < probs.size(); ++s) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      p *= shape.symbol_of(s, i) == 1 ? bias[i] : 1.0 - bias[i];
    probs[s] = p;
  }
  return JointDistribution::make(std::move(shape), std::move(probs));
}

// Y appended as an independent uniform bit.
JointDistribution with_independent_target(const JointDistribution& d) {
  std::vector<Variable> vars = d.shape().vars();
  vars.push_back({"Y", 2});
  const std::size_t target = vars.size() - 1;
  SystemShape shape = SystemShape::make(std::move(vars), target);
  std::vector<double> probs(shape.state_count());
  for (std::size_t s = 0; s < d.state_count(); ++s) {
    probs[2 * s] = d[s] * 0.5;
    probs[2 * s + 1] = d[s] * 0.5;
  }
  return JointDistribution::make(std::move(shape), std::move(probs));
}

}  // namespace

TEST_CASE("total correlation reference systems") {
  CHECK(total_correlation(gen_copy(3, false), VariableSubset::all(3)) == Approx(2.0).margin(1e-12));
  CHECK(total_correlation(gen_xor(3), VariableSubset::all(3)) == Approx(1.0).margin(1e-12));
  auto ind = independent_bits(2, 3);
  CHECK(total_correlation(ind, VariableSubset::all(2)) == Approx(0.0).margin(1e-12));
  CHECK(total_correlation(ind, {0}) == 0.0);
  CHECK_THROWS_AS(total_correlation(ind, {}), Error);
}

TEST_CASE("dual total correlation reference systems") {
  CHECK(dual_total_correlation(gen_copy(3, false), VariableSubset::all(3)) ==
        Approx(1.0).margin(1e-12));
  CHECK(dual_total_correlation(gen_xor(3), VariableSubset::all(3)) == Approx(2.0).margin(1e-12));
  auto ind = independent_bits(2, 4);
  CHECK(dual_total_correlation(ind, VariableSubset::all(2)) == Approx(0.0).margin(1e-12));
  CHECK(dual_total_correlation(ind, {1}) == 0.0);
}

TEST_CASE("TC and DTC are non-negative") {
  for (auto& d : testsup::random_corpus(50, false)) {
    auto all = VariableSubset::all(d.shape().var_count());
    CHECK(total_correlation(d, all) >= -1e-10);
    CHECK(dual_total_correlation(d, all) >= -1e-10);
  }
}

TEST_CASE("interaction information") {
  auto pair = gen_copy(2, false);  // two copied bits
  CHECK(interaction_information(pair, VariableSubset::all(2)) == Approx(1.0).margin(1e-12));
  CHECK(interaction_information(gen_xor(3), VariableSubset::all(3)) ==
        Approx(-1.0).margin(1e-12));
  CHECK(interaction_information(independent_bits(3, 5), VariableSubset::all(3)) ==
        Approx(0.0).margin(1e-12));

  SECTION("matches mutual information for pairs") {
    for (auto& d : testsup::random_corpus(10, false)) {
      double ii = interaction_information(d, {0, 2});
      double mi = mutual_information(d, {0}, {2});
      CHECK(ii == Approx(mi).margin(1e-12));
    }
  }

  SECTION("enumeration cap and arity are enforced") {
    auto d = gen_random(SystemShape::make({{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}}), 2);
    CHECK_THROWS_AS(interaction_information(d, VariableSubset::all(4), log_base_bits, 3), Error);
    CHECK_THROWS_AS(interaction_information(d, {0}), Error);
  }
}

TEST_CASE("mutual information and its conditional version") {
  CHECK(mutual_information(gen_copy(2, false), {0}, {1}) == Approx(1.0).margin(1e-12));
  // xor: given X3, knowing X1 pins X2 exactly, one full bit
  CHECK(conditional_mutual_information(gen_xor(3), {0}, {1}, {2}) == Approx(1.0).margin(1e-12));
  CHECK(mutual_information(independent_bits(2, 9), {0}, {1}) == Approx(0.0).margin(1e-12));
  CHECK(mutual_information(gen_copy(3, false), {}, {1}) == 0.0);
  CHECK_THROWS_AS(mutual_information(gen_copy(3, false), {0, 1}, {1}), Error);
}

TEST_CASE("three-way interaction on copy and xor") {
  auto copy3 = gen_copy(3, false);
  CHECK(three_way_interaction(copy3, {0}, {1}, {2}) == Approx(1.0).margin(1e-12));
  auto xor3 = gen_xor(3);
  CHECK(three_way_interaction(xor3, {0}, {1}, {2}) == Approx(-1.0).margin(1e-12));

  // empty block: a deterministic constant carries nothing, the term is 0
  CHECK(three_way_interaction(copy3, {0}, {1}, {}) == 0.0);
  CHECK(three_way_interaction(copy3, {}, {1}, {2}) == 0.0);
  CHECK_THROWS_AS(three_way_interaction(copy3, {0, 1}, {1}, {2}), Error);
}

TEST_CASE("three-way interaction is symmetric in all blocks") {
  for (auto& d : testsup::random_corpus(30, true)) {
    std::size_t n = d.shape().var_count();
    VariableSubset a{0}, b{1}, c(std::vector<std::size_t>{2, n - 1});
    double ref = three_way_interaction(d, a, b, c);
    CHECK(three_way_interaction(d, a, c, b) == Approx(ref).margin(1e-10));
    CHECK(three_way_interaction(d, b, a, c) == Approx(ref).margin(1e-10));
    CHECK(three_way_interaction(d, b, c, a) == Approx(ref).margin(1e-10));
    CHECK(three_way_interaction(d, c, a, b) == Approx(ref).margin(1e-10));
    CHECK(three_way_interaction(d, c, b, a) == Approx(ref).margin(1e-10));
    CHECK(std::abs(ref) <=
          three_way_interaction_bound(d.shape(), a, b, c) + 1e-9);
  }
}

TEST_CASE("O-information reference systems") {
  CHECK(o_information(gen_copy(5, false), VariableSubset::all(5)) == Approx(3.0).margin(1e-12));
  CHECK(o_information(gen_xor(5), VariableSubset::all(5)) == Approx(-3.0).margin(1e-12));
  for (auto& d : testsup::random_corpus(10, false))
    CHECK(o_information(d, {0, 2}) == 0.0);
  CHECK_THROWS_AS(o_information(gen_copy(3, false), {0}), Error);
}

TEST_CASE("RSI reference systems") {
  auto copy4 = gen_copy(4, true);
  CHECK(rsi(copy4, VariableSubset::all(4), 4) == Approx(3.0).margin(1e-12));
  auto parity3 = gen_parity_target(3);
  CHECK(rsi(parity3, VariableSubset::all(3), 3) == Approx(-1.0).margin(1e-12));
  auto ind = with_independent_target(independent_bits(3, 11));
  CHECK(rsi(ind, VariableSubset::all(3), 3) == Approx(0.0).margin(1e-12));
  CHECK(rsi(copy4, {0}, 4) == 0.0);
  CHECK_THROWS_AS(rsi(copy4, VariableSubset::all(5), 4), Error);
}

TEST_CASE("conditional metrics") {
  SECTION("conditioning the copy-with-target on Y collapses everything") {
    auto copy4 = gen_copy(4, true);
    CHECK(conditional_o_information(copy4, VariableSubset::all(4), {4}) ==
          Approx(0.0).margin(1e-12));
  }

  SECTION("conditioning on an independent variable changes nothing") {
    auto d = with_independent_target(gen_random(
        SystemShape::make({{"X1", 2}, {"X2", 3}, {"X3", 2}}), 21));
    double tc_plain = total_correlation(d, VariableSubset::all(3));
    double tc_given_y = conditional_total_correlation(d, VariableSubset::all(3), {3});
    CHECK(tc_given_y == Approx(tc_plain).margin(1e-12));
  }

  SECTION("conditional RSI on the all-equal system is zero") {
    auto copy4 = gen_copy(4, false);
    CHECK(conditional_rsi(copy4, {0, 1}, 2, {3}) == Approx(0.0).margin(1e-12));
  }

  SECTION("dispatch front end agrees with the named functions") {
    auto d = testsup::random_corpus(1, true).front();
    std::size_t n = d.shape().var_count();
    VariableSubset args{0, 1};
    VariableSubset given{n - 1};
    CHECK(conditional_metric(Metric::total_correlation, d, args, std::nullopt, given) ==
          conditional_total_correlation(d, args, given));
    CHECK(conditional_metric(Metric::rsi, d, args, n - 2, given) ==
          conditional_rsi(d, args, n - 2, given));
    CHECK_THROWS_AS(conditional_metric(Metric::rsi, d, args, std::nullopt, given), Error);
    CHECK_THROWS_AS(conditional_total_correlation(d, args, {0}), Error);
  }

  SECTION("conditional metrics equal the conditional-entropy route") {
    // TC(X|Y) can also be written sum_j H(X_j|Y) - H(X|Y); both routes must
    // agree even though the implementation averages over conditionals.
    for (auto& d : testsup::random_corpus(20, true)) {
      std::size_t t = *d.shape().target();
      VariableSubset sources = VariableSubset{t}.complement(d.shape().var_count());
      VariableSubset y{t};
      double avg = conditional_total_correlation(d, sources, y);
      double hy = subset_entropy(d, y);
      double via_entropy = -(subset_entropy(d, sources.unioned(y)) - hy);
      for (std::size_t j : sources.indices())
        via_entropy += subset_entropy(d, y.unioned({j})) - hy;
      CHECK(avg == Approx(via_entropy).margin(1e-9));
    }
  }
}

TEST_CASE("defining identities hold on the random corpus") {
  for (auto& d : testsup::random_corpus(60, true)) {
    std::size_t t = *d.shape().target();
    VariableSubset sources = VariableSubset{t}.complement(d.shape().var_count());
    auto everything = VariableSubset::all(d.shape().var_count());

    double tc = total_correlation(d, everything);
    double dtc = dual_total_correlation(d, everything);
    double omega = o_information(d, everything);
    CHECK(omega == Approx(tc - dtc).margin(1e-9));

    double v = rsi(d, sources, t);
    double tc_x = total_correlation(d, sources);
    double tc_x_given_y = conditional_total_correlation(d, sources, {t});
    CHECK(v == Approx(tc_x - tc_x_given_y).margin(1e-9));

    CHECK(tc == Approx(tc_via_mi_chain(d, everything)).margin(1e-9));
    CHECK(dtc == Approx(dtc_via_mi_chain(d, everything)).margin(1e-9));
  }
}

TEST_CASE("decomposition re-derivations match their directs") {
  CHECK(o_info_via_decomposition(gen_copy(3, false), VariableSubset::all(3)) ==
        Approx(1.0).margin(1e-12));
  CHECK(o_info_via_decomposition(gen_xor(4), VariableSubset::all(4)) ==
        Approx(-2.0).margin(1e-12));
  CHECK(rsi_via_decomposition(gen_copy(3, true), VariableSubset::all(3), 3) ==
        Approx(2.0).margin(1e-12));
  CHECK(rsi_via_decomposition(gen_parity_target(4), VariableSubset::all(4), 4) ==
        Approx(-1.0).margin(1e-12));
  CHECK(oinfo_via_rsi_chain(gen_copy(4, false), VariableSubset::all(4)) ==
        Approx(2.0).margin(1e-12));
  CHECK(oinfo_via_rsi_chain(gen_xor(4), VariableSubset::all(4)) == Approx(-2.0).margin(1e-12));
  CHECK_THROWS_AS(o_info_via_decomposition(gen_copy(2, false), VariableSubset::all(2)), Error);

  for (auto& d : testsup::random_corpus(40, true)) {
    std::size_t t = *d.shape().target();
    VariableSubset sources = VariableSubset{t}.complement(d.shape().var_count());
    auto everything = VariableSubset::all(d.shape().var_count());

    double omega = o_information(d, everything);
    CHECK(o_info_via_decomposition(d, everything) == Approx(omega).margin(1e-9));
    CHECK(oinfo_via_rsi_chain(d, everything) == Approx(omega).margin(1e-9));

    double v = rsi(d, sources, t);
    CHECK(rsi_via_decomposition(d, sources, t) == Approx(v).margin(1e-9));
    CHECK(rsi_via_oinfo(d, sources, t) == Approx(v).margin(1e-9));

    // single-source degenerate case stays consistent across the routes
    std::size_t lone = sources.indices().front();
    CHECK(rsi(d, {lone}, t) == 0.0);
    CHECK(rsi_via_oinfo(d, {lone}, t) == 0.0);
    CHECK(rsi_via_decomposition(d, {lone}, t) == 0.0);
  }
}

TEST_CASE("RSI and O-information coincide for three variables") {
  for (auto& d : testsup::random_corpus(30, false)) {
    VariableSubset three{0, 1, 2};
    auto m = marginalize(d, three);
    double omega = o_information(m, VariableSubset::all(3));
    double v = rsi(m, {0, 1}, 2);
    double iii = three_way_interaction(m, {0}, {1}, {2});
    CHECK(std::abs(omega - v) < 1e-12);
    CHECK(omega == Approx(iii).margin(1e-12));
  }
}

TEST_CASE("permutation invariance") {
  for (auto& d : testsup::random_corpus(15, true)) {
    std::size_t n = d.shape().var_count();
    std::size_t t = *d.shape().target();
    auto everything = VariableSubset::all(n);

    // relabeling the variables must leave Omega unchanged
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::rotate(perm.begin(), perm.begin() + 1, perm.end() - 1);  // keep Y last
    auto moved = permute_variables(d, perm);
    CHECK(o_information(moved, everything) ==
          Approx(o_information(d, everything)).margin(1e-10));

    VariableSubset sources = VariableSubset{t}.complement(n);
    CHECK(rsi(moved, sources, t) == Approx(rsi(d, sources, t)).margin(1e-10));
  }
}

TEST_CASE("bounds") {
  auto five_bits = SystemShape::make(
      {{"X1", 2}, {"X2", 2}, {"X3", 2}, {"X4", 2}, {"X5", 2}});
  auto b = o_information_bounds(five_bits, VariableSubset::all(5));
  CHECK(b.lower == Approx(-3.0).margin(1e-12));
  CHECK(b.upper == Approx(3.0).margin(1e-12));

  auto with_y = SystemShape::make(
      {{"X1", 2}, {"X2", 2}, {"X3", 2}, {"X4", 2}, {"Y", 2}}, 4);
  auto rb = rsi_bounds(with_y, VariableSubset::all(4), 4);
  CHECK(rb.lower == Approx(-1.0).margin(1e-12));
  CHECK(rb.upper == Approx(3.0).margin(1e-12));

  auto pair = SystemShape::make({{"X1", 2}, {"X2", 2}});
  auto pb = o_information_bounds(pair, VariableSubset::all(2));
  CHECK(pb.lower == 0.0);
  CHECK(pb.upper == 0.0);

  SECTION("metrics always fall inside and the extreme families attain them") {
    for (auto& d : testsup::random_corpus(60, true)) {
      std::size_t n = d.shape().var_count();
      std::size_t t = *d.shape().target();
      auto everything = VariableSubset::all(n);
      auto ob = o_information_bounds(d.shape(), everything);
      double omega = o_information(d, everything);
      CHECK(omega <= ob.upper + 1e-9);
      CHECK(omega >= ob.lower - 1e-9);
      VariableSubset sources = VariableSubset{t}.complement(n);
      auto rbnd = rsi_bounds(d.shape(), sources, t);
      double v = rsi(d, sources, t);
      CHECK(v <= rbnd.upper + 1e-9);
      CHECK(v >= rbnd.lower - 1e-9);
    }
    auto copy6 = gen_copy(6, false);
    auto cb = o_information_bounds(copy6.shape(), VariableSubset::all(6));
    CHECK(o_information(copy6, VariableSubset::all(6)) == Approx(cb.upper).margin(1e-12));
    auto xor6 = gen_xor(6);
    CHECK(o_information(xor6, VariableSubset::all(6)) == Approx(cb.lower).margin(1e-12));
    auto copy5y = gen_copy(5, true);
    auto crb = rsi_bounds(copy5y.shape(), VariableSubset::all(5), 5);
    CHECK(rsi(copy5y, VariableSubset::all(5), 5) == Approx(crb.upper).margin(1e-12));
    auto par5 = gen_parity_target(5);
    auto prb = rsi_bounds(par5.shape(), VariableSubset::all(5), 5);
    CHECK(rsi(par5, VariableSubset::all(5), 5) == Approx(prb.lower).margin(1e-12));
  }
}

TEST_CASE("interaction-information chain rule") {
  for (auto& d : testsup::random_corpus(20, true)) {
    std::size_t n = d.shape().var_count();
    VariableSubset a{0}, b{1}, c{2}, rest;
    std::vector<std::size_t> tail;
    for (std::size_t i = 3; i < n; ++i) tail.push_back(i);
    rest = VariableSubset(std::move(tail));
    CHECK(chain_rule_residual(d, a, b, c, rest) < 1e-9);
    CHECK(chain_rule_residual(d, a, b, c, {}) < 1e-12);
  }
  auto copy4 = gen_copy(4, false);
  CHECK(chain_rule_residual(copy4, {0}, {1}, {2}, {3}) < 1e-9);
}

TEST_CASE("metric report") {
  auto copy4 = gen_copy(4, false);
  auto r = compute_report(copy4, VariableSubset::all(4), std::nullopt);
  CHECK(r.o_info == Approx(2.0).margin(1e-12));
  CHECK_FALSE(r.rsi.has_value());
  REQUIRE(r.interaction_info.has_value());
  for (const auto& [name, residual] : r.residuals) {
    INFO(name);
    CHECK(residual < 1e-9);
    CHECK(residual >= 0.0);
  }

  auto par3 = gen_parity_target(3);
  auto rt = compute_report(par3, VariableSubset::all(3), 3);
  REQUIRE(rt.rsi.has_value());
  CHECK(*rt.rsi == Approx(-1.0).margin(1e-12));
  CHECK(rt.residuals.at("rsi_conditional_tc") < 1e-9);

  // single variable: nothing higher-order to report
  auto single = JointDistribution::make(SystemShape::make({{"X1", 2}}), {0.5, 0.5});
  auto rs = compute_report(single, VariableSubset::all(1), std::nullopt);
  CHECK(rs.tc == 0.0);
  CHECK(rs.dtc == 0.0);
  CHECK(rs.o_info == 0.0);
  CHECK(rs.residuals.empty());
}

TEST_CASE("metrics in nats scale by log 2") {
  auto copy5 = gen_copy(5, false);
  double omega_bits = o_information(copy5, VariableSubset::all(5));
  double omega_nats = o_information(copy5, VariableSubset::all(5), log_base_nats);
  CHECK(omega_nats == Approx(omega_bits * std::log(2.0)).margin(1e-12));
}
