// Command-line front end: generate synthetic systems, compute metric
// reports, verify the identity suite, and run GLRT estimation and
// convergence sweeps over files.
//
// Machine-readable output (JSON, or CSV for file outputs) goes to stdout;
// human-readable tables go to stderr under --verbose. Exit codes: 0 on
// success / all checks passing, 1 when an identity or tolerance check
// fails, 2 on input errors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hoi/hoi.hpp"

namespace {

struct GlobalOpts {
  std::string base_name = "2";
  double tol = 1e-9;
  std::uint64_t seed = 0;
  bool verbose = false;

  double base() const { return base_name == "e" ? hoi::log_base_nats : hoi::log_base_bits; }
};

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (item.empty()) hoi::fail(hoi::Errc::parse_error, std::string("empty entry in ") + what);
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
      value = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size())
      hoi::fail(hoi::Errc::parse_error, std::string("bad entry '") + item + "' in " + what);
    out.push_back(static_cast<std::size_t>(value));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) hoi::fail(hoi::Errc::parse_error, std::string(what) + " is empty");
  return out;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    out.push_back(text.substr(pos, comma == std::string::npos ? comma : comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path == "-")
    std::cout << text;
  else
    hoi::write_text_file(path, text);
}

hoi::SystemShape shape_from_cards(const std::vector<std::size_t>& cards,
                                  bool last_is_target) {
  std::vector<hoi::Variable> vars;
  for (std::size_t i = 0; i + (last_is_target ? 1 : 0) < cards.size(); ++i)
    vars.push_back({"X" + std::to_string(i + 1), cards[i]});
  std::optional<std::size_t> target;
  if (last_is_target) {
    if (cards.size() < 2)
      hoi::fail(hoi::Errc::invalid_argument, "targeted shape needs at least 2 entries");
    vars.push_back({"Y", cards.back()});
    target = cards.size() - 1;
  }
  return hoi::SystemShape::make(std::move(vars), target);
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenOpts {
  std::string system;
  std::size_t n = 0;
  bool with_target = false;
  std::string shape_text;
  std::string class_name;
  std::string out = "-";
};

int cmd_gen(const GlobalOpts& global, const GenOpts& opts) {
  hoi::JointDistribution dist = [&]() {
    if (opts.system == "copy") {
      if (opts.n < 2) hoi::fail(hoi::Errc::invalid_argument, "copy needs --n >= 2");
      return hoi::gen_copy(opts.n, opts.with_target);
    }
    if (opts.system == "xor") {
      if (opts.n < 2) hoi::fail(hoi::Errc::invalid_argument, "xor needs --n >= 2");
      return hoi::gen_xor(opts.n);
    }
    if (opts.system == "parity") {
      if (opts.n < 2) hoi::fail(hoi::Errc::invalid_argument, "parity needs --n >= 2");
      return hoi::gen_parity_target(opts.n);
    }
    if (opts.system == "random") {
      if (opts.shape_text.empty())
        hoi::fail(hoi::Errc::invalid_argument, "random needs --shape");
      auto cards = parse_size_list(opts.shape_text, "--shape");
      return hoi::gen_random(shape_from_cards(cards, opts.with_target), global.seed);
    }
    if (opts.system == "class-member") {
      if (opts.shape_text.empty() || opts.class_name.empty())
        hoi::fail(hoi::Errc::invalid_argument, "class-member needs --shape and --class");
      auto cards = parse_size_list(opts.shape_text, "--shape");
      bool targeted =
          opts.class_name == "tail-to-tail" || opts.class_name == "head-to-head";
      auto cls = hoi::ModelClass::parse(opts.class_name, shape_from_cards(cards, targeted));
      return hoi::gen_random_in_class(cls, global.seed);
    }
    hoi::fail(hoi::Errc::invalid_argument, "unknown system '" + opts.system + "'");
  }();

  // closed-form values exist for the canonical families
  const std::string units = hoi::units_name(global.base());
  double scale = global.base_name == "e" ? std::log(2.0) : 1.0;
  if (opts.system == "copy" && opts.with_target)
    std::cerr << "analytic: rsi = " << static_cast<double>(opts.n - 1) * scale << " " << units
              << "\n";
  else if (opts.system == "copy")
    std::cerr << "analytic: o_info = " << static_cast<double>(opts.n - 2) * scale << " "
              << units << "\n";
  else if (opts.system == "xor")
    std::cerr << "analytic: o_info = " << -static_cast<double>(opts.n - 2) * scale << " "
              << units << "\n";
  else if (opts.system == "parity")
    std::cerr << "analytic: rsi = " << -1.0 * scale << " " << units << "\n";

  emit(opts.out, hoi::distribution_to_json(dist));
  return 0;
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

struct MetricsOpts {
  std::string file;
  std::string sources_text;
  std::string target_name;
};

int cmd_metrics(const GlobalOpts& global, const MetricsOpts& opts) {
  auto dist = hoi::distribution_from_json(hoi::read_text_file(opts.file));
  const auto& shape = dist.shape();

  std::optional<std::size_t> target = shape.target();
  if (!opts.target_name.empty()) {
    target = shape.index_of(opts.target_name);
    if (!target)
      hoi::fail(hoi::Errc::bad_target, "no variable named '" + opts.target_name + "'");
  }

  hoi::VariableSubset sources;
  if (!opts.sources_text.empty()) {
    std::vector<std::size_t> idx;
    for (const auto& name : split_names(opts.sources_text)) {
      auto i = shape.index_of(name);
      if (!i) hoi::fail(hoi::Errc::invalid_subset, "no variable named '" + name + "'");
      idx.push_back(*i);
    }
    sources = hoi::VariableSubset(std::move(idx));
  } else if (target) {
    sources = hoi::VariableSubset{*target}.complement(shape.var_count());
  } else {
    sources = hoi::VariableSubset::all(shape.var_count());
  }

  auto report = hoi::compute_report(dist, sources, target, global.base());
  std::cout << hoi::report_to_json(report).dump(2) << "\n";

  bool ok = true;
  for (const auto& [name, residual] : report.residuals) {
    if (global.verbose)
      std::cerr << name << "  " << residual << (residual < global.tol ? "  ok" : "  FAIL")
                << "\n";
    if (residual >= global.tol) ok = false;
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// identities
// ---------------------------------------------------------------------------

struct IdentityRow {
  std::string name;
  double max_residual = 0.0;
  bool pass = true;
  bool gated = true;  // informational rows never affect the exit code
  std::string note;
};

class IdentityAccumulator {
 public:
  explicit IdentityAccumulator(double tol) : tol_(tol) {}

  void residual(const std::string& name, double value) {
    auto& row = row_for(name);
    row.max_residual = std::max(row.max_residual, std::abs(value));
    row.pass = row.pass && std::abs(value) < tol_;
  }

  void constraint(const std::string& name, bool ok, double magnitude) {
    auto& row = row_for(name);
    row.max_residual = std::max(row.max_residual, magnitude);
    row.pass = row.pass && ok;
  }

  void info(const std::string& name, double value, const std::string& note = {}) {
    auto& row = row_for(name);
    row.gated = false;
    row.max_residual = std::max(row.max_residual, std::abs(value));
    if (!note.empty()) row.note = note;
  }

  void note(const std::string& name, const std::string& text) { row_for(name).note = text; }

  const std::vector<IdentityRow>& rows() const { return rows_; }

  bool all_pass() const {
    for (const auto& r : rows_)
      if (r.gated && !r.pass) return false;
    return true;
  }

 private:
  IdentityRow& row_for(const std::string& name) {
    for (auto& r : rows_)
      if (r.name == name) return r;
    IdentityRow row;
    row.name = name;
    rows_.push_back(std::move(row));
    return rows_.back();
  }

  double tol_;
  std::vector<IdentityRow> rows_;
};

// Runs every identity that applies to one distribution and feeds the
// residuals into the accumulator.
void check_identities(const hoi::JointDistribution& dist, double base, IdentityAccumulator& acc) {
  using namespace hoi;
  const auto& shape = dist.shape();
  const std::size_t n_all = shape.var_count();
  std::optional<std::size_t> target = shape.target();
  VariableSubset sources =
      target ? VariableSubset{*target}.complement(n_all) : VariableSubset::all(n_all);
  const std::size_t n = sources.size();
  if (n < 2) return;

  double tc = total_correlation(dist, sources, base);
  double dtc = dual_total_correlation(dist, sources, base);
  double omega = o_information(dist, sources, base);

  acc.residual("oinfo_tc_dtc", omega - (tc - dtc));
  acc.residual("tc_mi_chain", tc - tc_via_mi_chain(dist, sources, base));
  acc.residual("dtc_mi_chain", dtc - dtc_via_mi_chain(dist, sources, base));
  if (n >= 3) {
    acc.residual("oinfo_cut_decomposition",
                 omega - o_info_via_decomposition(dist, sources, base));
    acc.residual("oinfo_rsi_chain",
                 omega - oinfo_via_rsi_chain(dist, sources, base));

    // interaction-information chain rule on the first three sources vs the rest
    const auto& idx = sources.indices();
    std::vector<std::size_t> tail(idx.begin() + 3, idx.end());
    acc.residual("chain_rule",
                 chain_rule_residual(dist, {idx[0]}, {idx[1]}, {idx[2]},
                                     VariableSubset(std::move(tail)), base));
  }
  if (n == 3) {
    const auto& idx = sources.indices();
    double v = rsi(dist, {idx[0], idx[1]}, idx[2], base);
    double iii = three_way_interaction(dist, {idx[0]}, {idx[1]}, {idx[2]}, base);
    acc.residual("three_variable_coincidence", omega - v);
    acc.residual("three_variable_coincidence", omega - iii);
  }

  auto ob = o_information_bounds(shape, sources, base);
  acc.constraint("oinfo_bounds",
                 omega <= ob.upper + 1e-9 && omega >= ob.lower - 1e-9,
                 std::max(0.0, std::max(omega - ob.upper, ob.lower - omega)));
  if (std::abs(omega - ob.upper) < 1e-9 || std::abs(omega - ob.lower) < 1e-9)
    acc.note("oinfo_bounds", "attained");

  if (target) {
    double v = rsi(dist, sources, *target, base);
    acc.residual("rsi_conditional_tc",
                 v - (tc - conditional_total_correlation(dist, sources, {*target}, base)));
    acc.residual("rsi_cut_decomposition",
                 v - rsi_via_decomposition(dist, sources, *target, base));
    acc.residual("rsi_via_oinfo", v - rsi_via_oinfo(dist, sources, *target, base));

    auto rb = rsi_bounds(shape, sources, *target, base);
    acc.constraint("rsi_bounds", v <= rb.upper + 1e-9 && v >= rb.lower - 1e-9,
                   std::max(0.0, std::max(v - rb.upper, rb.lower - v)));
    if (std::abs(v - rb.upper) < 1e-9 || std::abs(v - rb.lower) < 1e-9)
      acc.note("rsi_bounds", "attained");

    // projection route of the RSI (difference of real KL divergences)
    auto ph = project(dist, ModelClass::head_to_head(shape), base);
    auto pt = project(dist, ModelClass::tail_to_tail(shape), base);
    acc.residual("rsi_projection_difference",
                 (kl_divergence(dist, ph.projected, base) -
                  kl_divergence(dist, pt.projected, base)) -
                     v);
  }

  if (n_all >= 3) {
    // K-class cuts over all variables: per-cut terms and their sum
    auto everything = VariableSubset::all(n_all);
    double omega_all = o_information(dist, everything, base);
    double sum = 0.0;
    double truncated = 0.0;
    for (std::size_t cut = 2; cut + 1 <= n_all; ++cut) {
      auto kt = project(dist, ModelClass::k_tail(shape, cut), base);
      auto kh = project(dist, ModelClass::k_head(shape, cut), base);
      double diff = kl_divergence(dist, kh.projected, base) - kl_divergence(dist, kt.projected, base);
      std::vector<std::size_t> head, tail;
      for (std::size_t i = 0; i + 1 < cut; ++i) head.push_back(i);
      for (std::size_t i = cut; i < n_all; ++i) tail.push_back(i);
      acc.residual("kclass_per_cut",
                   diff - three_way_interaction(dist, VariableSubset(std::move(head)),
                                                {cut - 1}, VariableSubset(std::move(tail)),
                                                base));
      sum += diff;
      if (cut + 2 <= n_all) truncated += diff;
    }
    acc.residual("kclass_cut_sum", sum - omega_all);
    acc.info("kclass_truncated_sum", truncated - omega_all,
             "partial sum over cuts j=2..n-2; the full range j=2..n-1 is the identity");
  }
}

// The class-sign rows need genuine class members.
void check_class_signs(const hoi::SystemShape& shape, std::uint64_t seed, double base,
                  IdentityAccumulator& acc) {
  using namespace hoi;
  std::size_t t = *shape.target();
  VariableSubset sources = VariableSubset{t}.complement(shape.var_count());

  auto tail = gen_random_in_class(ModelClass::tail_to_tail(shape), seed);
  double v_t = rsi(tail, sources, t, base);
  acc.residual("tail_class_rsi_equality", v_t - total_correlation(tail, sources, base));
  acc.constraint("tail_class_rsi_sign", v_t >= -1e-10, std::max(0.0, -v_t));

  auto head = gen_random_in_class(ModelClass::head_to_head(shape), seed + 1);
  double v_h = rsi(head, sources, t, base);
  acc.residual("head_class_rsi_equality",
               v_h + conditional_total_correlation(head, sources, {t}, base));
  acc.constraint("head_class_rsi_sign", v_h <= 1e-10, std::max(0.0, v_h));
}

struct IdentitiesOpts {
  std::string file;
  std::size_t corpus = 0;
};

int cmd_identities(const GlobalOpts& global, const IdentitiesOpts& opts) {
  IdentityAccumulator acc(global.tol);

  if (opts.corpus > 0) {
    auto shapes = hoi::corpus_shapes(opts.corpus, true);
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      auto dist = hoi::gen_random(shapes[i], global.seed + i);
      check_identities(dist, global.base(), acc);
      check_class_signs(shapes[i], global.seed + 10000 + 2 * i, global.base(), acc);
    }
  } else {
    auto dist = hoi::distribution_from_json(hoi::read_text_file(opts.file));
    check_identities(dist, global.base(), acc);
  }

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : acc.rows()) {
    nlohmann::json row;
    row["name"] = r.name;
    row["max_residual"] = r.max_residual;
    row["pass"] = r.pass;
    row["gated"] = r.gated;
    if (!r.note.empty()) row["note"] = r.note;
    rows.push_back(row);
    if (global.verbose)
      std::cerr << (r.pass ? "  ok  " : " FAIL ") << r.name << "  " << r.max_residual
                << (r.note.empty() ? "" : "  [" + r.note + "]") << "\n";
  }
  nlohmann::json doc;
  doc["identities"] = rows;
  doc["tolerance"] = global.tol;
  doc["units"] = hoi::units_name(global.base());
  std::cout << doc.dump(2) << "\n";
  return acc.all_pass() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateOpts {
  std::string file;
  std::string shape_text;
  std::string target_name;
};

int cmd_estimate(const GlobalOpts& global, const EstimateOpts& opts) {
  auto cards = parse_size_list(opts.shape_text, "--shape");
  std::optional<std::string> target;
  if (!opts.target_name.empty()) target = opts.target_name;
  auto samples = hoi::samples_from_csv(hoi::read_text_file(opts.file), cards, target);
  auto result =
      target ? hoi::glrt_rsi(samples, global.base()) : hoi::glrt_oinfo(samples, global.base());
  std::cout << hoi::glrt_to_json(result).dump(2) << "\n";
  if (global.verbose)
    std::cerr << "glrt/m = " << result.glrt_per_m << ", plug-in = " << result.plugin_metric
              << " " << hoi::units_name(global.base()) << " over m = " << result.m << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOpts {
  std::string system;
  std::size_t n = 0;
  std::string m_grid_text = "100,1000,10000";
  std::size_t trials = 20;
  std::string out = "-";
};

int cmd_sweep(const GlobalOpts& global, const SweepOpts& opts) {
  hoi::JointDistribution truth = [&]() {
    if (opts.system == "copy") return hoi::gen_copy(opts.n, true);
    if (opts.system == "xor") return hoi::gen_xor(opts.n);
    if (opts.system == "parity") return hoi::gen_parity_target(opts.n);
    hoi::fail(hoi::Errc::invalid_argument, "unknown system '" + opts.system + "'");
  }();
  if (opts.trials < 1) hoi::fail(hoi::Errc::invalid_argument, "need at least one trial");

  auto m_grid = parse_size_list(opts.m_grid_text, "--m-grid");
  auto rows = hoi::convergence_sweep(truth, m_grid, opts.trials, global.seed, global.base());
  emit(opts.out, hoi::sweep_to_csv(rows));

  nlohmann::json medians = nlohmann::json::array();
  for (std::size_t m : m_grid) {
    std::vector<double> errors;
    for (const auto& r : rows)
      if (r.m == m) errors.push_back(r.abs_error);
    std::sort(errors.begin(), errors.end());
    double med = errors.size() % 2 == 1
                     ? errors[errors.size() / 2]
                     : 0.5 * (errors[errors.size() / 2 - 1] + errors[errors.size() / 2]);
    nlohmann::json entry;
    entry["m"] = m;
    entry["median_abs_error"] = med;
    medians.push_back(entry);
    if (global.verbose) std::cerr << "m = " << m << ": median error " << med << "\n";
  }
  if (opts.out != "-") {
    nlohmann::json doc;
    doc["medians"] = medians;
    doc["units"] = hoi::units_name(global.base());
    std::cout << doc.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed and undirected high-order interdependence metrics"};
  app.require_subcommand(1);

  GlobalOpts global;
  app.add_option("--base", global.base_name, "Logarithm base")
      ->check(CLI::IsMember({"2", "e"}))
      ->capture_default_str();
  app.add_option("--tol", global.tol, "Residual tolerance")->capture_default_str();
  app.add_option("--seed", global.seed, "Random seed")->capture_default_str();
  app.add_flag("--verbose", global.verbose, "Human-readable tables on stderr");

  GenOpts gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a distribution file");
  gen_cmd->fallthrough();
  gen_cmd->add_option("system", gen.system, "copy|xor|parity|random|class-member")->required();
  gen_cmd->add_option("--n", gen.n, "Number of source variables");
  gen_cmd->add_flag("--with-target", gen.with_target,
                    "copy: append an equal target Y; random: mark the last shape entry as Y");
  gen_cmd->add_option("--shape", gen.shape_text,
                      "Comma-separated cardinalities (last entry is Y for targeted classes)");
  gen_cmd->add_option("--class", gen.class_name,
                      "tail-to-tail|head-to-head|k-tail:<j>|k-head:<j>");
  gen_cmd->add_option("--out", gen.out, "Output file, - for stdout");

  MetricsOpts metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Metric report for a distribution file");
  metrics_cmd->fallthrough();
  metrics_cmd->add_option("file", metrics.file, "Distribution JSON file")->required();
  metrics_cmd->add_option("--sources", metrics.sources_text, "Comma-separated source names");
  metrics_cmd->add_option("--target", metrics.target_name, "Target variable name");

  IdentitiesOpts identities;
  auto* id_cmd = app.add_subcommand("identities", "Verify the identity suite");
  id_cmd->fallthrough();
  id_cmd->add_option("file", identities.file, "Distribution JSON file");
  id_cmd->add_option("--random-corpus", identities.corpus,
                     "Check k seeded random distributions instead of a file");

  EstimateOpts estimate;
  auto* est_cmd = app.add_subcommand("estimate", "GLRT estimate from a samples CSV");
  est_cmd->fallthrough();
  est_cmd->add_option("file", estimate.file, "Samples CSV file")->required();
  est_cmd->add_option("--shape", estimate.shape_text, "Comma-separated cardinalities")
      ->required();
  est_cmd->add_option("--target", estimate.target_name, "Target column name (RSI mode)");

  SweepOpts sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Convergence sweep over sample sizes");
  sweep_cmd->fallthrough();
  sweep_cmd->add_option("--system", sweep.system, "copy|xor|parity")->required();
  sweep_cmd->add_option("--n", sweep.n, "Number of source variables")->required();
  sweep_cmd->add_option("--m-grid", sweep.m_grid_text, "Comma-separated sample sizes")
      ->capture_default_str();
  sweep_cmd->add_option("--trials", sweep.trials, "Trials per grid point")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "Output CSV file, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(global, gen);
    if (metrics_cmd->parsed()) return cmd_metrics(global, metrics);
    if (id_cmd->parsed()) {
      if (identities.corpus == 0 && identities.file.empty())
        hoi::fail(hoi::Errc::invalid_argument, "identities needs a file or --random-corpus");
      return cmd_identities(global, identities);
    }
    if (est_cmd->parsed()) return cmd_estimate(global, estimate);
    if (sweep_cmd->parsed()) return cmd_sweep(global, sweep);
  } catch (const hoi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
