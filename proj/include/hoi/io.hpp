#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hoi/distribution.hpp"
#include "hoi/estimation.hpp"
#include "hoi/metrics.hpp"

// File formats.
//
// Distribution (JSON): {"variables": [{"name", "cardinality"}...],
// "target": <name, optional>, "probs": [..]} with probs row-major, last
// variable fastest. Unknown keys are rejected. Probabilities are written
// with 17 significant digits, which round-trips doubles exactly and keeps
// seeded outputs byte-identical.
//
// Samples (CSV): header row of variable names, then one row of integer
// symbols per observation.
//
// Sweep (CSV): m, trial, seed, glrt_per_m, plugin, analytic, abs_error.

namespace hoi {

inline std::string units_name(double base) { return base == log_base_nats ? "nats" : "bits"; }

namespace detail {

inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

inline std::string distribution_to_json(const JointDistribution& dist) {
  const SystemShape& shape = dist.shape();
  std::ostringstream out;
  out << "{\n  \"variables\": [\n";
  for (std::size_t i = 0; i < shape.var_count(); ++i) {
    out << "    {\"name\": \"" << detail::json_escape(shape.var(i).name)
        << "\", \"cardinality\": " << shape.var(i).cardinality << "}";
    out << (i + 1 < shape.var_count() ? ",\n" : "\n");
  }
  out << "  ],\n";
  if (shape.target())
    out << "  \"target\": \"" << detail::json_escape(shape.var(*shape.target()).name) << "\",\n";
  out << "  \"probs\": [";
  for (std::size_t s = 0; s < dist.state_count(); ++s) {
    if (s % 8 == 0) out << "\n    ";
    out << detail::format_g17(dist[s]);
    if (s + 1 < dist.state_count()) out << ", ";
  }
  out << "\n  ]\n}\n";
  return out.str();
}

inline JointDistribution distribution_from_json(const std::string& text,
                                                std::size_t state_cap = default_state_cap) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(Errc::parse_error, "distribution file must be a JSON object");
  for (const auto& item : doc.items()) {
    if (item.key() != "variables" && item.key() != "target" && item.key() != "probs")
      fail(Errc::parse_error, "unknown key '" + item.key() + "' in distribution file");
  }
  if (!doc.contains("variables") || !doc["variables"].is_array() || doc["variables"].empty())
    fail(Errc::parse_error, "distribution file needs a non-empty 'variables' array");
  if (!doc.contains("probs") || !doc["probs"].is_array())
    fail(Errc::parse_error, "distribution file needs a 'probs' array");

  std::vector<Variable> vars;
  for (const auto& v : doc["variables"]) {
    if (!v.is_object()) fail(Errc::parse_error, "each variable must be an object");
    for (const auto& item : v.items()) {
      if (item.key() != "name" && item.key() != "cardinality")
        fail(Errc::parse_error, "unknown key '" + item.key() + "' in variable entry");
    }
    if (!v.contains("name") || !v["name"].is_string() || !v.contains("cardinality") ||
        !v["cardinality"].is_number_unsigned())
      fail(Errc::parse_error, "variable entries need a string name and unsigned cardinality");
    vars.push_back({v["name"].get<std::string>(), v["cardinality"].get<std::size_t>()});
  }

  std::optional<std::size_t> target;
  if (doc.contains("target")) {
    if (!doc["target"].is_string()) fail(Errc::parse_error, "'target' must be a variable name");
    std::string name = doc["target"].get<std::string>();
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].name == name) target = i;
    if (!target) fail(Errc::bad_target, "target '" + name + "' is not a variable");
  }

  std::vector<double> probs;
  probs.reserve(doc["probs"].size());
  for (const auto& p : doc["probs"]) {
    if (!p.is_number()) fail(Errc::parse_error, "'probs' entries must be numbers");
    probs.push_back(p.get<double>());
  }

  return JointDistribution::make(SystemShape::make(std::move(vars), target, state_cap),
                                 std::move(probs));
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::parse_error, "cannot open '" + path + "' for writing");
  out << text;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::parse_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string samples_to_csv(const SampleSet& samples) {
  const SystemShape& shape = samples.shape();
  std::ostringstream out;
  for (std::size_t i = 0; i < shape.var_count(); ++i)
    out << shape.var(i).name << (i + 1 < shape.var_count() ? "," : "\n");
  for (std::size_t r = 0; r < samples.size(); ++r) {
    for (std::size_t i = 0; i < shape.var_count(); ++i)
      out << samples.symbol(r, i) << (i + 1 < shape.var_count() ? "," : "\n");
  }
  return out.str();
}

// Parses a samples CSV against the given cardinalities; variable names come
// from the header row. Reports the 1-based data row in every error.
inline SampleSet samples_from_csv(const std::string& text,
                                  const std::vector<std::size_t>& cardinalities,
                                  const std::optional<std::string>& target_name = std::nullopt) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(Errc::parse_error, "samples file is empty");
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();

  std::vector<Variable> vars;
  {
    std::istringstream header(line);
    std::string name;
    std::size_t i = 0;
    while (std::getline(header, name, ',')) {
      if (i >= cardinalities.size())
        fail(Errc::parse_error, "header has more columns than cardinalities given");
      vars.push_back({name, cardinalities[i]});
      ++i;
    }
    if (i != cardinalities.size())
      fail(Errc::parse_error, "header has fewer columns than cardinalities given");
  }

  std::optional<std::size_t> target;
  if (target_name) {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].name == *target_name) target = i;
    if (!target) fail(Errc::bad_target, "target '" + *target_name + "' is not a column");
  }
  SystemShape shape = SystemShape::make(std::move(vars), target);

  std::vector<int> data;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::istringstream cells(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(cells, cell, ',')) {
      if (col >= shape.var_count())
        fail(Errc::parse_error, "row " + std::to_string(row) + " has too many columns");
      int value = 0;
      try {
        std::size_t used = 0;
        value = std::stoi(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail(Errc::parse_error, "row " + std::to_string(row) + ": bad symbol '" + cell + "'");
      }
      if (value < 0 || static_cast<std::size_t>(value) >= shape.var(col).cardinality)
        fail(Errc::invalid_symbol, "row " + std::to_string(row) + ": symbol " +
                                       std::to_string(value) + " out of range for '" +
                                       shape.var(col).name + "'");
      data.push_back(value);
      ++col;
    }
    if (col != shape.var_count())
      fail(Errc::parse_error, "row " + std::to_string(row) + " has too few columns");
  }
  if (row == 0) fail(Errc::parse_error, "samples file has no data rows");
  return SampleSet::make(std::move(shape), std::move(data));
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "m,trial,seed,glrt_per_m,plugin,analytic,abs_error\n";
  for (const auto& r : rows) {
    out << r.m << ',' << r.trial << ',' << r.seed << ',' << detail::format_g17(r.glrt_per_m)
        << ',' << detail::format_g17(r.plugin) << ',' << detail::format_g17(r.analytic) << ','
        << detail::format_g17(r.abs_error) << '\n';
  }
  return out.str();
}

inline nlohmann::json report_to_json(const MetricReport& report) {
  nlohmann::json j;
  j["tc"] = report.tc;
  j["dtc"] = report.dtc;
  j["o_info"] = report.o_info;
  if (report.interaction_info) j["interaction_info"] = *report.interaction_info;
  if (report.rsi) j["rsi"] = *report.rsi;
  j["residuals"] = nlohmann::json::object();
  for (const auto& [name, value] : report.residuals) j["residuals"][name] = value;
  j["units"] = units_name(report.log_base);
  return j;
}

inline nlohmann::json glrt_to_json(const GlrtResult& r) {
  nlohmann::json j;
  j["m"] = r.m;
  j["lambda_t_per_m"] = r.lambda_t_per_m;
  j["lambda_h_per_m"] = r.lambda_h_per_m;
  j["glrt_per_m"] = r.glrt_per_m;
  j["plugin_metric"] = r.plugin_metric;
  j["units"] = units_name(r.log_base);
  return j;
}

}  // namespace hoi
