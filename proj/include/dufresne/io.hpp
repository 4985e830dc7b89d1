#pragma once

// JSON and CSV serialization of laws, models, root sets and tables.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "dufresne/errors.hpp"
#include "dufresne/law.hpp"
#include "dufresne/param_solver.hpp"
#include "dufresne/stationary.hpp"
#include "json.hpp"

namespace dufresne {

/// Integer text when |x - round(x)| <= 1e-12, else 17 significant digits.
inline std::string format_number(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-12 && std::abs(r) < 9.0e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", r == 0.0 ? 0.0 : r);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline nlohmann::json complex_list_json(const std::vector<complex>& values) {
  nlohmann::json out = nlohmann::json::array();
  for (const complex& z : values) out.push_back({z.real(), z.imag()});
  return out;
}

inline std::vector<complex> complex_list_from_json(const nlohmann::json& j) {
  std::vector<complex> out;
  for (const auto& item : j) {
    if (item.is_number()) {
      out.emplace_back(item.get<double>(), 0.0);
    } else if (item.is_array() && item.size() == 2) {
      out.emplace_back(item[0].get<double>(), item[1].get<double>());
    } else {
      throw parameter_error("expected a number or a [re, im] pair");
    }
  }
  return out;
}

inline nlohmann::json to_json(const Law& law) {
  return {{"num", complex_list_json(law.numerator())},
          {"den", complex_list_json(law.denominator())},
          {"gamma", law.gamma_shapes()}};
}

inline Law law_from_json(const nlohmann::json& j) {
  std::vector<double> gamma;
  if (j.contains("gamma")) gamma = j.at("gamma").get<std::vector<double>>();
  return Law(complex_list_from_json(j.at("num")), complex_list_from_json(j.at("den")), gamma);
}

inline constexpr int serialized_moment_count = 20;

inline nlohmann::json to_json(const StationaryModel& model) {
  nlohmann::json j;
  j["spec"] = {{"alphas", model.spec.alphas}, {"u", model.spec.u}};
  j["law"] = model.law ? to_json(*model.law) : nlohmann::json(nullptr);
  j["rho"] = model.rho ? nlohmann::json(*model.rho) : nlohmann::json(nullptr);
  if (model.roots) {
    j["roots"] = complex_list_json(model.roots->roots);
    j["root_method"] = to_string(model.roots->method);
    j["root_residuals"] = model.roots->residuals;
    j["root_notes"] = model.roots->notes;
  } else {
    j["roots"] = nullptr;
  }
  std::vector<double> moments;
  for (int n = 1; n <= serialized_moment_count && n < static_cast<int>(model.moments.size()); ++n)
    moments.push_back(model.moments[n]);
  j["moments"] = moments;
  return j;
}

/// Rebuilds a model from its JSON form. Oracle moments are recomputed from
/// the spec; the law and roots are taken as written.
inline StationaryModel model_from_json(const nlohmann::json& j, int moment_count = default_moment_count) {
  StationaryModel model;
  const auto& spec = j.at("spec");
  model.spec = ChainSpec(spec.at("alphas").get<std::vector<double>>(), spec.at("u").get<double>());
  model.moments = moment_oracle(model.spec, moment_count);
  if (j.contains("law") && !j.at("law").is_null()) model.law = law_from_json(j.at("law"));
  if (j.contains("rho") && !j.at("rho").is_null()) model.rho = j.at("rho").get<double>();
  if (j.contains("roots") && !j.at("roots").is_null()) {
    RootSet roots;
    roots.roots = complex_list_from_json(j.at("roots"));
    if (j.contains("root_residuals")) roots.residuals = j.at("root_residuals").get<std::vector<double>>();
    if (j.contains("root_notes")) roots.notes = j.at("root_notes").get<std::string>();
    model.roots = std::move(roots);
  }
  return model;
}

/// `kind,re,im,radius`: one `root` row per root, plus a `center` row when
/// every alpha is equal (roots then lie on |c - (alpha+1)| = alpha).
inline std::string roots_csv(std::span<const double> alphas, const RootSet& roots) {
  std::string out = "kind,re,im,radius\n";
  for (const complex& z : roots.roots)
    out += "root," + format_number(z.real()) + "," + format_number(z.imag()) + ",\n";
  bool equal = !alphas.empty();
  for (double a : alphas) equal = equal && a == alphas.front();
  if (equal) {
    const double a = alphas.front();
    out += "center," + format_number(a + 1.0) + ",0," + format_number(a) + "\n";
  }
  return out;
}

inline nlohmann::json roots_json(std::span<const double> alphas, const RootSet& roots) {
  nlohmann::json j;
  j["alphas"] = std::vector<double>(alphas.begin(), alphas.end());
  j["roots"] = complex_list_json(roots.roots);
  j["method"] = to_string(roots.method);
  j["residuals"] = roots.residuals;
  j["notes"] = roots.notes;
  bool equal = !alphas.empty();
  for (double a : alphas) equal = equal && a == alphas.front();
  if (equal) j["circle"] = {{"center", {alphas.front() + 1.0, 0.0}}, {"radius", alphas.front()}};
  return j;
}

/// Rows n = 0..rows of the all-ones parameter polynomial coefficients
/// (degree n, leading coefficient first), ragged rows padded with empty cells.
inline std::vector<std::vector<long long>> coefficient_table(int rows) {
  if (rows < 0 || rows > 20) throw domain_error("coefficient_table: rows must lie in [0, 20]");
  std::vector<std::vector<long long>> table;
  for (int n = 0; n <= rows; ++n) table.push_back(integer_parameter_polynomial(n + 1, 1));
  return table;
}

inline std::string table_csv(const std::vector<std::vector<long long>>& table) {
  const std::size_t width = table.empty() ? 0 : table.back().size();
  std::string out = "n";
  for (std::size_t c = 0; c < width; ++c) out += ",a" + std::to_string(c);
  out += "\n";
  for (std::size_t n = 0; n < table.size(); ++n) {
    out += std::to_string(n);
    for (std::size_t c = 0; c < width; ++c) out += c < table[n].size() ? "," + std::to_string(table[n][c]) : ",";
    out += "\n";
  }
  return out;
}

inline std::string samples_csv(const std::vector<double>& samples) {
  std::string out = "x\n";
  char buf[40];
  for (double x : samples) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x);
    out += buf;
  }
  return out;
}

}  // namespace dufresne
