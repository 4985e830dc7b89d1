#pragma once

// Command-line front end: solve, verify, simulate, shotnoise, roots, table,
// identities. Exit codes: 0 success, 1 failed check or runtime error,
// 2 usage error.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dufresne/errors.hpp"
#include "dufresne/io.hpp"
#include "dufresne/law.hpp"
#include "dufresne/param_solver.hpp"
#include "dufresne/shotnoise.hpp"
#include "dufresne/stationary.hpp"
#include "dufresne/verifier.hpp"
#include "json.hpp"

namespace dufresne::cli {

enum class Format { json, csv };

struct RunConfig {
  std::string command;
  std::vector<double> alphas;
  double u = 1.0;
  int steps = 200;
  std::size_t replicas = 100000;
  int cycles = 200;
  std::uint64_t seed = 0;
  double lambda = 1.0;
  std::vector<double> decays;
  std::optional<double> tol;
  std::vector<double> s_grid{0.1, 0.25, 0.5};
  int rows = 10;
  std::optional<Format> format;
  std::string out;
  bool paper_convention = false;
  std::vector<std::string> checks;
  std::string model;
};

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Worker count from DUFRESNE_THREADS (0 or unset: hardware concurrency).
inline unsigned env_threads() {
  const char* v = std::getenv("DUFRESNE_THREADS");
  if (v == nullptr) return 0;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  return (end == v || *end != '\0') ? 0u : static_cast<unsigned>(n);
}

namespace detail {

inline void require_positive(const std::vector<double>& values, const char* flag) {
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v)) throw usage_error(std::string(flag) + " values must be positive");
}

inline void validate(const RunConfig& c) {
  const std::string& cmd = c.command;
  const bool needs_alphas = cmd == "solve" || cmd == "simulate" || cmd == "roots";
  if (needs_alphas && c.alphas.empty()) throw usage_error("--alphas is required for " + cmd);
  require_positive(c.alphas, "--alphas");
  require_positive(c.decays, "--decays");
  if (!(c.u > 0.0) || !std::isfinite(c.u)) throw usage_error("--u must be positive");
  if (!(c.lambda > 0.0)) throw usage_error("--lambda must be positive");
  if (c.steps < 1) throw usage_error("--steps must be >= 1");
  if (c.replicas < 1) throw usage_error("--replicas must be >= 1");
  if (c.tol && !(*c.tol > 0.0)) throw usage_error("--tol must be positive");
  if (c.rows < 0 || c.rows > 20) throw usage_error("--rows must lie in [0, 20]");
  for (double s : c.s_grid)
    if (!(s > 0.0 && s <= 0.9)) throw usage_error("--s-grid values must lie in (0, 0.9]");
  if (cmd == "verify") {
    if (c.model.empty() == c.alphas.empty()) throw usage_error("verify needs exactly one of --alphas or --model");
    for (const auto& name : c.checks)
      if (name != "moments" && name != "functional" && name != "identities" && name != "density")
        throw usage_error("unknown check: " + name);
  }
  if (cmd == "shotnoise") {
    if (c.decays.empty()) throw usage_error("--decays is required for shotnoise");
    if (c.cycles < 100) throw usage_error("--cycles must be >= 100");
  }
  if ((cmd == "simulate" || cmd == "shotnoise") && c.format != Format::csv && c.replicas < 1000)
    throw usage_error("reports need --replicas >= 1000");
  if (cmd == "roots" && c.u != 1.0) throw usage_error("roots requires --u 1");
}

inline std::string json_line(const nlohmann::json& j) { return j.dump() + "\n"; }

struct Output {
  std::string text;
  int code = 0;
};

inline std::vector<VerificationReport> identity_reports(std::optional<double> tol) {
  std::vector<VerificationReport> out;
  const std::vector<std::pair<double, double>> grid{{1.0, 1.0}, {2.0, 3.0}, {0.8, 1.7}};
  for (auto [a, b] : grid)
    for (int n = 1; n <= 15; ++n) out.push_back(check_u2_moment_identity(a, b, n, tol.value_or(1e-10)));
  const std::vector<std::array<double, 3>> integral{{1.0, 1.0, 0.5}, {2.0, 3.0, 0.2}, {0.8, 1.7, 0.6}};
  for (auto [a, b, s] : integral) out.push_back(check_u2_integral_identity(a, b, s, tol.value_or(1e-6)));
  for (double a : {1.0, 2.0, 0.5})
    for (int r : {0, 2, 4}) out.push_back(check_binomial_identity(a, 6, r));
  return out;
}

inline std::vector<VerificationReport> density_reports(std::optional<double> tol,
                                                       const std::vector<std::pair<double, double>>& grid) {
  std::vector<VerificationReport> out;
  for (auto [a, b] : grid) out.push_back(check_whittaker_density(a, b, tol.value_or(1e-5)));
  return out;
}

inline std::vector<VerificationReport> model_reports(const StationaryModel& model, const RunConfig& c) {
  std::vector<std::string> checks = c.checks;
  if (checks.empty()) checks = {"moments", "functional"};
  std::vector<VerificationReport> out;
  const ChainSpec& spec = model.spec;
  for (const auto& name : checks) {
    if (name == "moments") {
      if (model.law) {
        out.push_back(check_moments(*model.law, spec, 20, c.tol.value_or(1e-9)));
      } else {
        VerificationReport r;
        r.check_name = "moments";
        r.inputs = {{"spec", dufresne::detail::spec_json(spec)}};
        r.notes = "no closed-form law for this (u, k); oracle moments only";
        out.push_back(r);
      }
    } else if (name == "functional") {
      if (spec.k() <= 4) {
        out.push_back(check_functional_eq(model, c.s_grid, c.tol.value_or(spec.k() <= 2 ? 1e-6 : 1e-5)));
      } else {
        VerificationReport r;
        r.check_name = "functional_equation";
        r.inputs = {{"spec", dufresne::detail::spec_json(spec)}};
        r.notes = "tensor quadrature limited to k <= 4";
        out.push_back(r);
      }
      out.push_back(check_ode(model, c.s_grid, c.tol.value_or(1e-5)));
    } else if (name == "identities") {
      for (auto& r : identity_reports(c.tol)) out.push_back(std::move(r));
    } else if (name == "density") {
      std::vector<std::pair<double, double>> grid{{1.0, 1.0}, {1.0, 2.0}, {2.5, 0.8}};
      if (spec.k() == 2 && spec.u == 1.0) grid = {{spec.alphas[0], spec.alphas[1]}};
      for (auto& r : density_reports(c.tol, grid)) out.push_back(std::move(r));
    }
  }
  return out;
}

inline Output emit_reports(const std::vector<VerificationReport>& reports) {
  Output o;
  for (const auto& r : reports) {
    o.text += json_line(to_json(r));
    if (r.failed()) o.code = 1;
  }
  return o;
}

inline nlohmann::json sim_summary(const SimReport& report, const nlohmann::json& extra) {
  nlohmann::json j = to_json(report);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  j["max_abs_z"] = report.max_abs_z();
  j["consistent"] = report.max_abs_z() < 5.0 && report.ks_passed();
  return j;
}

inline SimReport compare_to_model(const std::vector<double>& samples, const StationaryModel& model,
                                  std::uint64_t seed) {
  // reference draws use a stream disjoint from every replica stream
  const std::uint64_t reference_seed = Stream::derive(seed, ~std::uint64_t{0}).next();
  if (model.law) return compare(samples, *model.law, reference_seed);
  return compare(samples, model.moments);
}

inline Output command_solve(const RunConfig& c) {
  const StationaryModel model = solve_stationary(ChainSpec(c.alphas, c.u));
  if (c.format == Format::csv) {
    std::string text = "n,moment\n";
    for (int n = 1; n <= serialized_moment_count; ++n)
      text += std::to_string(n) + "," + format_number(model.moments[n]) + "\n";
    return {text, 0};
  }
  return {json_line(to_json(model)), 0};
}

inline Output command_verify(const RunConfig& c, std::istream& in) {
  StationaryModel model;
  if (!c.model.empty()) {
    nlohmann::json j;
    try {
      if (c.model == "-") {
        j = nlohmann::json::parse(in);
      } else {
        std::ifstream file(c.model);
        if (!file) throw usage_error("cannot open model file: " + c.model);
        j = nlohmann::json::parse(file);
      }
    } catch (const nlohmann::json::exception& e) {
      throw usage_error(std::string("malformed model JSON: ") + e.what());
    }
    model = model_from_json(j);
  } else {
    model = solve_stationary(ChainSpec(c.alphas, c.u));
  }
  return emit_reports(model_reports(model, c));
}

inline Output command_simulate(const RunConfig& c) {
  const ChainSpec spec(c.alphas, c.u);
  const auto samples = simulate_chain(spec, c.steps, c.replicas, c.seed, env_threads());
  if (c.format == Format::csv) return {samples_csv(samples), 0};
  const StationaryModel model = solve_stationary(spec);
  const SimReport report = compare_to_model(samples, model, c.seed);
  nlohmann::json extra{{"spec", dufresne::detail::spec_json(spec)}, {"steps", c.steps}, {"seed", c.seed}};
  return {json_line(sim_summary(report, extra)), 0};
}

inline Output command_shotnoise(const RunConfig& c) {
  ShotNoiseConfig config;
  config.lambda = c.lambda;
  config.decays = c.decays;
  config.b_shape = c.u;
  config.cycles = c.cycles;
  config.seed = c.seed;
  config.replicas = c.replicas;
  const auto samples = simulate_triggered(config, env_threads());
  if (c.format == Format::csv) return {samples_csv(samples), 0};
  const ChainSpec spec = config.chain_spec(c.paper_convention);
  const StationaryModel model = solve_stationary(spec);
  const SimReport report = compare_to_model(samples, model, c.seed);
  nlohmann::json extra{{"lambda", c.lambda},
                       {"decays", c.decays},
                       {"b_shape", c.u},
                       {"cycles", c.cycles},
                       {"seed", c.seed},
                       {"alpha_mapping", c.paper_convention ? "p/lambda" : "lambda/p"},
                       {"spec", dufresne::detail::spec_json(spec)}};
  return {json_line(sim_summary(report, extra)), 0};
}

inline Output command_roots(const RunConfig& c) {
  const RootSet roots = solve_c(c.alphas);
  if (c.format == Format::csv) return {roots_csv(c.alphas, roots), 0};
  return {json_line(roots_json(c.alphas, roots)), 0};
}

inline Output command_table(const RunConfig& c) {
  const auto table = coefficient_table(c.rows);
  if (c.format == Format::json) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t n = 0; n < table.size(); ++n) rows.push_back({{"n", n}, {"coefficients", table[n]}});
    return {json_line({{"rows", rows}}), 0};
  }
  return {table_csv(table), 0};
}

inline Output command_identities(const RunConfig& c) {
  auto reports = identity_reports(c.tol);
  for (auto& r : density_reports(c.tol, {{1.0, 1.0}, {1.0, 2.0}, {2.5, 0.8}})) reports.push_back(std::move(r));
  return emit_reports(reports);
}

inline void add_common(CLI::App* sub, RunConfig& c, const std::vector<std::string>& flags) {
  auto has = [&](const char* f) { return std::find(flags.begin(), flags.end(), f) != flags.end(); };
  if (has("alphas")) sub->add_option("--alphas", c.alphas, "positive parameters a1,a2,...")->delimiter(',');
  if (has("u")) sub->add_option("--u", c.u, "gamma shape of B");
  if (has("steps")) sub->add_option("--steps", c.steps, "chain steps");
  if (has("replicas")) sub->add_option("--replicas", c.replicas, "independent replicas");
  if (has("cycles")) sub->add_option("--cycles", c.cycles, "triggered cycles per replica");
  if (has("seed")) sub->add_option("--seed", c.seed, "master seed");
  if (has("lambda")) sub->add_option("--lambda", c.lambda, "Poisson rate");
  if (has("decays")) sub->add_option("--decays", c.decays, "decay rates p1,...")->delimiter(',');
  if (has("tol")) sub->add_option("--tol", c.tol, "override check tolerance");
  if (has("s-grid")) sub->add_option("--s-grid", c.s_grid, "Laplace grid s1,...")->delimiter(',');
  if (has("rows")) sub->add_option("--rows", c.rows, "last table row");
  if (has("paper-convention"))
    sub->add_flag("--paper-convention", c.paper_convention, "map decays to alphas as p/lambda");
  if (has("checks")) sub->add_option("--checks", c.checks, "moments,functional,identities,density")->delimiter(',');
  if (has("model")) sub->add_option("--model", c.model, "model JSON path, or - for standard input");
  sub->add_option_function<std::string>(
      "--format",
      [&c](const std::string& f) {
        if (f == "json") c.format = Format::json;
        else if (f == "csv") c.format = Format::csv;
        else throw CLI::ValidationError("--format", "expected json or csv");
      },
      "json or csv");
  sub->add_option("--out", c.out, "output path (default standard output)");
}

}  // namespace detail

/// Runs one command; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Stationary laws of beta-gamma affine chains", "dufresne"};
  app.require_subcommand(1, 1);
  struct Command {
    const char* name;
    const char* help;
    std::vector<std::string> flags;
  };
  const std::vector<Command> commands{
      {"solve", "closed-form stationary law as JSON", {"alphas", "u"}},
      {"verify", "run checks, one JSON report per line", {"alphas", "u", "tol", "s-grid", "checks", "model"}},
      {"simulate", "Monte Carlo of the chain", {"alphas", "u", "steps", "replicas", "seed"}},
      {"shotnoise",
       "triggered shot noise sampled at cycle ends",
       {"lambda", "decays", "u", "cycles", "replicas", "seed", "paper-convention"}},
      {"roots", "denominator parameters for u = 1", {"alphas", "u"}},
      {"table", "integer coefficient table for all-ones parameters", {"rows"}},
      {"identities", "hypergeometric and density identities over a fixed grid", {"tol"}},
  };
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    detail::add_common(sub, c, cmd.flags);
    sub->callback([&c, name = std::string(cmd.name)] { c.command = name; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  if (!c.format) c.format = c.command == "table" ? Format::csv : Format::json;
  detail::Output result;
  try {
    detail::validate(c);
    if (c.command == "solve") result = detail::command_solve(c);
    else if (c.command == "verify") result = detail::command_verify(c, in);
    else if (c.command == "simulate") result = detail::command_simulate(c);
    else if (c.command == "shotnoise") result = detail::command_shotnoise(c);
    else if (c.command == "roots") result = detail::command_roots(c);
    else if (c.command == "table") result = detail::command_table(c);
    else result = detail::command_identities(c);
  } catch (const usage_error& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (c.out.empty() || c.out == "-") {
    out << result.text;
  } else {
    std::ofstream file(c.out, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << c.out << "\n";
      return 1;
    }
    file << result.text;
  }
  return result.code;
}

}  // namespace dufresne::cli
