#include "sobdecomp/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sobdecomp/config.hpp"
#include "sobdecomp/harmonic.hpp"
#include "sobdecomp/report.hpp"
#include "sobdecomp/suites.hpp"

namespace sobdecomp {

namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("SOBDECOMP_LOG");
    if (env == nullptr) return LogLevel::Error;
    const std::string v(env);
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    return LogLevel::Error;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) {
    std::cerr << "[sobdecomp info] " << msg << "\n";
  }
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string csv_path;
  std::optional<std::uint64_t> seed_override;
  bool canonical = false;
};

RunConfig load_config(const CommonOptions& opts) {
  RunConfig cfg = parse_config_file(opts.config_path);
  if (opts.seed_override) cfg.seed = *opts.seed_override;
  return cfg;
}

void emit_report(const ordered_json& report, const CommonOptions& opts) {
  if (opts.out_path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::ofstream out(opts.out_path);
    if (!out) throw std::runtime_error("cannot write " + opts.out_path);
    out << report.dump(2) << "\n";
    log_info("report written to " + opts.out_path);
  }
}

void write_csv_file(const std::string& path,
                    const std::function<void(std::ostream&)>& writer) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  writer(out);
  log_info("csv written to " + path);
}

ordered_json report_skeleton(const char* command, const RunConfig& cfg) {
  ordered_json report;
  report["tool"] = "sobdecomp";
  report["command"] = command;
  report["config"] = config_echo(cfg);
  return report;
}

int cmd_decompose(const CommonOptions& opts) {
  const RunConfig cfg = load_config(opts);
  const auto start = Clock::now();
  const MeshPtr mesh = build_mesh(cfg);
  const GridFunction f = sample_f(cfg, mesh);
  const FormParams p{cfg.alpha};

  ordered_json report = report_skeleton("decompose", cfg);
  report["mesh"] = {{"n_nodes", mesh->n_nodes()},
                    {"n_f_nodes", mesh->n_f_nodes()},
                    {"n_f_components", mesh->n_f_components()},
                    {"max_cell_width", mesh->max_cell_width()}};

  DecompResult main = cfg.alpha > 0.0 ? decompose_F_s(f, p)
                                      : decompose_zero_alpha(f);
  ordered_json results;
  results["f_s"] = decomp_to_json(main);
  if (cfg.alpha > 0.0) {
    results["part_full"] = decomp_to_json(decompose_part(f, p, PartKind::Full));
    if (membership_F_s(f).member) {
      results["part_subspace"] =
          decomp_to_json(decompose_part(f, p, PartKind::Subspace));
    } else {
      results["part_subspace"] = {{"skipped", "f not in F^(s)"}};
    }
    results["three_way"] = three_way_to_json(verify_three_way(f, p));
  } else {
    const GSlopeStats stats = g_slope_stats(main.f2);
    results["zero_alpha_g_slope"] = {{"min", stats.min_slope},
                                     {"max", stats.max_slope},
                                     {"spread", stats.spread}};
  }
  report["results"] = results;
  if (!opts.canonical) report["timing_ms"] = elapsed_ms(start);

  if (!opts.csv_path.empty()) {
    write_csv_file(opts.csv_path, [&](std::ostream& out) {
      write_decompose_csv(out, f, main.f1, main.f2);
    });
  }
  emit_report(report, opts);
  return 0;
}

int cmd_solve(const CommonOptions& opts) {
  const RunConfig cfg = load_config(opts);
  const auto start = Clock::now();
  const MeshPtr mesh = build_mesh(cfg);
  const GridFunction f = sample_f(cfg, mesh);

  const SolutionFamily family =
      cfg.alpha > 0.0 ? solve_neumann(f, FormParams{cfg.alpha})
                      : solve_zero_alpha(f, cfg.flank_unbounded);

  ordered_json report = report_skeleton("solve", cfg);
  report["mesh"] = {{"n_nodes", mesh->n_nodes()},
                    {"n_f_components", mesh->n_f_components()}};
  report["results"] = {{"family", family_to_json(family)}};
  if (!opts.canonical) report["timing_ms"] = elapsed_ms(start);

  if (!opts.csv_path.empty()) {
    write_csv_file(opts.csv_path, [&](std::ostream& out) {
      write_family_csv(out, family);
    });
  }
  emit_report(report, opts);
  return 0;
}

int cmd_verify(const CommonOptions& opts, const std::string& suite) {
  const RunConfig cfg = load_config(opts);
  const auto start = Clock::now();
  const std::vector<SuiteResult> results = run_suites(cfg, suite);

  bool all_pass = true;
  ordered_json suites = ordered_json::array();
  for (const SuiteResult& sr : results) {
    ordered_json checks = ordered_json::array();
    for (const CheckResult& c : sr.checks) {
      checks.push_back({{"name", c.name},
                        {"pass", c.pass},
                        {"value", c.value},
                        {"tol", c.tol},
                        {"note", c.note}});
      std::cout << (c.pass ? "PASS" : "FAIL") << " " << sr.name << "/"
                << c.name << " value=" << c.value << " tol=" << c.tol << "\n";
      all_pass = all_pass && c.pass;
    }
    suites.push_back(
        {{"name", sr.name}, {"pass", sr.passed()}, {"checks", checks}});
  }

  ordered_json report = report_skeleton("verify", cfg);
  report["suite"] = suite;
  report["suites"] = suites;
  report["pass"] = all_pass;
  if (!opts.canonical) report["timing_ms"] = elapsed_ms(start);
  if (!opts.out_path.empty()) emit_report(report, opts);
  std::cout << (all_pass ? "ALL PASS" : "FAILURES PRESENT") << "\n";
  return all_pass ? 0 : 1;
}

int cmd_sweep(const CommonOptions& opts, const std::string& param,
              const std::string& values_csv) {
  const RunConfig base = load_config(opts);
  if (param != "mesh_h" && param != "alpha" && param != "depth") {
    throw ConfigError("param", "expected mesh_h | alpha | depth");
  }
  if (param == "depth" && !std::holds_alternative<CantorSpec>(base.g_spec)) {
    throw ConfigError("param", "depth sweep requires a cantor_complement g_spec");
  }
  std::vector<double> values;
  {
    std::istringstream in(values_csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      try {
        values.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("values", "not a number: '" + tok + "'");
      }
    }
    if (values.empty()) throw ConfigError("values", "empty value list");
  }

  ordered_json rows = ordered_json::array();
  std::ostringstream csv;
  csv << "param,value,dofs,n_f_components,family_dim,orth_residual,"
         "pythagoras_gap,ode_residual,neumann_residual,slope_variation";
  if (!opts.canonical) csv << ",solve_ms";
  csv << "\n";

  for (double value : values) {
    RunConfig cfg = base;
    if (param == "mesh_h") {
      if (!(value > 0.0)) throw ConfigError("values", "mesh_h must be > 0");
      cfg.mesh_h = value;
    } else if (param == "alpha") {
      if (value < 0.0) throw ConfigError("values", "alpha must be >= 0");
      cfg.alpha = value;
    } else {
      const int depth = static_cast<int>(value);
      if (depth < 0 || depth != value) {
        throw ConfigError("values", "depth values must be nonnegative integers");
      }
      std::get<CantorSpec>(cfg.g_spec).depth = depth;
    }

    const MeshPtr mesh = build_mesh(cfg);
    const GridFunction f = sample_f(cfg, mesh);
    const int dofs = DofMap::subspace_f_s(*mesh).n_dofs;

    const auto t0 = Clock::now();
    const DecompResult d = cfg.alpha > 0.0
                               ? decompose_F_s(f, FormParams{cfg.alpha})
                               : decompose_zero_alpha(f);
    const double solve_ms = elapsed_ms(t0);

    const OdeResidual ode = ode_residual(d.f2, FormParams{cfg.alpha});
    const double neu = neumann_residual(d.f2, f);
    const GSlopeStats stats = g_slope_stats(d.f2);
    const int n_comp = mesh->n_f_components();
    const int family_dim = cfg.alpha > 0.0 ? n_comp : std::max(0, n_comp - 1);

    ordered_json row{{"param", param},
                     {"value", value},
                     {"dofs", dofs},
                     {"n_f_components", n_comp},
                     {"family_dim", family_dim},
                     {"orth_residual", d.orth_residual},
                     {"pythagoras_gap", d.pythagoras_gap},
                     {"ode_residual", ode.value},
                     {"neumann_residual", neu},
                     {"slope_variation", stats.spread}};
    if (!opts.canonical) row["solve_ms"] = solve_ms;
    rows.push_back(row);

    char line[512];
    std::snprintf(line, sizeof(line),
                  "%s,%.17g,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g",
                  param.c_str(), value, dofs, n_comp, family_dim,
                  d.orth_residual, d.pythagoras_gap, ode.value, neu,
                  stats.spread);
    csv << line;
    if (!opts.canonical) csv << "," << solve_ms;
    csv << "\n";
    log_info("sweep " + param + "=" + std::to_string(value) + " dofs=" +
             std::to_string(dofs));
  }

  ordered_json report = report_skeleton("sweep", base);
  report["param"] = param;
  report["rows"] = rows;
  if (!opts.csv_path.empty()) {
    write_csv_file(opts.csv_path,
                   [&](std::ostream& out) { out << csv.str(); });
  }
  emit_report(report, opts);
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"E_alpha-orthogonal decompositions of H^1 induced by an open "
               "set G, and the alpha-harmonic Neumann solver"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string suite = "all";
  std::string param;
  std::string values_csv;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON config path")
        ->required();
    sub->add_option("--out", opts.out_path, "JSON report path (default stdout)");
    sub->add_option("--csv", opts.csv_path, "CSV output path");
    sub->add_option("--seed", opts.seed_override, "override config seed");
    sub->add_flag("--canonical", opts.canonical,
                  "omit timing fields for byte-identical reports");
  };

  CLI::App* decompose = app.add_subcommand(
      "decompose", "orthogonal decompositions of the configured f");
  add_common(decompose);
  CLI::App* solve = app.add_subcommand(
      "solve", "Neumann solution family for the configured f");
  add_common(solve);
  CLI::App* verify =
      app.add_subcommand("verify", "run invariant suites; exit 1 on failure");
  add_common(verify);
  verify->add_option("--suite", suite,
                     "forms | decompositions | theorem1 | theorem2 | "
                     "theorem3 | all");
  CLI::App* sweep =
      app.add_subcommand("sweep", "parameter sweep with a report table");
  add_common(sweep);
  sweep->add_option("--param", param, "mesh_h | alpha | depth")->required();
  sweep->add_option("--values", values_csv, "comma-separated values")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (decompose->parsed()) return cmd_decompose(opts);
    if (solve->parsed()) return cmd_solve(opts);
    if (verify->parsed()) return cmd_verify(opts, suite);
    return cmd_sweep(opts, param, values_csv);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sobdecomp
