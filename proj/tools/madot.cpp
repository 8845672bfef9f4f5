#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "madot/harness.hpp"

namespace {

using namespace madot;

void print_table(const ErrorTable& table) {
  std::printf("%6s %9s %14s %14s %12s %12s %6s %9s\n", "nx", "status", "potential_err",
              "height_err", "area_linf", "area_rss", "iters", "time[s]");
  for (const ErrorRow& r : table.rows) {
    std::printf("%6d %9s %14.6e %14.6e %12.4e %12.4e %6d %9.2f", r.nx,
                r.solved ? "ok" : "FAILED", r.potential_max_error, r.height_max_error, r.area_linf,
                r.area_rss, r.iterations, r.runtime_seconds);
    if (!r.failure.empty()) std::printf("  (%s)", r.failure.c_str());
    std::printf("\n");
  }
  if (table.fit_available)
    std::printf("fitted order %.3f (r^2 = %.3f)\n", table.fit_order, table.fit_r2);
}

int table_exit_code(const ErrorTable& table) {
  bool any_fail = false, all_fail = true;
  for (const ErrorRow& r : table.rows) {
    if (r.solved)
      all_fail = false;
    else
      any_fail = true;
  }
  if (table.rows.empty() || all_fail) return 1;
  return any_fail ? 2 : 0;
}

int run_solve(const std::string& config_path) {
  const ExperimentConfig config = load_config(config_path);
  const ErrorTable table = run_experiment(config);
  print_table(table);
  return table_exit_code(table);
}

int run_oracle(const std::string& config_path) {
  const ExperimentConfig config = load_config(config_path);
  const Problem problem = build_problem(config.problem);
  const OracleResult res = pogorelov_solve(problem.measure);
  std::printf("oracle heights for %s (%d sweeps, max area error %.3e, mc check %s):\n",
              problem.name.c_str(), res.sweeps, res.max_area_error,
              res.mc_check_passed ? "ok" : "FAILED");
  for (int k = 0; k < res.heights.size(); ++k)
    std::printf("  v[%d] = %.12f   (area error %+.3e)\n", k, res.heights[k], res.area_errors[k]);
  return res.mc_check_passed ? 0 : 2;
}

int run_convergence(const std::string& problem, const std::string& sizes_csv,
                    const std::string& mode, const std::string& out_dir) {
  ExperimentConfig config;
  config.problem = parse_problem_name(problem);
  config.grid_sizes.clear();
  std::istringstream in(sizes_csv);
  std::string tok;
  while (std::getline(in, tok, ',')) config.grid_sizes.push_back(std::stoi(tok));
  if (mode == "aleksandrov")
    config.mode = SolveMode::Aleksandrov;
  else if (mode == "viscosity" || mode == "viscosity_baseline")
    config.mode = SolveMode::ViscosityBaseline;
  else
    throw ContractViolation("convergence: unknown mode '" + mode + "'");
  config.output_dir = out_dir;
  const ErrorTable table = run_experiment(config);
  print_table(table);
  return table_exit_code(table);
}

int run_compare(const std::string& problem_name, int size) {
  const Problem problem = build_problem(parse_problem_name(problem_name));
  const OracleResult oracle = pogorelov_solve(problem.measure);
  SchemeParams params;
  params.nx = size;
  const SolveReport rep =
      solve_pipeline(problem.measure, params, NewtonOptions{}, problem.measure.size() >= 3);
  const Grid grid = make_discretization(problem.measure, params).grid;
  const OracleComparison cmp = oracle_vs_scheme(oracle, rep, problem.measure, grid);
  std::printf("%s at nx=%d: %d iterations, residual %.3e\n", problem.name.c_str(), size,
              rep.iterations, rep.residual_history.back());
  std::printf("  max height error vs oracle: %.6e (aligned %.6e, field-aligned %.6e)\n",
              cmp.max_height_error, cmp.max_height_error_aligned,
              cmp.field_aligned_height_error);
  std::printf("  cell area errors: linf %.6e, rss %.6e\n", cmp.area_error_linf,
              cmp.area_error_rss);
  for (int k = 0; k < problem.measure.size() && k < 12; ++k)
    std::printf("  v[%d]: scheme %.8f oracle %.8f\n", k, rep.heights[k], oracle.heights[k]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monge-Ampere solver for semi-discrete optimal transport onto the unit disk"};
  app.require_subcommand(1);

  std::string config_path, problem, sizes = "33,65,129", mode = "aleksandrov", out_dir;
  int size = 65;

  auto* solve = app.add_subcommand("solve", "run the experiment described by a JSON config");
  solve->add_option("--config", config_path, "config file")->required();

  auto* oracle = app.add_subcommand("oracle", "run the exact geometric solver for a config");
  oracle->add_option("--config", config_path, "config file")->required();

  auto* conv = app.add_subcommand("convergence", "grid refinement study for a named problem");
  conv->add_option("--problem", problem, "one_dirac|two_dirac|three_dirac|five_dirac|ten_dirac|random:<k>:<seed>")
      ->required();
  conv->add_option("--sizes", sizes, "comma-separated odd grid sizes");
  conv->add_option("--mode", mode, "aleksandrov|viscosity");
  conv->add_option("--out", out_dir, "output directory for artifacts");

  auto* cmp = app.add_subcommand("compare", "solve one grid size and compare to the oracle");
  cmp->add_option("--problem", problem, "problem name")->required();
  cmp->add_option("--size", size, "grid size");

  try {
    app.parse(argc, argv);
    if (solve->parsed()) return run_solve(config_path);
    if (oracle->parsed()) return run_oracle(config_path);
    if (conv->parsed()) return run_convergence(problem, sizes, mode, out_dir);
    if (cmp->parsed()) return run_compare(problem, size);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const madot::ContractViolation& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
