#include "madot/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "madot/transport.hpp"

namespace madot {

namespace {

using nlohmann::json;

DiracMeasure measure_from_heights(std::vector<Vec2> locations, const Eigen::VectorXd& heights) {
  DiracMeasure mu;
  mu.locations = std::move(locations);
  mu.weights = Eigen::VectorXd::Constant(heights.size(), kPi / heights.size());
  mu.weights = cell_areas(mu, heights);
  return mu;
}

Problem named_problem(ProblemKind kind) {
  Problem p;
  switch (kind) {
    case ProblemKind::OneDirac: {
      p.name = "one_dirac";
      Eigen::VectorXd v = Eigen::VectorXd::Zero(1);
      p.measure = measure_from_heights({Vec2(0, 0)}, v);
      p.exact_heights = v;
      p.exact_potential = [](const Vec2& x) { return x.norm(); };
      break;
    }
    case ProblemKind::TwoDirac: {
      p.name = "two_dirac";
      Eigen::VectorXd v = Eigen::VectorXd::Zero(2);
      p.measure = measure_from_heights({Vec2(-0.5, 0), Vec2(0.5, 0)}, v);
      p.exact_heights = v;
      p.exact_potential = [](const Vec2& x) {
        if (std::abs(x.x()) > 0.5)
          return std::min((x - Vec2(-0.5, 0)).norm(), (x - Vec2(0.5, 0)).norm());
        return std::abs(x.y());
      };
      break;
    }
    case ProblemKind::ThreeDirac: {
      p.name = "three_dirac";
      Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
      p.measure = measure_from_heights({Vec2(-0.5, -0.5), Vec2(0.5, -0.5), Vec2(0.5, 0.5)}, v);
      p.exact_heights = v;
      break;
    }
    case ProblemKind::FiveDirac: {
      p.name = "five_dirac";
      Eigen::VectorXd v(5);
      v << 0.2, 0.2, 0.2, 0.0, 0.0;
      p.measure = measure_from_heights(
          {Vec2(0.5, 0.5), Vec2(0.5, -0.5), Vec2(-0.5, 0.5), Vec2(-0.5, -0.5), Vec2(0, 0)}, v);
      p.exact_heights = v;
      break;
    }
    case ProblemKind::TenDirac: {
      p.name = "ten_dirac";
      Eigen::VectorXd v(10);
      v << 0.15, 0.15, 0.15, 0.15, 0.0, 0.0, 0.05, 0.05, 0.35, 0.35;
      p.measure = measure_from_heights(
          {Vec2(0.5, 0.5), Vec2(0.5, -0.5), Vec2(-0.5, 0.5), Vec2(-0.5, -0.5), Vec2(0.25, 0.25),
           Vec2(0.25, -0.25), Vec2(-0.25, 0.25), Vec2(-0.25, -0.25), Vec2(0.75, 0.6875),
           Vec2(-0.75, -0.75)},
          v);
      p.exact_heights = v;
      break;
    }
    default:
      throw ContractViolation("named_problem: not a named problem");
  }
  validate(p.measure);
  return p;
}

Problem random_problem(const ProblemSpec& spec) {
  require(spec.count >= 1, "random_k: count must be positive");
  require(spec.placement_grid >= 17, "random_k: placement grid too coarse");
  // Diracs are drawn (without replacement) from placement-grid nodes inside
  // [-0.7, 0.7]^2 so that the same configuration stays on every finer grid.
  const int nx = spec.placement_grid;
  const double h = 2.0 / (nx - 1);
  std::vector<Vec2> candidates;
  for (int j = 0; j < nx; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec2 x(-1.0 + i * h, -1.0 + j * h);
      if (std::abs(x.x()) <= 0.7 + 1e-12 && std::abs(x.y()) <= 0.7 + 1e-12)
        candidates.push_back(x);
    }
  }
  require(static_cast<int>(candidates.size()) >= spec.count,
          "random_k: not enough grid nodes in the placement box");
  std::mt19937_64 rng(spec.seed);
  std::set<std::size_t> chosen;
  while (static_cast<int>(chosen.size()) < spec.count)
    chosen.insert(static_cast<std::size_t>(rng() % candidates.size()));

  Problem p;
  std::ostringstream name;
  name << "random_" << spec.count << "_seed" << spec.seed;
  p.name = name.str();
  for (std::size_t idx : chosen) p.measure.locations.push_back(candidates[idx]);
  p.measure.weights = Eigen::VectorXd::Constant(spec.count, kPi / spec.count);
  validate(p.measure);
  return p;
}

Problem custom_problem(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ContractViolation("custom problem: cannot open " + file);
  json j = json::parse(in);
  Problem p;
  p.name = "custom";
  for (const auto& loc : j.at("locations"))
    p.measure.locations.emplace_back(loc.at(0).get<double>(), loc.at(1).get<double>());
  const int n = static_cast<int>(p.measure.locations.size());
  if (j.contains("heights")) {
    Eigen::VectorXd v(n);
    for (int k = 0; k < n; ++k) v[k] = j.at("heights").at(k).get<double>();
    v.array() -= v.minCoeff();
    p.measure = measure_from_heights(p.measure.locations, v);
    p.exact_heights = v;
  } else {
    Eigen::VectorXd w(n);
    for (int k = 0; k < n; ++k) w[k] = j.at("weights").at(k).get<double>();
    p.measure.weights = w;
  }
  validate(p.measure);
  return p;
}

// Wall times go to the per-run metadata, not the table: emitted tables must be
// bit-identical across reruns of the same config and seed.
void write_table_csv(const std::string& path, const ErrorTable& table) {
  std::ofstream out(path);
  out.precision(17);
  out << "nx,solved,potential_max_error,height_max_error,area_linf,area_rss,iterations,"
         "failure\n";
  for (const ErrorRow& r : table.rows) {
    out << r.nx << ',' << (r.solved ? 1 : 0) << ',' << r.potential_max_error << ','
        << r.height_max_error << ',' << r.area_linf << ',' << r.area_rss << ',' << r.iterations
        << ',' << r.failure << '\n';
  }
}

void write_potential_csv(const std::string& path, const SolveReport& rep, const Grid& grid) {
  std::ofstream out(path);
  out.precision(17);
  out << "x,y,u\n";
  for (int node = 0; node < grid.num_nodes(); ++node) {
    const Vec2 x = grid.coord(node);
    if (std::abs(x.x()) > 1.0 + 1e-12 || std::abs(x.y()) > 1.0 + 1e-12) continue;
    out << x.x() << ',' << x.y() << ',' << rep.u[node] << '\n';
  }
}

void write_raster_csv(const std::string& path, const Eigen::MatrixXi& raster) {
  std::ofstream out(path);
  for (int j = 0; j < raster.rows(); ++j) {
    for (int i = 0; i < raster.cols(); ++i) {
      if (i) out << ',';
      out << raster(j, i);
    }
    out << '\n';
  }
}

}  // namespace

Problem build_problem(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::RandomK:
      return random_problem(spec);
    case ProblemKind::Custom:
      return custom_problem(spec.file);
    default:
      return named_problem(spec.kind);
  }
}

ProblemSpec parse_problem_name(const std::string& name) {
  ProblemSpec s;
  if (name == "one_dirac") {
    s.kind = ProblemKind::OneDirac;
  } else if (name == "two_dirac") {
    s.kind = ProblemKind::TwoDirac;
  } else if (name == "three_dirac") {
    s.kind = ProblemKind::ThreeDirac;
  } else if (name == "five_dirac") {
    s.kind = ProblemKind::FiveDirac;
  } else if (name == "ten_dirac") {
    s.kind = ProblemKind::TenDirac;
  } else if (name.rfind("random:", 0) == 0) {
    s.kind = ProblemKind::RandomK;
    std::istringstream in(name.substr(7));
    char sep = 0;
    if (!(in >> s.count)) throw ContractViolation("parse_problem_name: bad random spec");
    if (in >> sep >> s.seed) {
      // optional ":seed"
    }
  } else {
    throw ContractViolation("parse_problem_name: unknown problem '" + name + "'");
  }
  return s;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("load_config: cannot open " + path);
  json j = json::parse(in);
  ExperimentConfig c;

  const auto& prob = j.at("problem");
  if (prob.is_string()) {
    c.problem = parse_problem_name(prob.get<std::string>());
  } else {
    const std::string name = prob.at("name").get<std::string>();
    if (name == "random_k") {
      c.problem.kind = ProblemKind::RandomK;
      c.problem.count = prob.at("count").get<int>();
      c.problem.seed = prob.value("seed", 1ull);
      c.problem.placement_grid = prob.value("placement_grid", 129);
    } else if (name == "custom") {
      c.problem.kind = ProblemKind::Custom;
      c.problem.file = prob.at("file").get<std::string>();
    } else {
      c.problem = parse_problem_name(name);
    }
  }

  if (j.contains("grid_sizes")) c.grid_sizes = j.at("grid_sizes").get<std::vector<int>>();
  for (int n : c.grid_sizes)
    require(n >= 5 && n % 2 == 1, "load_config: grid sizes must be odd and at least 5");

  const std::string mode = j.value("mode", std::string("aleksandrov"));
  if (mode == "aleksandrov")
    c.mode = SolveMode::Aleksandrov;
  else if (mode == "viscosity_baseline" || mode == "viscosity")
    c.mode = SolveMode::ViscosityBaseline;
  else
    throw ContractViolation("load_config: unknown mode '" + mode + "'");

  const std::string rule = j.value("rminus_rule", std::string("sup"));
  if (rule == "sup")
    c.rminus_rule = RMinusRule::SupWindow;
  else if (rule == "inf")
    c.rminus_rule = RMinusRule::InfWindow;
  else
    throw ContractViolation("load_config: unknown rminus_rule '" + rule + "'");

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    c.solver.tolerance = s.value("tolerance", 1e-8);
    c.solver.max_iterations = s.value("max_iterations", 200);
    c.solver.max_backtracks = s.value("max_backtracks", 30);
    c.solver.ordering_seed = s.value("ordering_seed", 0ull);
    c.solver.stall_tolerance = s.value("stall_tolerance", 1e-5);
  }
  c.stencil_width = j.value("stencil_width", 0);
  if (j.contains("continuation")) {
    if (j.at("continuation").is_boolean())
      c.continuation = j.at("continuation").get<bool>() ? 1 : 0;
    else
      require(j.at("continuation").get<std::string>() == "auto",
              "load_config: continuation must be true, false, or \"auto\"");
  }
  c.with_oracle = j.value("with_oracle", true);
  c.output_dir = j.value("output_dir", std::string());
  return c;
}

double ErrorRow::primary_error() const {
  if (std::isfinite(potential_max_error)) return potential_max_error;
  if (std::isfinite(height_max_error)) return height_max_error;
  return area_linf;
}

std::pair<double, double> convergence_fit(const std::vector<std::pair<double, double>>& h_err) {
  require(h_err.size() >= 2, "convergence_fit: need at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(h_err.size());
  for (const auto& [h, e] : h_err) {
    require(h > 0 && e > 0, "convergence_fit: positive values required");
    const double x = std::log(h), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double denom = (n * sxx - sx * sx) * (n * syy - sy * sy);
  const double r = denom > 0 ? (n * sxy - sx * sy) / std::sqrt(denom) : 1.0;
  return {slope, r * r};
}

Eigen::MatrixXi cell_raster(const SolveReport& report, const DiracMeasure& diracs,
                            const Grid& grid) {
  MaxOfPlanesPotential phi{diracs, report.heights};
  Eigen::MatrixXi raster(grid.nx, grid.nx);
  for (int j = 0; j < grid.nx; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 y(-1.0 + i * grid.h, -1.0 + j * grid.h);
      raster(j, i) = y.squaredNorm() > 1.0 ? 0 : 1 + eval_potential(phi, y).active_index;
    }
  }
  return raster;
}

double potential_error_vs_exact(const SolveReport& report, const Grid& grid,
                                const std::function<double(const Vec2&)>& exact) {
  require(static_cast<bool>(exact), "potential_error_vs_exact: no analytic solution");
  double sum_u = 0.0, sum_ex = 0.0;
  int count = 0;
  for (int node = 0; node < grid.num_nodes(); ++node) {
    const Vec2 x = grid.coord(node);
    if (std::abs(x.x()) > 1.0 + 1e-12 || std::abs(x.y()) > 1.0 + 1e-12) continue;
    sum_u += report.u[node];
    sum_ex += exact(x);
    ++count;
  }
  const double mu = sum_u / count, mex = sum_ex / count;
  double err = 0.0;
  for (int node = 0; node < grid.num_nodes(); ++node) {
    const Vec2 x = grid.coord(node);
    if (std::abs(x.x()) > 1.0 + 1e-12 || std::abs(x.y()) > 1.0 + 1e-12) continue;
    err = std::max(err, std::abs((report.u[node] - mu) - (exact(x) - mex)));
  }
  return err;
}

ErrorTable run_experiment(const ExperimentConfig& config) {
  const Problem problem = build_problem(config.problem);
  const int k = problem.measure.size();
  const bool continuation = config.continuation < 0 ? k >= 3 : config.continuation != 0;

  OracleResult oracle;
  bool have_oracle = false;
  if (config.with_oracle && k <= 20) {
    oracle = pogorelov_solve(problem.measure);
    have_oracle = true;
  }

  const bool writing = !config.output_dir.empty();
  if (writing) std::filesystem::create_directories(config.output_dir);

  ErrorTable table;
  for (int nx : config.grid_sizes) {
    ErrorRow row;
    row.nx = nx;
    try {
      require(nx % 2 == 1, "run_experiment: grid sizes must be odd");
      SchemeParams params;
      params.nx = nx;
      params.stencil_width = config.stencil_width;
      params.mode = config.mode;
      params.rminus_rule = config.rminus_rule;
      const SolveReport rep = solve_pipeline(problem.measure, params, config.solver, continuation);
      row.solved = true;
      row.iterations = rep.iterations;
      row.runtime_seconds = rep.wall_time_seconds;
      if (!rep.converged) row.failure = "tolerance not reached";

      const Discretization disc = make_discretization(problem.measure, params);
      if (problem.exact_potential)
        row.potential_max_error = potential_error_vs_exact(rep, disc.grid, problem.exact_potential);
      if (have_oracle) {
        const OracleComparison cmp = oracle_vs_scheme(oracle, rep, problem.measure, disc.grid);
        row.height_max_error = cmp.field_aligned_height_error;
        row.area_linf = cmp.area_error_linf;
        row.area_rss = cmp.area_error_rss;
      } else {
        const Eigen::VectorXd areas = cell_areas(problem.measure, rep.heights);
        const Eigen::VectorXd err = areas - problem.measure.weights;
        row.area_linf = err.lpNorm<Eigen::Infinity>();
        row.area_rss = err.norm();
      }

      if (writing) {
        const std::string base = config.output_dir + "/" + problem.name + "_" +
                                 (config.mode == SolveMode::Aleksandrov ? "aleksandrov" : "viscosity") +
                                 "_" + std::to_string(nx);
        write_potential_csv(base + "_potential.csv", rep, disc.grid);
        write_raster_csv(base + "_raster.csv", cell_raster(rep, problem.measure, disc.grid));
        json meta;
        meta["problem"] = problem.name;
        meta["nx"] = nx;
        meta["mode"] = config.mode == SolveMode::Aleksandrov ? "aleksandrov" : "viscosity_baseline";
        meta["iterations"] = rep.iterations;
        meta["converged"] = rep.converged;
        meta["residual_history"] = rep.residual_history;
        meta["heights"] = std::vector<double>(rep.heights.data(),
                                              rep.heights.data() + rep.heights.size());
        meta["wall_time_seconds"] = rep.wall_time_seconds;
        std::ofstream(base + "_meta.json") << meta.dump(2) << '\n';
      }
    } catch (const std::exception& e) {
      row.solved = false;
      row.failure = e.what();
    }
    table.rows.push_back(std::move(row));
  }

  std::vector<std::pair<double, double>> pts;
  for (const ErrorRow& r : table.rows) {
    if (!r.solved) continue;
    const double err = r.primary_error();
    if (std::isfinite(err) && err > 0) pts.emplace_back(2.0 / (r.nx - 1), err);
  }
  if (pts.size() >= 3) {
    std::tie(table.fit_order, table.fit_r2) = convergence_fit(pts);
    table.fit_available = true;
  }

  if (writing)
    write_table_csv(config.output_dir + "/" + problem.name + "_" +
                        (config.mode == SolveMode::Aleksandrov ? "aleksandrov" : "viscosity") +
                        "_table.csv",
                    table);
  return table;
}

}  // namespace madot
