// Command-line driver: convergence studies on the benchmark problems, mesh
// dumps, and randomized certificate checks of the transport solver.

#include <cstdint>
#include <exception>
#include <iostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mlot/mlot.hpp"

namespace {

// Fills options not given on the command line from key=value lines.
void apply_config_file(CLI::App& sub, const std::string& path) {
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "--") continue;
    CLI::Option* opt = sub.get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config") {
      throw std::invalid_argument("unknown key in " + path + ": " + item.name);
    }
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

struct RandomCheckOptions {
  std::uint64_t seed = 1;
  int instances = 200;
  int max_size = 6;
};

// Certificates: marginals, dual feasibility on every pair, complementary
// slackness, strong duality.
int random_check(const RandomCheckOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> size(1, opt.max_size);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int failures = 0;
  for (int k = 0; k < opt.instances; ++k) {
    const int m = size(rng), n = size(rng);
    std::vector<double> a(m), b(n);
    double sa = 0, sb = 0;
    for (auto& v : a) sa += (v = 0.05 + unit(rng));
    for (auto& v : b) sb += (v = 0.05 + unit(rng));
    for (auto& v : a) v /= sa;
    for (auto& v : b) v /= sb;
    const auto all = mlot::ActiveSet::full(m, n);
    std::vector<double> c(all.size());
    for (auto& v : c) v = unit(rng);
    const auto sol = mlot::solve_reduced(c, a, b, all);

    double gap = sol.objective;
    for (int i = 0; i < m; ++i) gap -= sol.phi[i] * a[i];
    for (int j = 0; j < n; ++j) gap -= sol.psi[j] * b[j];
    std::vector<double> rows(m, 0.0), cols(n, 0.0);
    bool ok = sol.optimal() && std::abs(gap) <= 1e-9;
    for (const auto& e : sol.plan) {
      rows[e.row] += e.mass;
      cols[e.col] += e.mass;
      const double rc = c[e.row * n + e.col] - sol.phi[e.row] - sol.psi[e.col];
      ok = ok && std::abs(rc) <= 1e-9;
    }
    for (int i = 0; i < m; ++i) ok = ok && std::abs(rows[i] - a[i]) <= 1e-12 * std::max(m, n);
    for (int j = 0; j < n; ++j) ok = ok && std::abs(cols[j] - b[j]) <= 1e-12 * std::max(m, n);
    for (std::size_t q = 0; q < all.size(); ++q) {
      ok = ok && sol.phi[all[q].row] + sol.psi[all[q].col] <= c[q] + 1e-9;
    }
    if (!ok) {
      ++failures;
      std::cerr << "instance " << k << " (" << m << "x" << n << ") failed its certificate\n";
    }
  }
  std::cout << opt.instances - failures << "/" << opt.instances
            << " random instances passed (seed " << opt.seed << ")\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel active-set solver for discretized optimal transport"};
  app.require_subcommand(1);

  mlot::RunConfig config;
  std::string levels = "7:10";
  std::string emit = "sizes,cost_error,multiplier_error";
  std::string out_dir = ".";
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run a convergence study and write CSV files");
  std::string config_file;
  run->add_option("--config", config_file, "key=value configuration file; flags take precedence")
      ->check(CLI::ExistingFile);
  run->add_option("--example", config.example, "Benchmark problem")
      ->check(CLI::IsMember(mlot::problem_names()));
  run->add_option("--p", config.p, "Cost exponent of c_p(x,y) = |x-y|^p / p")
      ->check(CLI::Range(1.0, 1e6));
  run->add_option("--levels", levels, "Refinement levels a:b");
  run->add_option("--theta-act", config.params.theta_act, "Initial activation constant")
      ->check(CLI::PositiveNumber);
  run->add_option("--c-opt", config.params.c_opt, "Optimality-check constant")
      ->check(CLI::PositiveNumber);
  run->add_flag("--auto-tune-theta", config.params.auto_tune_theta,
                "Reduce theta-act on the first active-set level while the check passes");
  run->add_option("--max-increases", config.params.max_tolerance_increases,
                  "Tolerance increases allowed per level");
  run->add_option("--full-lp-cap", config.params.solver.full_lp_cap,
                  "Largest M*N solved without an active set");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--emit", emit,
                  "Comma-separated: sizes,cost_error,multiplier_error,support,weights,all");
  run->add_flag("--quiet", quiet, "Do not print per-level progress");

  std::string mesh_example = "ex1";
  std::string mesh_side = "x";
  int mesh_level = 1;
  auto* mesh = app.add_subcommand("mesh", "Print the triangulation of a benchmark domain");
  mesh->add_option("--example", mesh_example, "Benchmark problem")
      ->check(CLI::IsMember(mlot::problem_names()));
  mesh->add_option("--level", mesh_level, "Refinement level")->check(CLI::NonNegativeNumber);
  mesh->add_option("--side", mesh_side, "x (source) or y (target)")
      ->check(CLI::IsMember({"x", "y"}));

  RandomCheckOptions check;
  auto* rc = app.add_subcommand("random-check",
                                "Solve random small instances and verify optimality certificates");
  rc->add_option("--seed", check.seed, "Random seed");
  rc->add_option("--instances", check.instances, "Number of instances")
      ->check(CLI::PositiveNumber);
  rc->add_option("--max-size", check.max_size, "Largest M and N")->check(CLI::Range(1, 64));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (!config_file.empty()) apply_config_file(*run, config_file);
      std::tie(config.level_min, config.level_max) = mlot::parse_levels(levels);
      config.emit = mlot::parse_emit(emit);
      config.out_dir = out_dir;
      const auto result = mlot::run_study(config, true, quiet ? nullptr : &std::cerr);
      if (!quiet && result.reference_cost) {
        std::cerr << "reference cost " << std::setprecision(15) << *result.reference_cost
                  << (result.exact_reference ? " (exact)" : " (extrapolated)") << '\n';
      }
      return 0;
    }
    if (*mesh) {
      const auto problem = mlot::make_problem(mesh_example);
      const auto& domain = mesh_side == "x" ? problem.domain_x : problem.domain_y;
      mlot::write_mesh(std::cout, mlot::build_mesh(domain, mesh_level));
      return 0;
    }
    if (*rc) return random_check(check);
  } catch (const mlot::MultilevelError& e) {
    std::cerr << "error: " << e.what() << "\n  level " << e.report().level
              << " |A|=" << e.report().active_cardinality << " violations:";
    for (auto v : e.report().violation_count_history) std::cerr << ' ' << v;
    std::cerr << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
