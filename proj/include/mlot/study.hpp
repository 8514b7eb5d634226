#pragma once

/// @file study.hpp
/// @brief Convergence studies on the benchmark problems with CSV output.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mlot/multilevel.hpp"
#include "mlot/problems.hpp"

namespace mlot {

/// log2(e_{k-1} / e_k) for consecutive errors on meshes halving h.
/// A zero error in the denominator yields +infinity.
inline std::vector<double> observed_order(std::span<const double> errors) {
  if (errors.size() < 2) throw std::invalid_argument("observed_order: need at least two errors");
  std::vector<double> orders;
  orders.reserve(errors.size() - 1);
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (errors[k] == 0.0) {
      orders.push_back(std::numeric_limits<double>::infinity());
    } else {
      orders.push_back(std::log2(errors[k - 1] / errors[k]));
    }
  }
  return orders;
}

struct EmitFlags {
  bool sizes = true;
  bool cost = true;
  bool multiplier = true;
  bool support = false;
  bool weights = false;
};

/// Parses a comma-separated subset of sizes, cost_error, multiplier_error,
/// support, weights ("cost" and "multiplier" are accepted as short forms).
inline EmitFlags parse_emit(std::string_view list) {
  EmitFlags e{false, false, false, false, false};
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    const std::string_view item = list.substr(pos, comma - pos);
    if (item == "sizes") {
      e.sizes = true;
    } else if (item == "cost_error" || item == "cost") {
      e.cost = true;
    } else if (item == "multiplier_error" || item == "multiplier") {
      e.multiplier = true;
    } else if (item == "support") {
      e.support = true;
    } else if (item == "weights") {
      e.weights = true;
    } else if (item == "all") {
      e = EmitFlags{true, true, true, true, true};
    } else if (!item.empty()) {
      throw std::invalid_argument("unknown emit item '" + std::string(item) + "'");
    }
    pos = comma + 1;
  }
  return e;
}

/// Parses "a:b" (or a single level "a").
inline std::pair<int, int> parse_levels(std::string_view text) {
  auto to_int = [&](std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw std::invalid_argument("invalid level range '" + std::string(text) + "'");
    }
    return v;
  };
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    const int v = to_int(text);
    return {v, v};
  }
  const int a = to_int(text.substr(0, colon));
  const int b = to_int(text.substr(colon + 1));
  if (a < 0 || b < a) throw std::invalid_argument("empty level range '" + std::string(text) + "'");
  return {a, b};
}

struct RunConfig {
  std::string example = "ex1";
  double p = 2.0;
  int level_min = 0;
  int level_max = 0;
  MultilevelParams params;
  std::filesystem::path out_dir = ".";
  EmitFlags emit;

  void validate() const {
    if (!(p >= 1.0)) throw std::invalid_argument("RunConfig: p must be >= 1");
    if (level_min < 0 || level_max < level_min) {
      throw std::invalid_argument("RunConfig: empty level range");
    }
  }
};

struct CostRow {
  int level = 0;
  double objective = 0.0;
  double delta = 0.0;
  std::optional<double> order;
};

struct MultiplierRow {
  int level = 0;
  double epsilon = 0.0;
  std::optional<double> order;
};

struct StudyResult {
  Problem problem;
  std::vector<LevelReport> reports;
  std::optional<double> reference_cost;
  bool exact_reference = false;
  std::vector<CostRow> cost_rows;
  std::vector<MultiplierRow> multiplier_rows;
};

namespace detail {

inline void write_number(std::ostream& os, double v) {
  if (std::isinf(v)) {
    os << (v > 0 ? "inf" : "-inf");
  } else if (std::isnan(v)) {
    os << "nan";
  } else {
    os << v;
  }
}

inline std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << std::setprecision(17);
  return os;
}

}  // namespace detail

/// Runs the multilevel solver over the configured levels and evaluates
/// cost and multiplier errors. Writes the requested CSV files when
/// `write_files` is set.
inline StudyResult run_study(const RunConfig& config, bool write_files = true,
                             std::ostream* log = nullptr) {
  config.validate();
  StudyResult out;
  out.problem = make_problem(config.example);
  const Problem& problem = out.problem;
  if (config.level_min < problem.min_level) {
    throw std::invalid_argument(problem.name + " needs levels >= " +
                                std::to_string(problem.min_level));
  }
  const CostFunction cost = CostFunction::power(config.p);
  MultilevelParams params = config.params;
  params.level_min = config.level_min;
  params.level_max = config.level_max;

  const bool exact_available = problem.exact.has_value() && config.p == 2.0;
  auto results = multilevel_solve(problem.input(cost), params, [&](const LevelResult& r) {
    if (log) {
      *log << problem.name << " p=" << config.p << " level " << r.report.level
           << ": M=" << r.report.rows << " N=" << r.report.cols
           << " |A|=" << r.report.active_cardinality
           << " increases=" << r.report.tolerance_increases
           << " objective=" << std::setprecision(12)
           << problem.total_mass * r.report.objective << " time=" << std::setprecision(4)
           << r.report.wall_time << "s\n";
    }
  });

  std::vector<double> objectives;
  for (auto& r : results) {
    out.reports.push_back(r.report);
    objectives.push_back(problem.total_mass * r.solution.objective);
  }

  if (exact_available) {
    out.reference_cost = problem.exact->optimal_cost;
    out.exact_reference = true;
  } else if (objectives.size() >= 2) {
    out.reference_cost = reference_cost(objectives);
  }

  std::vector<double> deltas;
  for (std::size_t k = 0; k < results.size(); ++k) {
    CostRow row;
    row.level = results[k].report.level;
    row.objective = objectives[k];
    row.delta = out.reference_cost ? std::abs(*out.reference_cost - objectives[k])
                                   : std::numeric_limits<double>::quiet_NaN();
    deltas.push_back(row.delta);
    if (k > 0) row.order = observed_order(std::span(deltas).subspan(k - 1, 2))[0];
    out.cost_rows.push_back(row);
  }

  std::vector<double> epsilons;
  if (exact_available) {
    for (const auto& r : results) {
      epsilons.push_back(multiplier_error(r.solution, problem, *r.mesh_x));
    }
  } else {
    for (std::size_t k = 0; k + 1 < results.size(); ++k) {
      epsilons.push_back(multiplier_difference(results[k].solution.phi, *results[k].mesh_x,
                                               results[k + 1].solution.phi,
                                               *results[k + 1].mesh_x));
    }
  }
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    MultiplierRow row{results[k].report.level, epsilons[k], std::nullopt};
    if (k > 0) row.order = observed_order(std::span(epsilons).subspan(k - 1, 2))[0];
    out.multiplier_rows.push_back(row);
  }

  if (!write_files) return out;
  std::filesystem::create_directories(config.out_dir);
  if (config.emit.sizes) {
    auto os = detail::open_csv(config.out_dir / "sizes.csv");
    os << "level,M,N,M+N,MN,|A|,tolerance_increases\n";
    for (const auto& r : out.reports) {
      os << r.level << ',' << r.rows << ',' << r.cols << ',' << r.rows + r.cols << ','
         << r.rows * r.cols << ',' << r.active_cardinality << ',' << r.tolerance_increases
         << '\n';
    }
  }
  if (config.emit.cost) {
    auto os = detail::open_csv(config.out_dir / "cost.csv");
    os << "level,objective,δ_h,observed_order\n";
    for (const auto& row : out.cost_rows) {
      os << row.level << ',';
      detail::write_number(os, row.objective);
      os << ',';
      detail::write_number(os, row.delta);
      os << ',';
      if (row.order) detail::write_number(os, *row.order);
      os << '\n';
    }
  }
  if (config.emit.multiplier) {
    auto os = detail::open_csv(config.out_dir / "multiplier.csv");
    os << "level,ε_h,observed_order\n";
    for (const auto& row : out.multiplier_rows) {
      os << row.level << ',';
      detail::write_number(os, row.epsilon);
      os << ',';
      if (row.order) detail::write_number(os, *row.order);
      os << '\n';
    }
  }
  const LevelResult& last = results.back();
  const bool two_d = last.mesh_x->dimension() == 2;
  if (config.emit.support) {
    auto os = detail::open_csv(config.out_dir / "support.csv");
    os << (two_d ? "i,j,x1,x2,y1,y2,mass\n" : "i,j,x,y,mass\n");
    for (const auto& e : last.solution.plan) {
      const Point& x = last.mesh_x->node(e.row);
      const Point& y = last.mesh_y->node(e.col);
      os << e.row << ',' << e.col << ',' << x[0] << ',';
      if (two_d) os << x[1] << ',';
      os << y[0] << ',';
      if (two_d) os << y[1] << ',';
      os << e.mass << '\n';
    }
  }
  if (config.emit.weights) {
    auto dump = [&](const std::filesystem::path& path, const DiscreteMeasure& m) {
      auto os = detail::open_csv(path);
      os << (two_d ? "node,x1,x2,weight\n" : "node,x,weight\n");
      for (std::size_t i = 0; i < m.size(); ++i) {
        const Point& z = m.mesh().node(i);
        os << i << ',' << z[0] << ',';
        if (two_d) os << z[1] << ',';
        os << m[i] << '\n';
      }
    };
    dump(config.out_dir / "weights_x.csv", last.mu);
    dump(config.out_dir / "weights_y.csv", last.nu);
  }
  return out;
}

}  // namespace mlot
