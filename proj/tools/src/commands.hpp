#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "mrt/population.hpp"

namespace mrt::cli {

/// Budget grid in row-major order: rows are incomes, columns prices.
struct Grid {
  std::vector<double> p;
  std::vector<double> y;

  static Grid from(const GridConfig& g);
  std::size_t cells() const noexcept { return p.size() * y.size(); }
  Budget at(std::size_t cell) const;
  double price(std::size_t cell) const { return p[cell % p.size()]; }
  double income(std::size_t cell) const { return y[cell / p.size()]; }
};

RandomCoefficientPopulation population_of(const Config& c);

struct MomentCell {
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  double ineq3 = 0.0;  ///< -q_min Gamma0 + Gamma1
  double ineq4 = 0.0;  ///< q_max Gamma0 - Gamma1
  bool positive = true;  ///< q_min > 0; otherwise the cell is refused
  bool rejected = false;  ///< four-inequality (three-moment) test
  bool rejected_two = false;  ///< Gamma0 <= 0 alone (two-moment test)
};

struct QuantileCell {
  std::vector<double> quantile;
  std::vector<double> restriction;
  std::vector<bool> exact;
  std::vector<bool> rejected;
  bool any_rejected = false;
};

struct BernsteinCell {
  bool rejected = false;
  int degree = 0;
  double lp_max = 0.0;
  double threshold = 0.0;
};

std::vector<double> compute_share_map(const Config& c);
std::vector<MomentCell> compute_moment_map(const Config& c);
std::vector<QuantileCell> compute_quantile_map(const Config& c);
std::vector<BernsteinCell> compute_bernstein_map(const Config& c);

/// Subcommand names in CLI order.
const std::vector<std::string>& command_names();

/// Runs one subcommand and returns the file names written under `out`.
std::vector<std::string> run_command(const std::string& name, const Config& c,
                                     const std::filesystem::path& out);

}  // namespace mrt::cli
