#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrt::cli {

/// Bad or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kConfigVersion = 1;

struct PopulationConfig {
  double a_p = 1.0 / 3.0;
  double b_p = 1.0;
  double a_y = 1.0 / 3.0;
  double b_y = 2.0 / 3.0;
  bool operator==(const PopulationConfig&) const = default;
};

struct GridConfig {
  double p_min = 0.1;
  double p_max = 1.0;
  double y_min = 1.0;
  double y_max = 2.0;
  int n_p = 64;
  int n_y = 64;
  bool operator==(const GridConfig&) const = default;
};

struct ShareConfig {
  std::string method = "analytic";  // analytic | monte_carlo
  int quad_points = 64;
  std::uint64_t draws = 100000;
  bool operator==(const ShareConfig&) const = default;
};

struct MomentsConfig {
  std::string method = "closed_form";  // closed_form | monte_carlo
  std::uint64_t draws = 100000;
  double tol = 1e-8;
  bool operator==(const MomentsConfig&) const = default;
};

struct QuantilesConfig {
  std::vector<double> taus = {0.33, 0.5, 0.66};
  std::string method = "closed_form";  // closed_form | empirical
  std::uint64_t draws = 20000;
  double bandwidth = 0.005;
  double tol = 0.0;
  bool operator==(const QuantilesConfig&) const = default;
};

struct BernsteinConfig {
  int max_degree = 4;
  int grid_size = 101;
  std::string support = "population";  // population | affordable
  std::string variant = "all_grid_points";  // all_grid_points | per_grid_point
  std::string method = "closed_form";  // closed_form | monte_carlo
  std::uint64_t draws = 100000;
  double tol = 1e-8;
  bool operator==(const BernsteinConfig&) const = default;
};

struct ManyGoodConfig {
  std::string fixture = "cobb_douglas_mixture";  // cobb_douglas_mixture | gorman | nonidentified_pair
  std::vector<std::vector<double>> shares = {{0.2, 0.3, 0.1}, {0.4, 0.2, 0.15}, {0.1, 0.1, 0.5}};
  std::vector<double> weights = {0.3, 0.3, 0.4};
  std::vector<double> gorman_slope = {0.15, 0.1};
  std::vector<double> prices = {0.5, 1.0, 2.0};
  double income = 1.7;
  int max_order = 3;
  std::uint64_t draws = 200000;
  std::size_t directions = 4096;
  bool operator==(const ManyGoodConfig&) const = default;
};

struct IdentityConfig {
  std::vector<int> orders = {0, 1, 2};
  std::vector<std::vector<double>> budgets = {{0.5, 1.5}, {0.9, 1.1}, {0.3, 1.9}};
  std::uint64_t draws = 200000;
  int quad_points = 512;
  double bandwidth = 0.005;
  bool operator==(const IdentityConfig&) const = default;
};

struct EstimationConfig {
  std::string data;  // empty: synthesize from the population
  std::uint64_t synthetic_rows = 20000;
  double noise_sd = 0.05;
  std::vector<double> budget = {0.5, 1.5};
  std::vector<int> orders = {1, 2, 3};
  std::optional<std::vector<double>> bandwidth;  // h or (h_p, h_y); empty: Silverman
  std::string kernel = "gaussian";  // gaussian | epanechnikov
  std::size_t n_boot = 200;
  std::vector<double> tau2_grid;  // empty: default grid
  bool operator==(const EstimationConfig&) const = default;
};

struct Config {
  int version = kConfigVersion;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out = "out";
  PopulationConfig population;
  GridConfig grid;
  ShareConfig share;
  MomentsConfig moments;
  QuantilesConfig quantiles;
  BernsteinConfig bernstein;
  ManyGoodConfig many_good;
  IdentityConfig identity;
  EstimationConfig estimation;
  bool operator==(const Config&) const = default;
};

/// Parses a JSON document. Missing fields keep their defaults; unknown keys,
/// wrong types and invalid values throw ConfigError.
Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);

/// Full JSON document with every field written out.
std::string serialize_config(const Config& c);

void validate(const Config& c);

}  // namespace mrt::cli
