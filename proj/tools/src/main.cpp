#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "config.hpp"
#include "mrt/error.hpp"
#include "mrt/parallel.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kIo = 3, kNumerical = 4 };

std::string describe(const std::string& name) {
  if (name == "share-map") return "share of Slutsky-violating consumers over the budget grid";
  if (name == "test-moments") return "two- and three-moment rejection maps";
  if (name == "test-bernstein") return "Bernstein LP enumeration over the budget grid";
  if (name == "test-quantiles") return "quantile restriction maps per tau and combined";
  if (name == "many-good") return "P-matrix, higher tensors and normativity for a many-good fixture";
  if (name == "identity") return "compare Gamma_n with the quantile-weighted integral";
  if (name == "estimate") return "local linear moment slopes with bootstrap covariance";
  if (name == "shrink") return "empirical Bayes shrinkage toward the rational set";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("mrt"));
  spdlog::set_pattern("%^%l%$: %v");

  CLI::App app{"Moment-based rationality tests for heterogeneous consumer populations"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::string data_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool dump_config = false;

  for (const std::string& name : mrt::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--config", config_path, "JSON config (omitted fields take defaults)");
    sub->add_option("--out", out_dir, "output directory (default: config.out)");
    sub->add_option("--seed", seed, "master seed (overrides config.seed)");
    sub->add_option("--threads", threads, "worker threads, 0 = all cores");
    if (name == "estimate" || name == "shrink")
      sub->add_option("--data", data_path, "p,y,q CSV (overrides config.estimation.data)");
    sub->add_flag("--print-config", dump_config, "print the effective config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    mrt::cli::Config cfg = config_path.empty() ? mrt::cli::Config{} : mrt::cli::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!data_path.empty()) cfg.estimation.data = data_path;
    mrt::cli::validate(cfg);
    if (dump_config) {
      std::cout << mrt::cli::serialize_config(cfg);
      return kOk;
    }
    mrt::set_thread_count(threads ? *threads : cfg.threads);
    const std::string out = out_dir.empty() ? cfg.out : out_dir;
    const auto files = mrt::cli::run_command(cmd, cfg, out);
    for (const auto& f : files) spdlog::info("wrote {}/{}", out, f);
    return kOk;
  } catch (const mrt::cli::ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kConfig;
  } catch (const mrt::ArgumentError& e) {
    spdlog::error("invalid argument: {}", e.what());
    return kConfig;
  } catch (const mrt::UnsupportedError& e) {
    spdlog::error("unsupported: {}", e.what());
    return kConfig;
  } catch (const mrt::IoError& e) {
    spdlog::error("i/o: {}", e.what());
    return kIo;
  } catch (const std::exception& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kNumerical;
  }
}
