// ntsym: command-line driver for the nonautonomous symbolic dynamics library.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "ntsym/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pressure, entropy and measure estimators for nonautonomous full shifts"};
  app.require_subcommand(1, 1);

  ntsym::cli::Options opt;
  std::uint64_t seed = 0;
  std::size_t depth = 0;
  std::string window;

  const char* help[][2] = {
      {"pressure", "capacity pressure sequence and critical exponents"},
      {"entropy", "capacity entropy (zero potential)"},
      {"measure", "measure-theoretic brackets and LLN diagnostics"},
      {"equilibrium", "equilibrium Bernoulli state and its identity/Gibbs checks"},
      {"code", "interval coding, expansiveness and orbit pressure"},
      {"verify", "run the property suite"},
  };
  for (const auto& [name, text] : help) {
    auto* sub = app.add_subcommand(name, text);
    sub->add_option("--config", opt.config_path, "TOML configuration file");
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "random seed (overrides run.seed)");
    sub->add_option("--depth", depth, "tree depth for outer measures (overrides run.depth_max)");
    sub->add_option("--window", window, "capacity window LO..HI (overrides run.n_lo, run.n_hi)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ntsym::cli::kConfigError;
  }

  for (auto* sub : app.get_subcommands()) {
    opt.command = sub->get_name();
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--depth")) opt.depth = depth;
  }
  try {
    if (!window.empty()) opt.window = ntsym::cli::parse_window(window);
  } catch (const ntsym::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ntsym::cli::kConfigError;
  }
  return ntsym::cli::run(opt, std::cout, std::cerr);
}
