#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "elastic_tops/cli_commands.hpp"

int main(int argc, char** argv) {
  using etop::cli::RunConfig;

  CLI::App app{"Integrable tops on the elastic group family: simulation, verification and singularity scans"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  int k = 0;
  double tf = 0, rtol = 0;
  std::vector<std::string> sets;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--preset", cfg.preset, "Named parameter set");
    sub->add_option("--k", k, "Curvature: -1, 0 or 1")->check(CLI::IsMember({-1, 0, 1}));
    sub->add_option("--seed", cfg.seed, "Seed for generated initial data");
    sub->add_option("--out", cfg.out, "Output path or prefix");
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--set", sets, "Extra key=value setting (repeatable)");
  };
  auto add_integration = [&](CLI::App* sub) {
    sub->add_option("--tf", tf, "Final time")->check(CLI::PositiveNumber);
    sub->add_option("--rtol", rtol, "Relative tolerance")->check(CLI::PositiveNumber);
  };

  auto* simulate = app.add_subcommand("simulate", "Integrate the top and report invariant drift");
  add_common(simulate);
  add_integration(simulate);
  auto* verify = app.add_subcommand("verify", "Integrate and run every residual check");
  add_common(verify);
  add_integration(verify);
  auto* elliptic = app.add_subcommand("elliptic", "Invariants and identity checks for a quartic curve");
  add_common(elliptic);
  auto* scan = app.add_subcommand("painleve-scan", "Resonance analysis over a parameter grid");
  add_common(scan);
  scan->add_option("--grid", cfg.grid, "Axes as name=lo:hi:step, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; everything else is a bad configuration.
    const int code = app.exit(e);
    return code == 0 ? 0 : etop::cli::kBadConfig;
  }

  for (auto* sub : {simulate, verify, elliptic, scan}) {
    if (sub->parsed()) {
      cfg.subcommand = sub->get_name();
      if (sub->count("--k")) cfg.k = k;
      if (sub->get_option_no_throw("--tf") && sub->count("--tf")) cfg.tf = tf;
      if (sub->get_option_no_throw("--rtol") && sub->count("--rtol")) cfg.rtol = rtol;
    }
  }

  try {
    if (!config_path.empty()) cfg.values = etop::cli::load_config_file(config_path);
    for (const auto& s : sets) {
      for (auto& [key, value] : etop::cli::parse_config_text(s)) cfg.values[key] = value;
    }
    // Flags win over the file for the settings that also have a flag.
    const auto* sub = app.get_subcommands().front();
    auto from_file = [&](const char* key, const char* flag, auto&& assign) {
      const auto it = cfg.values.find(key);
      if (it != cfg.values.end() && (!sub->get_option_no_throw(flag) || !sub->count(flag))) assign(it->second);
    };
    from_file("preset", "--preset", [&](const std::string& v) { cfg.preset = v; });
    from_file("out", "--out", [&](const std::string& v) { cfg.out = v; });
    from_file("grid", "--grid", [&](const std::string& v) { cfg.grid = v; });
    from_file("seed", "--seed", [&](const std::string& v) {
      std::size_t used = 0;
      try {
        cfg.seed = std::stoull(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != v.size() || v.front() == '-') throw etop::cli::ConfigError("seed must be a non-negative integer, got " + v);
    });
  } catch (const etop::cli::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return etop::cli::kBadConfig;
  }
  return etop::cli::dispatch(cfg, std::cout, std::cerr);
}
