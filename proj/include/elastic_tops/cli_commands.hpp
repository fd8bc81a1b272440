#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "elastic_tops/elliptic.hpp"
#include "elastic_tops/lie_dynamics.hpp"
#include "elastic_tops/painleve.hpp"

namespace etop::cli {

enum ExitCode : int { kOk = 0, kBadConfig = 1, kDriftBreach = 2 };

/// Raised for unusable configuration; mapped to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a subcommand needs. Flat key=value settings from a config file
/// land in `values`; dedicated flags override them.
struct RunConfig {
  std::string subcommand;
  std::string preset;
  std::optional<int> k;
  std::optional<double> tf;
  std::optional<double> rtol;
  std::uint64_t seed = 1;
  std::string out;
  std::string grid;
  std::map<std::string, std::string> values;
};

/// Parses `key = value` lines; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

std::vector<std::string> preset_names();

/// Model parameters from the preset, then `values`, then flags.
lie::ModelParams model_from_config(const RunConfig& cfg);
/// Explicit h1..H3 from `values` when all six are present, else a seeded draw.
lie::State initial_state_from_config(const RunConfig& cfg, const lie::ModelParams& params);
elliptic::QuarticCurve quartic_from_config(const RunConfig& cfg);

struct GridAxis {
  std::string name;
  std::vector<double> values;
};
/// `m=0:2:0.1,a3=0:0.5:0.5` style specification; bounds are inclusive.
std::vector<GridAxis> parse_grid(const std::string& spec);

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_elliptic(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_painleve_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Dispatches on cfg.subcommand and converts exceptions to exit codes.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace etop::cli
