#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "permugibbs/experiments.hpp"

namespace permugibbs {

/// Schema violation in an experiment config; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  PointSetSpec point_set;
  Window point_window{-10.0, 10.0};
  Potential potential = Potential::power(1.0, 2.0);
  BoundaryCondition boundary = BoundaryCondition::shift(0);
  std::optional<BoundaryCondition> boundary_alt;
  std::vector<Volume> volumes = {Volume::range(0, 4)};
  std::vector<Index> window;  // empty: derived per subcommand
  ChainConfig sampler;
  int bootstrap = 200;
  EnumerationOptions enumeration;
  std::vector<std::string> checks;
  CheckParams check_params;
  std::string canonical;  // normalised JSON text, hashed into the manifest
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Entry point of the `permugibbs` tool. Exit codes: 0 success, 1 a check
/// failed, 2 invalid config or arguments, 3 internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace permugibbs
