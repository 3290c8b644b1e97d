// Run configuration, its JSON form and a TOML-subset file reader.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "swarmbo/acquisition.hpp"
#include "swarmbo/controller.hpp"

namespace swarmbo {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  AcqKind acq = AcqKind::QEI;
  std::size_t n_init = 24;
  std::size_t n_epochs = 30;
  std::size_t q = 3;
  std::size_t n_mc = 512;
  double cutoff_s = 120.0;
  SwarmConstants consts;
  std::string maze_dir;  // empty: builtin mazes
  std::uint64_t seed = 0;
  std::string out_dir = "run";

  // Inner-loop effort.
  std::size_t n_raw = 256;
  std::size_t n_starts = 8;
  int acq_iterations = 100;
  int fit_restarts = 8;
  int fit_iterations = 200;

  void validate() const;
  AcqConfig acq_config(std::uint64_t seed) const;

  friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

nlohmann::json config_to_json(const RunConfig &cfg);
/// Overlays the keys present in `j` onto `cfg`. Unknown keys are errors.
void apply_config_json(RunConfig &cfg, const nlohmann::json &j);
RunConfig config_from_json(const nlohmann::json &j);

/// Parses the TOML subset used by config files: comments, [table] headers,
/// and `key = value` with strings, integers, floats and booleans.
nlohmann::json parse_toml(const std::string &text);
RunConfig load_config_file(const std::string &path);

}  // namespace swarmbo
