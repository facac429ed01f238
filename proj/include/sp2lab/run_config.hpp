#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "sp2lab/metric.hpp"
#include "sp2lab/verify.hpp"

namespace sp2lab {

// Flat key = value run description. Lines starting with '#' and blank lines are ignored.
struct RunConfig {
  MetricParams params;
  int theta_steps = 16;
  int t_steps = 16;
  int restarts = 20;
  int planes_per_point = 0;  // classification sweeps; 0 keeps the suite defaults
  std::uint64_t seed = 42;
  double fd_step = 1e-3;
  double flat_threshold = 1e-8;
  int threads = 0;
  std::string out = ".";

  // Throws ConfigError.
  void validate() const;
  ScanConfig scan_config() const;
  VerifyOptions verify_options() const;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Throws ConfigError on unknown keys or malformed values. Keys not present keep the values of base.
RunConfig parse_run_config(const std::string& text, RunConfig base = {});
RunConfig load_run_config(const std::string& path, RunConfig base = {});
// Every key, doubles with 17 significant digits; parse_run_config(serialize(c)) == c.
std::string serialize(const RunConfig& c);
bool operator==(const RunConfig& a, const RunConfig& b);

// Set one key from its text form (the same grammar as the file).
void set_key(RunConfig& c, const std::string& key, const std::string& value);

}  // namespace sp2lab
