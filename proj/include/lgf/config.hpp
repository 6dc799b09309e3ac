#pragma once

#include <cstdint>
#include <string>

#include "lgf/lgf.hpp"
#include "lgf/problems.hpp"

namespace lgf {

struct OutputOptions {
  bool full_state = false;        ///< also dump every state component
  bool log_surrogate_loss = true; ///< value-only evaluations during surrogate phases
  long record_every = 1;
};

struct ExperimentConfig {
  ProblemSpec problem;
  LgfConfig lgf;
  bool baseline = true;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  OutputOptions output;
};

/// Parses the line-based `section.key = value` format (# comments). Unknown
/// or duplicate keys, type mismatches and invariant violations are errors
/// naming the key and line. All defaults are filled in, including the
/// problem's, so the result echoes back as a complete document.
ExperimentConfig parse_config(const std::string& text);

/// The effective config as a parseable document; parse_config(echo(cfg))
/// reproduces cfg exactly.
std::string echo_config(const ExperimentConfig& cfg);

ExperimentConfig load_config_file(const std::string& path);

}  // namespace lgf
