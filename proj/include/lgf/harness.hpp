#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lgf/config.hpp"

namespace lgf {

struct ExperimentResult {
  RunReport lgf_report;
  std::optional<RunReport> baseline_report;
  std::string report_text;  ///< contents of report.txt
  std::string output_dir;
};

/// Runs the configured experiment (LGF and, when requested, the pure base
/// optimizer on an independent problem instance) and writes lgf.csv,
/// baseline.csv, effective.cfg and report.txt into the output directory.
/// Files are written whole; a failing run leaves no partial CSV.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Serializes a run into the CSV schema
///   epoch,t,phase,loss,grad_evals,a_0..a_{d-1}
/// with d = min(n, 16) state columns and 17-significant-digit floats.
/// When full is true every component is written instead.
std::string run_to_csv(const RunReport& report, double eta, bool full = false);

struct CsvRun {
  std::vector<long> epochs;
  std::vector<double> times;
  std::vector<std::string> phases;
  std::vector<double> losses;
  std::vector<long> grad_evals;
  Matrix states;  ///< rows match epochs
};

CsvRun parse_run_csv(const std::string& text);

struct ComparisonSummary {
  std::size_t common_rows = 0;
  bool truncated = false;
  double terminal_state_diff = 0.0;  ///< ||a_A - a_B||^2 / ||a_A||^2
  double final_loss_a = 0.0;
  double final_loss_b = 0.0;
  long grad_evals_a = 0;
  long grad_evals_b = 0;
  std::vector<double> loss_ratio;  ///< per common epoch, z_A / z_B
  std::string text;
};

/// Compares two run CSVs; mismatched epoch counts are truncated to the
/// common prefix with a warning in the text.
ComparisonSummary compare_runs(const std::string& csv_path_a,
                               const std::string& csv_path_b);

}  // namespace lgf
