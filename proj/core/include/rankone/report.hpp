#pragma once

// Tabular views of experiment results and the file writers behind the CLI.

#include <map>
#include <string>
#include <vector>

#include "rankone/experiments.hpp"

namespace rankone {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

struct ExperimentReport {
  std::string name;
  Table summary;                              // written as <name>.csv
  Table trials;                               // written as <name>_trials.csv
  std::string json;                           // written as <name>.json
  std::map<std::string, std::string> extras;  // filename -> contents
};

ExperimentReport make_report(const SuccessTable& t, const std::string& name);
ExperimentReport make_report(const NoiseResult& r);
ExperimentReport make_report(const FailureResult& r);
ExperimentReport make_report(const SelectionResult& r);
ExperimentReport make_report(const SpectralStudy& r);
ExperimentReport make_report(const FourierResult& r);
ExperimentReport make_report(const StandardizeStudy& r);

/// Runs the experiment named by spec.experiment. Writes files into
/// spec.output_dir when spec.write_files is set.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Writes the report files; returns the paths written.
std::vector<std::string> write_report(const ExperimentReport& report, const std::string& dir);

/// 8-bit PGM of a row-major image, linearly scaled to [0, 255].
std::string to_pgm(const RealVector& image, Index height, Index width);

std::string format_double(double v);

}  // namespace rankone
