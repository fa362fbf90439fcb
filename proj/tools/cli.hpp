#pragma once

// `hopf` command-line front end.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hopf/analysis.hpp"

namespace hopf::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kNoSignChange = 2 };

struct Range {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 1;
};

/// `min:max:count`, or a single number (count 1).
Range parse_range(const std::string& text);

/// Flat `key=value` lines; `#` starts a comment. Throws std::runtime_error on a
/// malformed line.
std::map<std::string, std::string> read_config(std::istream& in);

struct RunConfig {
  int p = 1;
  int q = 2;
  double lambda = 1.0;
  double mu = 4.0;
  AnalysisOptions analysis;
  std::filesystem::path out_dir = ".";

  /// Tolerances positive, at least 16 nodes per side; throws std::invalid_argument.
  void validate() const;
};

/// Runs the CLI and returns the process exit code. Output goes to `out` and
/// `err`; files go to the output directory.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hopf::cli
