#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace landau_ee::cli {

// One row of a scan; field order is the CSV column order.
struct ScanRecord {
  int K = 0;
  double L = 0.0;
  std::string domain_id;
  std::string f_id;
  double value = 0.0;
  double predicted = 0.0;
  std::string regime;
  long long runtime_ms = 0;
  double grid_h = 0.0;
};

struct FitSummary {
  double slope;
  double intercept;
  double r2;
  double predicted_slope;
  double relative_deviation;
};

enum class Format { Csv, Json };

void write_scan(std::ostream& os, const std::vector<ScanRecord>& records, const std::optional<FitSummary>& fit,
                Format format);

// Runs one subcommand; `args` excludes the program name. Returns the exit code:
// 0 success, 1 runtime or resource failure, 2 usage or precondition error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace landau_ee::cli
