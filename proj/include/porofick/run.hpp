#pragma once

#include "porofick/config.hpp"
#include "porofick/electrostatics.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace porofick {

struct HistoryRow {
  int iteration = 0;
  double residual = 0.0;   // fixed-point residual, or Newton stationarity for static kinds
  double objective = 0.0;
};

/// Ordered key: value pairs of report.txt.
using Report = std::vector<std::pair<std::string, std::string>>;

struct RunResult {
  ProblemKind kind = ProblemKind::Steady;
  std::shared_ptr<const Mesh> mesh;
  FieldState fields;
  int components = 1;
  bool has_theta = false;
  bool has_phi = false;
  bool converged = false;
  bool solved = false;  // false when the solver threw and no fields exist
  Report report;
  std::vector<HistoryRow> history;
  std::optional<ScanReport> scan;

  /// Value of a report key, empty when absent.
  std::string get(const std::string& key) const;
};

struct RunOptions {
  int threads = 1;  // scan workers
};

/// Dispatches by kind. Solver failures become a non-converged result whose
/// report carries the error with its module; invalid specs throw ConfigError.
RunResult run(const ProblemSpec& spec, const RunOptions& options = {});

/// Field CSV with header node,x[,y],u_x[,u_y],c_1..c_N,mu_1..mu_N[,theta][,phi].
void write_fields(const RunResult& result, const std::filesystem::path& path);
std::string fields_csv(const RunResult& result);

/// fields.csv, report.txt, history.csv for iterative kinds and scan.csv for
/// the scan. Creates `dir` if needed.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

}  // namespace porofick
