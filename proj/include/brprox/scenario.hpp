#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "brprox/br_engine.hpp"
#include "brprox/function_catalog.hpp"
#include "brprox/prox_bounded.hpp"

namespace brprox {

inline constexpr const char* kToolVersion = "0.1.0";

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One sweep. JSON keys are the member names; unknown keys are rejected.
struct ScenarioConfig {
  /// Catalog name, or an inline 1-D piecewise definition (kept for the digest).
  std::string function = "abs";
  std::string function_json;
  double p = 2.0;
  std::vector<double> eps_grid = {0.0, 0.01, 0.1, 1.0};
  /// Empty means "auto".
  std::vector<double> lambda_grid;
  int query_count = 100;
  /// Defaults to the function's effective box.
  std::optional<Box> query_box;
  double sample_density = 50.0;
  double slack = 1e-6;
  std::uint64_t seed = 0;
  double tol = 1e-9;
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
/// Canonical JSON of the parsed config.
std::string canonical_config(const ScenarioConfig& config);
FunctionSpec config_function(const ScenarioConfig& config);

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);
/// Seed for the stream (seed, purpose, a, b); streams never share state.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t a,
                          std::uint64_t b);

struct Query {
  Vector x;
  Vector xstar;
  /// min over the sample of <y* - x*, y - x>
  double nu = 0.0;
  bool related = false;
  bool targeted = false;
};

struct ReportRow {
  size_t eps_index = 0;
  size_t lambda_index = 0;
  size_t query_index = 0;
  Query query;
  CertificateRecord record;
  bool entourage_pass = false;
};

struct CellSummary {
  double eps = 0.0;
  double lambda = 0.0;
  int queries = 0;
  int qualifying = 0;
  int passed = 0;
  int entourage_passed = 0;
};

struct RunReport {
  std::string scenario_id;
  std::string digest;
  std::string function;
  int dim = 1;
  double p = 2.0;
  ThresholdEstimate threshold;
  std::vector<double> lambdas;
  std::vector<double> eps_grid;
  double resolution = 0.0;
  double slack_used = 0.0;
  double dual_cap = 0.0;
  size_t sample_size = 0;
  /// Query box grown by the sampling margin.
  Box sample_box;
  double sample_density = 0.0;
  std::vector<ReportRow> rows;
  std::vector<CellSummary> cells;
  int qualifying = 0;
  int passed = 0;
  /// Over qualifying rows; 1 when none qualify.
  double pass_rate = 1.0;
  double max_excess_x = 0.0;
  double max_excess_xstar = 0.0;
  double max_identity_error = 0.0;
  int iterate_violations = 0;
  double wall_seconds = 0.0;
  std::string version = kToolVersion;
  /// CSV header and rows, without the timestamp line.
  std::string csv_body;
};

/// Threshold, graph sample, queries, certification of every query x eps x
/// lambda cell. Output bytes do not depend on the thread count.
RunReport run_scenario(const ScenarioConfig& config);

inline constexpr const char* kCsvHeader =
    "scenario,function,p,eps,lambda,qx,qxstar,nu,cx,cxstar,dx,dxstar,bound_x,bound_xstar,"
    "iterate_bound,solver_gap,pass";

/// Timestamp comment line followed by csv_body.
void write_report_csv(const RunReport& report, std::ostream& out);
std::string report_summary_json(const RunReport& report);

std::string sha256_hex(const std::string& data);

/// Worker count from BRPROX_THREADS, else the hardware concurrency.
int thread_count();

}  // namespace brprox
