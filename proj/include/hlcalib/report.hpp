#pragma once

// Batch runner behind the command-line tool: identity suites, comass
// estimates and second-variation comparisons, with JSON/CSV/SVG output.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlcalib/calibration.hpp"
#include "hlcalib/variation.hpp"

namespace hlcalib {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScalarMode { Exact, Float };

struct RunConfig {
  std::string command = "all";  // identities | comass | variation | all
  std::uint64_t seed = 0;
  int samples = 50;     // random fields per kind
  int tuples = 10000;   // random integer tuples per identity suite
  int restarts = 100;   // comass restarts
  int grid = 0;         // points per circle; 0 picks max(9, 4F + 1) per field
  double fd_step = 1e-2;
  double tolerance = 1e-3;
  ScalarMode scalar_mode = ScalarMode::Exact;
  std::string phi;  // 3-form literal; empty means the standard one
  std::string json_path;
  std::string csv_path;
  std::string plot_path;
  std::string config_path;
};

std::string to_string(ScalarMode mode);

struct SuiteResult {
  std::string name;
  long count = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct IdentityReport {
  ScalarMode mode = ScalarMode::Exact;
  std::vector<SuiteResult> suites;
  double max_residual = 0.0;  // over the three Harvey-Lawson suites
  bool pass = false;
};

/// Exact mode: residuals are exact rationals, reported as |r|, pass iff 0.
/// Float mode: residuals divided by the product of squared input norms, pass iff <= 1e-12.
IdentityReport run_identities(const RunConfig& config);

struct ComassEntry {
  ComassReport estimate;
  double argmax_residual = 0.0;  // |chi|, |tau7| or |tau8| at the best frame
  bool pass = false;
};

struct ComassSummary {
  std::vector<ComassEntry> entries;  // phi, *phi, Phi
  bool pass = false;
};

ComassSummary run_comass(const RunConfig& config);

struct VariationRow {
  VariationReport report;
  double cartan_max = 0.0;  // NaN for non-associative kinds
  double weak_identity_gap = 0.0;  // |int rate^2 - fd| / fd
  double jacobi_residual = 0.0;
  bool pass = false;
};

struct ConvergenceSeries {
  ModelKind kind = ModelKind::Associative;
  std::vector<double> h;
  std::vector<double> error;      // Richardson-extrapolated value
  std::vector<double> raw_error;  // plain 3-point value
  double order = 0.0;             // smallest observed order between consecutive h
  double raw_order = 0.0;
};

struct VariationSummary {
  std::vector<VariationRow> rows;
  std::vector<ConvergenceSeries> convergence;
  bool pass = false;
};

inline constexpr double kCartanTolerance = 1e-5;
inline constexpr double kWeakIdentityTolerance = 1e-3;
inline constexpr double kJacobiTolerance = 1e-8;
inline constexpr double kOrderThreshold = 1.9;

ConvergenceSeries convergence_series(ModelKind kind, const std::vector<double>& steps = {1e-1, 5e-2, 2.5e-2});
VariationSummary run_variation(const RunConfig& config);

struct RunReport {
  RunConfig config;
  std::optional<IdentityReport> identities;
  std::optional<ComassSummary> comass;
  std::optional<VariationSummary> variation;
  bool pass = false;
};

/// Dispatch on config.command. Throws std::invalid_argument on an unknown command.
RunReport run(const RunConfig& config);

/// Everything except `timestamp` is a pure function of the config.
std::string to_json(const RunReport& report, const std::string& timestamp);
std::string to_csv(const VariationSummary& summary);
/// Log-log plot of FD error against h for the canonical fields.
std::string convergence_svg(const VariationSummary& summary);

/// Writes whichever of json/csv/plot paths are set; throws IoError.
void write_outputs(const RunReport& report, const std::string& timestamp);

std::string utc_timestamp();

}  // namespace hlcalib
