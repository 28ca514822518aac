#pragma once

// Pipeline orchestration: runs the configured commands in order and keeps
// every result, or the operational error, in a RunRecord.  A falsified
// property is a result, not an error.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "anosov/config.hpp"
#include "anosov/error.hpp"
#include "anosov/estimators.hpp"
#include "anosov/hyperconvexity.hpp"

namespace anosov {

inline constexpr const char* kToolVersion = "0.1.0";

struct DimensionResult {
  DimensionEstimate estimate;
  std::vector<BoundaryPoint> points;
};

struct ShadowResult {
  double s = 0;
  LeastAngle least_angle;
  std::vector<ShadowCheck> checks;
  std::size_t atoms = 0;
};

struct BoundaryExport {
  std::vector<BoundaryPoint> points;
};

using CommandPayload = std::variant<std::monostate, AnosovCertificate, CriticalExponent, DimensionResult,
                                    TripleMarginReport, ConvergenceProfile, ShadowResult, BoundaryExport>;

struct CommandOutcome {
  PipelineStep step;
  std::optional<ErrorKind> error_kind;
  std::string error;
  double seconds = 0;  ///< wall clock; metadata only
  CommandPayload result;

  bool ok() const { return !error_kind; }
};

struct RunRecord {
  std::string config_hash;
  std::string config_text;  ///< normalized
  std::string representation;
  int dim = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string started;
  std::string finished;
  std::string tool_version = kToolVersion;
  std::vector<CommandOutcome> outcomes;
};

struct RunOptions {
  int threads = 1;
  std::optional<std::uint64_t> seed;  ///< overrides the config seed
};

/// 64-bit FNV-1a of the normalized config text, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Seed of pipeline step `index` derived from the run seed.
std::uint64_t step_seed(std::uint64_t seed, int index);

RunRecord run(const RunConfig& config, const RunOptions& options = {});

/// 0 when every command succeeded, else the code of the first failure:
/// 2 config, 3 budget, 4 numeric.
int exit_code(const RunRecord& record);
int exit_code(ErrorKind kind);

}  // namespace anosov
