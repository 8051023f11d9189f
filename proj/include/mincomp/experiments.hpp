#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mincomp/concentration.hpp"
#include "mincomp/recovery.hpp"

namespace mincomp {

// Declarative experiment harness: one config struct drives phase sweeps,
// concentration verification, and dimension estimation, with CSV (and SVG
// for sweeps) output that is byte-deterministic in (config, master_seed)
// regardless of worker count.

enum class ExperimentKind { Phase, Concentration, Dimension, Example1 };
enum class DecoderKind { Enumerate, AltMin, SparseFactor };

const char* to_string(ExperimentKind kind);
const char* to_string(DecoderKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);
DecoderKind decoder_kind_from_string(const std::string& name);

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Phase;
  int m = 8, n = 8, r = 1;
  int l1 = 0, l2 = 0;
  EnsembleKind ensemble = EnsembleKind::Dense;
  double s = 1.0;
  int k_min = 5, k_max = 40, k_step = 5;
  long long trials = 100;
  std::uint64_t master_seed = 12345;
  DecoderKind decoder = DecoderKind::AltMin;
  std::string output_path;  // empty: CSV to stdout, no SVG
  int workers = 1;
};

// Throws ConfigError when fields required by the experiment kind are
// missing or inconsistent; no work happens before this passes.
void validate(const ExperimentConfig& cfg);

// Full round-trip serialization; unknown keys are rejected, absent keys
// keep the base (default) values.
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const ExperimentConfig& base = ExperimentConfig{});

// Experiment-identity fields only (no output_path / workers): this is what
// output metadata echoes, so reruns into different files or with different
// worker counts still produce byte-identical data lines.
nlohmann::json config_identity_json(const ExperimentConfig& cfg);

// The preset sparse-factor phase sweep: 8x8, r=1, l1=l2=2, rank-one
// ensemble, k = 2..8 step 2.
ExperimentConfig example1_preset();

struct SweepRecord {
  int k = 0;
  long long trials = 0;
  long long successes = 0;
  double success_rate = 0.0;
  double mean_rel_err = 0.0;
  long long median_iters = 0;  // lower median
  double wall_seconds = 0.0;   // CSV placeholder, always 0; real timing on stderr
  long long budget_refusals = 0;  // diagnostics only, not serialized
};

// Harness constants (documented rather than configurable: the config
// schema is fixed, these are the values it leaves open).
inline constexpr int kEnumCloudSize = 100;        // per-trial candidate cloud
inline constexpr double kEnumTol = 1e-9;          // enumeration residual tol
inline constexpr double kSparseSuccessRelErr = 1e-6;
inline constexpr double kPlantedFactorBound = 10.0;
inline constexpr double kConcDeltaMin = 1e-3;     // delta grid lower end
inline constexpr int kConcDeltaPoints = 12;
inline constexpr double kLowRankDimBound = 1.0;   // L for dimension runs
inline constexpr double kLowRankDimRhoMin = 0.6;  // x L
inline constexpr double kLowRankDimRhoMax = 1.5;  // x L
inline constexpr int kLowRankDimLevels = 4;
inline constexpr double kFactorDimRhoMin = 0.02;
inline constexpr double kFactorDimRhoMax = 0.64;
inline constexpr int kFactorDimLevels = 6;

// One sweep point per k: `trials` independent (ensemble, planted matrix,
// decode) instances on derived seeds. Success means rel_error against the
// plant is below the decoder's threshold (altmin 1e-4, sparse factor 1e-6,
// enumeration: the planted member itself is returned).
std::vector<SweepRecord> run_phase(const ExperimentConfig& cfg);

// Delta-grid concentration verification for a seeded rank-r Gaussian
// product matrix (or any explicitly supplied x). The grid is geometric
// with kConcDeltaPoints points on [kConcDeltaMin, s^2 sigma_1]; empirical
// probabilities share one coupled draw stream; k is taken from k_min.
std::vector<BoundReport> run_concentration(const ExperimentConfig& cfg);
std::vector<BoundReport> run_concentration_for(const Matrix& x, double s,
                                               int k, long long trials,
                                               std::uint64_t seed,
                                               int workers = 1);

struct DimensionRun {
  DimensionEstimate estimate;
  double reference = 0.0;  // manifold_dim or l1 * r
  std::string label;
};

// l1 > 0 selects the sparse-factor factor set (reference l1 * r), else the
// bounded low-rank set (reference manifold_dim); `trials` is the sample
// count. Point-cloud estimates go through estimate_dim directly.
std::vector<DimensionRun> run_dimension(const ExperimentConfig& cfg);

std::string phase_csv(const std::vector<SweepRecord>& records,
                      const ExperimentConfig& cfg);
std::string phase_svg(const std::vector<SweepRecord>& records, int reference_k);
std::string concentration_csv(const std::vector<BoundReport>& rows,
                              const nlohmann::json* config_meta);
std::string dimension_csv(const DimensionRun& run,
                          const nlohmann::json* config_meta);

// Validates, dispatches on experiment kind, and writes CSV (+ SVG for
// sweeps) to output_path or stdout.
void run_experiment(const ExperimentConfig& cfg);

}  // namespace mincomp
