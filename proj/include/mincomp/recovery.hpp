#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "mincomp/measurement.hpp"
#include "mincomp/support.hpp"

namespace mincomp {

// Three concrete decoders: exact enumeration over a finite candidate set,
// rank-constrained alternating least squares, and column-support
// enumeration with restricted alternating least squares. Plus a null-space
// probe measuring how far the measurement map is from collapsing sampled
// differences.

enum class Outcome { Recovered, Ambiguous, NoCandidate, NotConverged };

const char* to_string(Outcome o);

struct DecodeResult {
  Outcome outcome = Outcome::NoCandidate;
  Matrix x_hat;               // valid iff has_estimate
  bool has_estimate = false;
  long long iterations = 0;   // total across restarts / enumeration branches
  double residual = 0.0;      // |apply(e, x_hat) - y|_2 of the best candidate
  double rel_error = 0.0;     // valid iff has_rel_error (see attach_truth)
  bool has_rel_error = false;
  int ridge_fallbacks = 0;    // degenerate least-squares substeps regularized
  int candidate_index = -1;   // enumeration: index of the recovered candidate
  int num_matches = 0;        // enumeration: candidates within tolerance
};

struct AltMinOptions {
  int r = 1;
  int max_iters = 500;
  double tol = 1e-10;       // residual-decrease stall threshold and, scaled by
                            // max(1, |y|), the acceptance threshold
  int restarts = 10;
  enum class Init { Random, Spectral } init = Init::Random;
  double success_rel_err = 1e-4;  // harness-level success criterion
  std::uint64_t seed = 0;
};

void validate(const AltMinOptions& opts);

// Thrown when a support enumeration would exceed its configured budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Recovered iff exactly one candidate satisfies |apply(e, c) - y|_2 <= tol;
// Ambiguous for two or more, NoCandidate for none.
DecodeResult decode_enumerate(const MeasurementEnsemble& e,
                              const MeasurementVector& y,
                              const std::vector<Matrix>& candidates,
                              double tol);

// Alternating exact least squares on X = U V^T. Restarts are independent
// seeded runs reduced by best residual (ties to the earliest restart);
// r = 0 degenerates to the zero matrix. Recovered when the best residual
// is <= tol * max(1, |y|_2), else NotConverged with the best iterate.
DecodeResult decode_altmin(const MeasurementEnsemble& e,
                           const MeasurementVector& y,
                           const AltMinOptions& opts);

// Enumerates all (l1, l2)-column-support pairs lexicographically, runs
// support-restricted alternating least squares on each, and reduces:
// Recovered when all fitting supports agree on one reconstruction (within
// 1e-6 Frobenius distance), Ambiguous when structurally distinct
// reconstructions fit, NoCandidate when none fit. Refuses with BudgetError
// when C(m, l1) * C(n, l2) exceeds the budget.
DecodeResult decode_sparse_factor(const MeasurementEnsemble& e,
                                  const MeasurementVector& y, int r, int l1,
                                  int l2, const AltMinOptions& opts,
                                  long long budget = 1000000);

struct ProbeResult {
  double min_gap = 0.0;      // min |apply(e, X - X')| / |X - X'| over pairs
  long long collisions = 0;  // pairs with gap below 1e-9
  long long pairs = 0;
};

// Samples `trials` pairs X != X' from the support spec with derived
// per-trial seeds; degenerate draws are resampled up to a retry cap.
ProbeResult injectivity_probe(const MeasurementEnsemble& e,
                              const SupportSpec& spec, long long trials,
                              std::uint64_t seed);

// All pairs of an explicit cloud; coincident points count as collisions.
ProbeResult injectivity_exhaustive(const MeasurementEnsemble& e,
                                   const std::vector<Matrix>& points);

// Sets rel_error = |x_hat - truth|_F / |truth|_F; results without an
// estimate are scored against the zero matrix (rel_error 1 for truth != 0).
void attach_truth(DecodeResult& result, const Matrix& truth);

nlohmann::json result_to_json(const DecodeResult& result);

}  // namespace mincomp
