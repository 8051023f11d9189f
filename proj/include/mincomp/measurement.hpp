#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mincomp/linalg.hpp"
#include "mincomp/rng.hpp"

namespace mincomp {

// A measurement vector y collects the k functional values <A_i, X>.
using MeasurementVector = Vector;

enum class EnsembleKind { Dense, RankOne };

const char* to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(const std::string& name);

// k random linear functionals on m x n matrices. Dense stores the matrices
// A_i themselves; RankOne stores factor pairs (a_i, b_i) realizing
// A_i = a_i b_i^T at (m + n)-real storage per measurement. Entries are a
// pure function of (kind, m, n, k, s, seed); serialization stores only that
// tuple and regenerates on load. k = 0 is allowed (empty functional list);
// probes use it as the degenerate always-colliding map.
struct MeasurementEnsemble {
  EnsembleKind kind = EnsembleKind::Dense;
  int m = 0;
  int n = 0;
  int k = 0;
  double s = 1.0;
  std::uint64_t seed = 0;
  std::vector<Matrix> mats;    // Dense: k matrices, each m x n
  std::vector<Vector> lefts;   // RankOne: k vectors in R^m
  std::vector<Vector> rights;  // RankOne: k vectors in R^n
};

// Uniform draw from the ball of radius s in R^dim: standard-normal direction
// normalized to unit length, radius s * U^(1/dim).
Vector sample_uniform_ball(int dim, double s, Rng& rng);

MeasurementEnsemble sample_ensemble(EnsembleKind kind, int m, int n, int k,
                                    double s, std::uint64_t seed);

MeasurementVector apply(const MeasurementEnsemble& e, const Matrix& x);

// Factored input x = u v^T with u m x r, v n x r; O((m + n) r) per rank-one
// measurement instead of materializing x.
MeasurementVector apply_factored(const MeasurementEnsemble& e, const Matrix& u,
                                 const Matrix& v);

// Stored reals: Dense k*m*n, RankOne k*(m + n).
long long storage_cost(const MeasurementEnsemble& e);

nlohmann::json ensemble_to_json(const MeasurementEnsemble& e);
MeasurementEnsemble ensemble_from_json(const nlohmann::json& j);

}  // namespace mincomp
