#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mincomp/linalg.hpp"
#include "mincomp/rng.hpp"

namespace mincomp {

// Generative descriptions of the bounded sets a decoder is asked to be
// correct on, plus a box-counting dimension estimator for sampled clouds.

struct LowRankSpec {
  int m = 0, n = 0, r = 0;
  double L = 1.0;  // Frobenius bound on generated matrices
};

// Products X = X1^T X2 with X1 (r x m) carrying exactly l1 nonzero columns
// and X2 (r x n) exactly l2; factors clipped to Frobenius norm < L.
struct SparseFactorSpec {
  int m = 0, n = 0, r = 0, l1 = 0, l2 = 0;
  double L = 10.0;
};

struct PointCloudSpec {
  std::vector<Matrix> points;
};

struct SupportSpec {
  std::variant<LowRankSpec, SparseFactorSpec, PointCloudSpec> variant;
  double epsilon = 0.01;  // reported truncation probability, not enforced per-sample
};

// Throws std::invalid_argument when the spec violates its construction
// conditions (LowRank: 1 <= r <= min(m,n); SparseFactor: r <= l1 < m/2 and
// r <= l2 <= n/2 - 1/r; PointCloud: nonempty, common shape, finite).
void validate_spec(const SupportSpec& spec);

// Dimension of the rank-r stratum inside m x n matrices: (m + n - r) r.
int manifold_dim(int m, int n, int r);

std::vector<Matrix> sample_support(const SupportSpec& spec, int count,
                                   std::uint64_t seed);

// i.i.d. standard Gaussian entries, filled in storage (column-major) order;
// the fill order is part of the seed contract.
Matrix gaussian_matrix(int rows, int cols, Rng& rng);

// One r x m factor with exactly l nonzero columns (positions uniform,
// entries standard Gaussian), resampled until its Frobenius norm is < L.
// Validates only r <= l <= m; the product-set conditions above do not
// constrain a factor set taken on its own.
Matrix sample_factor(int r, int m, int l, double L, Rng& rng);

// Occupied cells of the axis-aligned grid with cell side 2*rho/sqrt(m*n)
// anchored at the origin, so each cell has diagonal exactly 2*rho. An
// upper-bound surrogate for the covering number at radius rho.
long long covering_count(const std::vector<Matrix>& points, double rho);

struct DimensionEstimate {
  std::vector<double> rho_schedule;   // decreasing
  std::vector<long long> counts;      // occupied cells per rho
  double slope = 0.0;                 // box-counting dimension, clamped >= 0
  double r2 = 1.0;                    // regression fit quality
};

// Least-squares slope of log N(rho) against log(1/rho) over a geometric
// schedule from rho_max down to rho_min. Meaningful only while occupancy
// saturates; callers should keep count >= 10 * expected cells at rho_min.
DimensionEstimate estimate_dim(const std::vector<Matrix>& points,
                               double rho_min, double rho_max, int levels);

// Cloud exchange format: `# m,n` comment line, then one vec(matrix) row
// (column-major) per point.
std::string cloud_to_csv(const std::vector<Matrix>& points);
std::vector<Matrix> cloud_from_csv(const std::string& text);

}  // namespace mincomp
