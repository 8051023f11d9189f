#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "mincomp/support.hpp"
#include "mincomp/rng.hpp"
#include "test_util.hpp"

using namespace mincomp;

namespace {

// Independent occupancy oracle: quantize with the same geometry but an
// ordered set of integer tuples instead of the hashed key packing.
long long covering_oracle(const std::vector<Matrix>& points, double rho) {
  const double dim = static_cast<double>(points[0].size());
  const double side = 2.0 * rho / std::sqrt(dim);
  std::set<std::vector<long long>> cells;
  for (const Matrix& p : points) {
    std::vector<long long> key;
    key.reserve(static_cast<std::size_t>(p.size()));
    for (int j = 0; j < p.cols(); ++j) {
      for (int i = 0; i < p.rows(); ++i) {
        key.push_back(static_cast<long long>(std::floor(p(i, j) / side)));
      }
    }
    cells.insert(std::move(key));
  }
  return static_cast<long long>(cells.size());
}

std::vector<Matrix> segment_cloud(int count) {
  // t * E11 for t on [0, 1); an exactly one-dimensional set. Keeping t
  // strictly below 1 pins every occupancy count below independent of how
  // the top boundary would round.
  std::vector<Matrix> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    Matrix p = Matrix::Zero(2, 2);
    p(0, 0) = static_cast<double>(i) / count;
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST_CASE("manifold dimension formula") {
  CHECK(manifold_dim(3, 3, 1) == 5);
  CHECK(manifold_dim(8, 8, 1) == 15);
  CHECK(manifold_dim(8, 8, 2) == 28);
  CHECK(manifold_dim(4, 6, 3) == 21);
  // Full rank recovers the ambient dimension; rank 0 is the origin.
  CHECK(manifold_dim(5, 7, 5) == 35);
  CHECK(manifold_dim(3, 3, 0) == 0);
  CHECK_THROWS_AS(manifold_dim(3, 3, 4), std::invalid_argument);
  CHECK_THROWS_AS(manifold_dim(3, 3, -1), std::invalid_argument);
}

TEST_CASE("spec validation enforces construction conditions") {
  SupportSpec ok{LowRankSpec{4, 5, 2, 1.0}, 0.01};
  CHECK_NOTHROW(validate_spec(ok));
  CHECK_THROWS_AS(validate_spec(SupportSpec{LowRankSpec{4, 5, 0, 1.0}, 0.01}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_spec(SupportSpec{LowRankSpec{4, 5, 5, 1.0}, 0.01}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_spec(SupportSpec{LowRankSpec{4, 5, 2, 0.0}, 0.01}),
                  std::invalid_argument);

  // 8x8 rank-1 with l1 = l2 = 2: 1 <= 2, 2*2 < 8, 2 <= 8/2 - 1.
  CHECK_NOTHROW(validate_spec(SupportSpec{SparseFactorSpec{8, 8, 1, 2, 2, 10.0}, 0.01}));
  // l1 too large: 2 l1 < m fails.
  CHECK_THROWS_AS(validate_spec(SupportSpec{SparseFactorSpec{8, 8, 1, 4, 2, 10.0}, 0.01}),
                  std::invalid_argument);
  // l2 beyond n/2 - 1/r.
  CHECK_THROWS_AS(validate_spec(SupportSpec{SparseFactorSpec{8, 8, 1, 2, 4, 10.0}, 0.01}),
                  std::invalid_argument);
  // r > l1.
  CHECK_THROWS_AS(validate_spec(SupportSpec{SparseFactorSpec{12, 12, 3, 2, 4, 10.0}, 0.01}),
                  std::invalid_argument);

  CHECK_THROWS_AS(validate_spec(SupportSpec{PointCloudSpec{}, 0.01}), std::invalid_argument);
  std::vector<Matrix> mixed{Matrix::Zero(2, 2), Matrix::Zero(2, 3)};
  CHECK_THROWS_AS(validate_spec(SupportSpec{PointCloudSpec{mixed}, 0.01}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_spec(SupportSpec{LowRankSpec{4, 5, 2, 1.0}, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("low-rank samples have the advertised rank and norm bound") {
  SupportSpec spec{LowRankSpec{4, 5, 2, 1.5}, 0.01};
  const std::vector<Matrix> pts = sample_support(spec, 200, 42);
  REQUIRE(pts.size() == 200);
  for (const Matrix& p : pts) {
    REQUIRE(p.rows() == 4);
    REQUIRE(p.cols() == 5);
    CHECK(p.norm() < 1.5 + 1e-12);
    CHECK(svd(p).numerical_rank <= 2);
  }
  // Draws are not clustered at the boundary: rejection keeps the interior.
  int interior = 0;
  for (const Matrix& p : pts) interior += p.norm() < 1.2 ? 1 : 0;
  CHECK(interior > 0);
}

TEST_CASE("sparse factor samples have the advertised support and rank") {
  SupportSpec spec{SparseFactorSpec{8, 8, 1, 2, 2, 10.0}, 0.01};
  const std::vector<Matrix> pts = sample_support(spec, 100, 7);
  for (const Matrix& p : pts) {
    int nonzero_rows = 0, nonzero_cols = 0;
    for (int i = 0; i < 8; ++i) nonzero_rows += p.row(i).norm() > 0 ? 1 : 0;
    for (int j = 0; j < 8; ++j) nonzero_cols += p.col(j).norm() > 0 ? 1 : 0;
    CHECK(nonzero_rows <= 2);
    CHECK(nonzero_cols <= 2);
    CHECK(svd(p).numerical_rank <= 1);
    CHECK(p.norm() < 100.0);  // product of two factors each below L = 10
  }
}

TEST_CASE("factor sampler places exactly l nonzero columns and respects L") {
  Rng rng(5);
  std::set<std::vector<int>> supports;
  for (int t = 0; t < 200; ++t) {
    const Matrix f = sample_factor(2, 6, 3, 4.0, rng);
    REQUIRE(f.rows() == 2);
    REQUIRE(f.cols() == 6);
    CHECK(f.norm() < 4.0);
    std::vector<int> sup;
    for (int j = 0; j < 6; ++j) {
      if (f.col(j).norm() > 0) sup.push_back(j);
    }
    CHECK(sup.size() == 3);
    supports.insert(sup);
  }
  // All C(6,3) = 20 supports appear across 200 draws with high probability.
  CHECK(supports.size() == 20);
  CHECK_THROWS_AS(sample_factor(4, 6, 3, 4.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_factor(2, 6, 7, 4.0, rng), std::invalid_argument);
}

TEST_CASE("point cloud sampling draws members uniformly") {
  std::vector<Matrix> members;
  for (int i = 0; i < 5; ++i) {
    Matrix p = Matrix::Zero(2, 2);
    p(0, 0) = i;
    members.push_back(p);
  }
  SupportSpec spec{PointCloudSpec{members}, 0.0};
  const std::vector<Matrix> draws = sample_support(spec, 2000, 3);
  std::vector<int> hist(5, 0);
  for (const Matrix& d : draws) hist[static_cast<int>(d(0, 0))]++;
  for (int i = 0; i < 5; ++i) CHECK(hist[i] > 300);  // expected 400 each
}

TEST_CASE("sampling is deterministic in the seed") {
  SupportSpec spec{LowRankSpec{3, 3, 1, 1.0}, 0.01};
  const std::vector<Matrix> a = sample_support(spec, 50, 11);
  const std::vector<Matrix> b = sample_support(spec, 50, 11);
  const std::vector<Matrix> c = sample_support(spec, 50, 12);
  bool identical = true, differs = false;
  for (int i = 0; i < 50; ++i) {
    identical = identical && test_util::same_matrix(a[i], b[i]);
    differs = differs || !test_util::same_matrix(a[i], c[i]);
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("covering count matches the independent tuple-set oracle") {
  SupportSpec spec{LowRankSpec{3, 3, 2, 1.0}, 0.01};
  const std::vector<Matrix> pts = sample_support(spec, 2000, 9);
  for (double rho : {0.8, 0.4, 0.2, 0.1, 0.05}) {
    CHECK(covering_count(pts, rho) == covering_oracle(pts, rho));
  }
}

TEST_CASE("covering count on an exact segment is the exact cell count") {
  // Points fill [0,1) x {0}^3 inside 2x2 matrices; cell side 2*rho/2 = rho,
  // so occupancy over [0,1) is exactly ceil(1/rho) cells.
  const std::vector<Matrix> pts = segment_cloud(10000);
  CHECK(covering_count(pts, 0.05) == 20);
  CHECK(covering_count(pts, 0.1) == 10);
  CHECK(covering_count(pts, 0.25) == 4);
  CHECK(covering_count(pts, 2.0) == 1);
}

TEST_CASE("halving the radius cannot reduce occupancy") {
  SupportSpec spec{LowRankSpec{3, 3, 1, 1.0}, 0.01};
  const std::vector<Matrix> pts = sample_support(spec, 3000, 13);
  double rho = 1.6;
  long long prev = covering_count(pts, rho);
  for (int level = 0; level < 6; ++level) {
    rho *= 0.5;
    const long long next = covering_count(pts, rho);
    CHECK(next >= prev);
    prev = next;
  }
}

TEST_CASE("occupancy is monotone under taking subsets of the cloud") {
  SupportSpec spec{LowRankSpec{3, 3, 1, 1.0}, 0.01};
  const std::vector<Matrix> pts = sample_support(spec, 1000, 14);
  const std::vector<Matrix> half(pts.begin(), pts.begin() + 500);
  for (double rho : {0.6, 0.3, 0.15}) {
    CHECK(covering_count(half, rho) <= covering_count(pts, rho));
  }
}

TEST_CASE("dimension estimate recovers a segment exactly") {
  const std::vector<Matrix> pts = segment_cloud(10000);
  const DimensionEstimate est = estimate_dim(pts, 0.0125, 0.1, 4);
  REQUIRE(est.rho_schedule.size() == 4);
  CHECK(est.rho_schedule.front() == doctest::Approx(0.1));
  CHECK(est.rho_schedule.back() == doctest::Approx(0.0125));
  // Halving schedule doubles occupancy at every level.
  REQUIRE(est.counts.size() == 4);
  CHECK(est.counts[0] == 10);
  CHECK(est.counts[1] == 20);
  CHECK(est.counts[2] == 40);
  CHECK(est.counts[3] == 80);
  CHECK(est.slope == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(est.r2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("dimension estimate recovers a filled square") {
  // Uniform draws from [-2,2]^2 embedded in the (0,0),(1,0) entries.
  Rng rng(100);
  std::vector<Matrix> pts;
  pts.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    Matrix p = Matrix::Zero(2, 1);
    p(0, 0) = 4.0 * rng.uniform01() - 2.0;
    p(1, 0) = 4.0 * rng.uniform01() - 2.0;
    pts.push_back(p);
  }
  const DimensionEstimate est = estimate_dim(pts, 0.04, 0.32, 4);
  CHECK(est.slope > 1.7);
  CHECK(est.slope < 2.3);
}

TEST_CASE("degenerate clouds give slope zero with perfect fit") {
  std::vector<Matrix> single{Matrix::Zero(2, 2)};
  const DimensionEstimate est = estimate_dim(single, 0.05, 0.4, 4);
  CHECK(est.slope == 0.0);
  CHECK(est.r2 == 1.0);
  for (long long c : est.counts) CHECK(c == 1);
}

TEST_CASE("estimator rejects malformed schedules") {
  const std::vector<Matrix> pts = segment_cloud(100);
  CHECK_THROWS_AS(estimate_dim(pts, 0.05, 0.4, 3), std::invalid_argument);
  CHECK_THROWS_AS(estimate_dim(pts, 0.4, 0.05, 4), std::invalid_argument);
  CHECK_THROWS_AS(estimate_dim(pts, 0.0, 0.4, 4), std::invalid_argument);
  CHECK_THROWS_AS(estimate_dim({}, 0.05, 0.4, 4), std::invalid_argument);
}

TEST_CASE("cloud csv round trips bit-exactly") {
  SupportSpec spec{LowRankSpec{3, 2, 1, 1.0}, 0.01};
  const std::vector<Matrix> pts = sample_support(spec, 25, 77);
  const std::string csv = cloud_to_csv(pts);
  CHECK(csv.rfind("# 3,2\n", 0) == 0);
  const std::vector<Matrix> back = cloud_from_csv(csv);
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    REQUIRE(back[i].rows() == 3);
    REQUIRE(back[i].cols() == 2);
    CHECK(test_util::same_matrix(back[i], pts[i]));
  }
}

TEST_CASE("low-rank cloud at (2,2,1) estimates below ambient dimension") {
  SupportSpec spec{LowRankSpec{2, 2, 1, 1.0}, 0.01};
  const std::vector<Matrix> pts = sample_support(spec, 100000, 5);
  const DimensionEstimate est = estimate_dim(pts, 0.6, 1.5, 4);
  // Stratum dimension is (2+2-1)*1 = 3; the surrogate stays below 4.
  CHECK(est.slope <= 3.5);
  CHECK(est.slope > 1.0);
}
