#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mincomp/linalg.hpp"
#include "mincomp/measurement.hpp"

namespace mincomp {

// Tail-bound machinery for the event |a^T X b| <= delta with (a, b) uniform
// on radius-s balls: the exact dimensional constant, the matrix-dependent
// bound function f, the single- and k-measurement probability bounds, and
// seeded Monte-Carlo estimators to verify them against.

inline constexpr double kZ99 = 2.5758293035489004;  // 99% two-sided normal quantile

// D_{r,m,n} = 2 V(n-r,1) V(m-r,1) V(r-1,1) / (V(m,1) V(n,1)), exact via
// log-Gamma ball volumes. Requires 1 <= r <= min(m, n).
double d_const(int r, int m, int n);

// The simplified comparison value 2^{(m+n)/2 - r}. Not an upper bound for
// d_const everywhere (the underlying 2^{k/2} < V(k,1) step fails from
// k = 5 on), so callers compare the two rather than assume dominance.
double d_paper_bound(int r, int m, int n);

// f(X, s, delta), including the 1/Delta(X) prefactor; natural log in the
// rank-1 branch. Rank 1 with delta = 0 returns +infinity (the bound is
// vacuous there; the event itself has probability 0).
double f_bound(const Matrix& x, double s, double delta, double rank_tol = 1e-10);

// delta * D * f; _raw may exceed 1 (or be +infinity in the vacuous rank-1
// delta = 0 case), the plain version clips into [0, 1] for reporting.
double lemma_bound_single_raw(const Matrix& x, double s, double delta);
double lemma_bound_single(const Matrix& x, double s, double delta);

// min(1, delta^k 2^{k(m+n)/2 - kr} f^k), evaluated in the log domain.
double lemma_bound_k(const Matrix& x, double s, double delta, int k);

// Wilson score interval half-width at confidence level z.
double wilson_halfwidth(long long hits, long long trials, double z = kZ99);

struct McEstimate {
  double prob = 0.0;
  double ci_halfwidth = 0.0;
  long long hits = 0;
  long long trials = 0;
};

// Empirical P[|a^T x b| <= delta] over seeded i.i.d. draws. The grid
// version reuses one draw stream across all deltas, so the empirical curve
// is exactly monotone in delta. Trials are processed in fixed-size
// partitions with derived per-partition seeds; the result is independent
// of the worker count.
McEstimate mc_prob_single(const Matrix& x, double s, double delta,
                          long long trials, std::uint64_t seed, int workers = 1);
std::vector<McEstimate> mc_prob_grid(const Matrix& x, double s,
                                     const std::vector<double>& deltas,
                                     long long trials, std::uint64_t seed,
                                     int workers = 1);

// For a rank-one ensemble: lhs = |apply(e, x_center)|_2 and
// rhs = 2 s^2 sqrt(k) |x - x_center|_F + |apply(e, x)|_2.
// lhs <= rhs holds deterministically (triangle inequality plus the
// measurement-norm cap); the pair is returned for direct inspection.
std::pair<double, double> perturbation_gap(const MeasurementEnsemble& e,
                                           const Matrix& x,
                                           const Matrix& x_center);

// One delta-grid row of a concentration verification run.
struct BoundReport {
  int m = 0, n = 0, r = 0;
  double s = 1.0;
  double delta = 0.0;
  int k = 1;
  long long trials = 0;
  double empirical_prob = 0.0;
  double ci_halfwidth = 0.0;
  double f_value = 0.0;
  double d_exact = 0.0;
  double d_paper_bound = 0.0;
  double single_bound = 0.0;
  double k_bound = 0.0;
};

}  // namespace mincomp
