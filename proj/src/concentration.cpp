#include "mincomp/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mincomp/parallel.hpp"

namespace mincomp {

namespace {

constexpr long long kMcPartition = 1 << 16;  // trials per derived-seed block
constexpr std::uint64_t kTagMcPartition = 0x4d43u;  // "MC"

struct Spectrum {
  int rank = 0;
  double sigma1 = 0.0;
  double log_delta_product = 0.0;
};

Spectrum spectrum_of(const Matrix& x, double rank_tol) {
  const SvdResult dec = svd(x, rank_tol);
  if (dec.numerical_rank < 1) {
    throw std::domain_error("concentration bound: matrix must have rank >= 1");
  }
  Spectrum sp;
  sp.rank = dec.numerical_rank;
  sp.sigma1 = dec.singular_values(0);
  for (int i = 0; i < dec.numerical_rank; ++i) {
    sp.log_delta_product += std::log(dec.singular_values(i));
  }
  return sp;
}

void check_sd(double s, double delta) {
  if (!(s > 0.0)) throw std::invalid_argument("concentration bound: s must be positive");
  if (!(delta >= 0.0)) throw std::invalid_argument("concentration bound: delta must be >= 0");
}

}  // namespace

double d_const(int r, int m, int n) {
  if (m < 1 || n < 1 || r < 1 || r > std::min(m, n)) {
    throw std::invalid_argument("d_const: need 1 <= r <= min(m, n)");
  }
  return 2.0 * ball_volume(n - r, 1.0) * ball_volume(m - r, 1.0) *
         ball_volume(r - 1, 1.0) / (ball_volume(m, 1.0) * ball_volume(n, 1.0));
}

double d_paper_bound(int r, int m, int n) {
  if (m < 1 || n < 1 || r < 1 || r > std::min(m, n)) {
    throw std::invalid_argument("d_paper_bound: need 1 <= r <= min(m, n)");
  }
  return std::exp2(0.5 * (m + n) - r);
}

double f_bound(const Matrix& x, double s, double delta, double rank_tol) {
  check_sd(s, delta);
  const Spectrum sp = spectrum_of(x, rank_tol);
  const double inv_delta_prod = std::exp(-sp.log_delta_product);
  if (sp.rank == 1) {
    if (delta == 0.0) return std::numeric_limits<double>::infinity();
    const double arg = std::max(s * s * sp.sigma1 / delta, 1.0);
    return inv_delta_prod * (2.0 / (s * s)) * (1.0 + std::log(arg));
  }
  const int r = sp.rank;
  const double term1 =
      std::pow(delta, r - 1) * ball_volume(r, 1.0) / std::pow(s, 2 * r);
  const double term2 = sphere_area(r - 1, 1.0) * std::pow(sp.sigma1, r - 1) /
                       (s * s * (r - 1));
  return inv_delta_prod * (term1 + term2);
}

double lemma_bound_single_raw(const Matrix& x, double s, double delta) {
  const double f = f_bound(x, s, delta);
  if (std::isinf(f)) return f;  // rank 1, delta = 0: vacuous
  return delta * d_const(spectrum_of(x, 1e-10).rank, static_cast<int>(x.rows()),
                         static_cast<int>(x.cols())) *
         f;
}

double lemma_bound_single(const Matrix& x, double s, double delta) {
  return std::clamp(lemma_bound_single_raw(x, s, delta), 0.0, 1.0);
}

double lemma_bound_k(const Matrix& x, double s, double delta, int k) {
  if (k < 1) throw std::invalid_argument("lemma_bound_k: k must be >= 1");
  check_sd(s, delta);
  const Spectrum sp = spectrum_of(x, 1e-10);
  if (delta == 0.0) {
    // delta^k kills the bound for rank > 1; the rank-1 branch is vacuous.
    return sp.rank > 1 ? 0.0 : 1.0;
  }
  const double f = f_bound(x, s, delta);
  const double log_factor = std::log(delta) +
                            (0.5 * (x.rows() + x.cols()) - sp.rank) * M_LN2 +
                            std::log(f);
  return std::min(1.0, std::exp(k * log_factor));
}

double wilson_halfwidth(long long hits, long long trials, double z) {
  if (trials < 1) throw std::invalid_argument("wilson_halfwidth: trials must be >= 1");
  if (hits < 0 || hits > trials) throw std::invalid_argument("wilson_halfwidth: hits out of range");
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / t;
  const double z2 = z * z;
  return z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / (1.0 + z2 / t);
}

std::vector<McEstimate> mc_prob_grid(const Matrix& x, double s,
                                     const std::vector<double>& deltas,
                                     long long trials, std::uint64_t seed,
                                     int workers) {
  check_sd(s, deltas.empty() ? 0.0 : deltas.front());
  require_finite(x, "mc_prob_grid");
  if (deltas.empty()) throw std::invalid_argument("mc_prob_grid: empty delta grid");
  for (double d : deltas) check_sd(s, d);
  if (trials < 1) throw std::invalid_argument("mc_prob_grid: trials must be >= 1");

  const int m = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  const long long parts = (trials + kMcPartition - 1) / kMcPartition;
  std::vector<std::vector<long long>> slot(
      parts, std::vector<long long>(deltas.size(), 0));

  parallel_for(parts, workers, [&](long long p) {
    Rng rng(derive_seed(seed, kTagMcPartition, static_cast<std::uint64_t>(p), 0));
    const long long todo = std::min<long long>(kMcPartition, trials - p * kMcPartition);
    auto& counts = slot[p];
    for (long long i = 0; i < todo; ++i) {
      const Vector a = sample_uniform_ball(m, s, rng);
      const Vector b = sample_uniform_ball(n, s, rng);
      const double t = std::abs(a.dot(x * b));
      for (std::size_t j = 0; j < deltas.size(); ++j) {
        if (t <= deltas[j]) ++counts[j];
      }
    }
  });

  std::vector<McEstimate> out(deltas.size());
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    long long hits = 0;
    for (long long p = 0; p < parts; ++p) hits += slot[p][j];
    out[j].hits = hits;
    out[j].trials = trials;
    out[j].prob = static_cast<double>(hits) / static_cast<double>(trials);
    out[j].ci_halfwidth = wilson_halfwidth(hits, trials);
  }
  return out;
}

McEstimate mc_prob_single(const Matrix& x, double s, double delta,
                          long long trials, std::uint64_t seed, int workers) {
  return mc_prob_grid(x, s, {delta}, trials, seed, workers).front();
}

std::pair<double, double> perturbation_gap(const MeasurementEnsemble& e,
                                           const Matrix& x,
                                           const Matrix& x_center) {
  if (e.kind != EnsembleKind::RankOne) {
    throw std::invalid_argument("perturbation_gap: requires a rank-one ensemble");
  }
  require_same_shape(x, x_center);
  const double rho = (x - x_center).norm();
  const double lhs = apply(e, x_center).norm();
  const double rhs =
      2.0 * e.s * e.s * std::sqrt(static_cast<double>(e.k)) * rho +
      apply(e, x).norm();
  return {lhs, rhs};
}

}  // namespace mincomp
