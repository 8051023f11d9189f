#include "mincomp/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mincomp {

namespace {

constexpr std::uint64_t kTagRestart = 0x524553u;   // altmin restart streams
constexpr std::uint64_t kTagSupport = 0x535550u;   // per-support decode streams
constexpr std::uint64_t kTagProbe = 0x505242u;     // probe pair streams
constexpr double kRidge = 1e-12;
constexpr double kDistinctTol = 1e-6;
constexpr double kCollisionTol = 1e-9;
constexpr double kDegenerateTol = 1e-12;

// Least-squares solve with a ridge fallback when the design is
// column-rank-deficient; `fallbacks` counts the degenerate solves.
Vector solve_ls(const Matrix& design, const Vector& rhs, int* fallbacks) {
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < design.cols()) {
    ++*fallbacks;
    const Matrix gram = design.transpose() * design +
                        kRidge * Matrix::Identity(design.cols(), design.cols());
    return gram.ldlt().solve(design.transpose() * rhs);
  }
  return qr.solve(rhs);
}

// Design matrix of the U-substep: row i is vec of the m x r matrix pairing
// with vec(U) to give measurement i of U V^T.
Matrix u_design(const MeasurementEnsemble& e, const Matrix& v) {
  const int r = static_cast<int>(v.cols());
  Matrix design(e.k, e.m * r);
  for (int i = 0; i < e.k; ++i) {
    Matrix row;
    if (e.kind == EnsembleKind::Dense) {
      row = e.mats[i] * v;                                   // <A_i V, U>
    } else {
      row = e.lefts[i] * (v.transpose() * e.rights[i]).transpose();
    }
    design.row(i) = Eigen::Map<const Vector>(row.data(), row.size());
  }
  return design;
}

Matrix v_design(const MeasurementEnsemble& e, const Matrix& u) {
  const int r = static_cast<int>(u.cols());
  Matrix design(e.k, e.n * r);
  for (int i = 0; i < e.k; ++i) {
    Matrix row;
    if (e.kind == EnsembleKind::Dense) {
      row = e.mats[i].transpose() * u;                       // <A_i^T U, V>
    } else {
      row = e.rights[i] * (u.transpose() * e.lefts[i]).transpose();
    }
    design.row(i) = Eigen::Map<const Vector>(row.data(), row.size());
  }
  return design;
}

Matrix spectral_init_v(const MeasurementEnsemble& e, const MeasurementVector& y,
                       int r) {
  Matrix back = Matrix::Zero(e.m, e.n);
  for (int i = 0; i < e.k; ++i) {
    if (e.kind == EnsembleKind::Dense) {
      back += y(i) * e.mats[i];
    } else {
      back += y(i) * (e.lefts[i] * e.rights[i].transpose());
    }
  }
  const SvdResult dec = svd(back);
  const int cols = std::min<int>(r, static_cast<int>(dec.right_factors.cols()));
  Matrix v0 = Matrix::Zero(e.n, r);
  for (int j = 0; j < cols; ++j) {
    v0.col(j) = dec.right_factors.col(j) * std::sqrt(dec.singular_values(j));
  }
  return v0;
}

struct Combinations {
  // Lexicographic l-subsets of [0, m).
  explicit Combinations(int m, int l) : m_(m), idx_(l) {
    for (int i = 0; i < l; ++i) idx_[i] = i;
    done_ = l > m;
  }
  bool done() const { return done_; }
  const std::vector<int>& current() const { return idx_; }
  void advance() {
    const int l = static_cast<int>(idx_.size());
    int i = l - 1;
    while (i >= 0 && idx_[i] == m_ - l + i) --i;
    if (i < 0) {
      done_ = true;
      return;
    }
    ++idx_[i];
    for (int j = i + 1; j < l; ++j) idx_[j] = idx_[j - 1] + 1;
  }
  int m_;
  std::vector<int> idx_;
  bool done_ = false;
};

long long binomial(int m, int l) {
  long long result = 1;
  for (int i = 1; i <= l; ++i) {
    result = result * (m - l + i) / i;
    if (result > (1LL << 60)) return 1LL << 60;  // saturate, caller compares
  }
  return result;
}

}  // namespace

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Recovered: return "recovered";
    case Outcome::Ambiguous: return "ambiguous";
    case Outcome::NoCandidate: return "no_candidate";
    case Outcome::NotConverged: return "not_converged";
  }
  return "unknown";
}

void validate(const AltMinOptions& opts) {
  if (opts.r < 0) throw std::invalid_argument("altmin options: r must be >= 0");
  if (opts.max_iters < 1) throw std::invalid_argument("altmin options: max_iters must be >= 1");
  if (!(opts.tol > 0.0 && opts.tol < 1.0)) {
    throw std::invalid_argument("altmin options: tol must lie in (0, 1)");
  }
  if (opts.restarts < 1) throw std::invalid_argument("altmin options: restarts must be >= 1");
  if (!(opts.success_rel_err > 0.0)) {
    throw std::invalid_argument("altmin options: success_rel_err must be positive");
  }
}

DecodeResult decode_enumerate(const MeasurementEnsemble& e,
                              const MeasurementVector& y,
                              const std::vector<Matrix>& candidates,
                              double tol) {
  if (candidates.empty()) throw std::invalid_argument("decode_enumerate: no candidates");
  if (y.size() != e.k) throw std::invalid_argument("decode_enumerate: y length mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("decode_enumerate: tol must be positive");

  DecodeResult res;
  double best = std::numeric_limits<double>::infinity();
  int best_idx = -1;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double r = (apply(e, candidates[i]) - y).norm();
    ++res.iterations;
    if (r <= tol) {
      ++res.num_matches;
      if (r < best || res.num_matches == 1) {
        best = r;
        best_idx = static_cast<int>(i);
      }
    }
  }
  if (res.num_matches == 1) {
    res.outcome = Outcome::Recovered;
    res.x_hat = candidates[best_idx];
    res.has_estimate = true;
    res.candidate_index = best_idx;
    res.residual = best;
  } else if (res.num_matches >= 2) {
    res.outcome = Outcome::Ambiguous;
    res.candidate_index = best_idx;
    res.residual = best;
  } else {
    res.outcome = Outcome::NoCandidate;
    res.residual = std::numeric_limits<double>::infinity();
  }
  return res;
}

DecodeResult decode_altmin(const MeasurementEnsemble& e,
                           const MeasurementVector& y,
                           const AltMinOptions& opts) {
  validate(opts);
  if (y.size() != e.k) throw std::invalid_argument("decode_altmin: y length mismatch");

  DecodeResult res;
  const double ynorm = y.norm();
  const double accept = opts.tol * std::max(1.0, ynorm);

  if (opts.r == 0 || e.k == 0) {
    // Rank 0 fits only the zero matrix; with no measurements the zero
    // matrix is the canonical consistent point.
    res.x_hat = Matrix::Zero(e.m, e.n);
    res.has_estimate = true;
    res.residual = ynorm;
    res.outcome = res.residual <= accept ? Outcome::Recovered : Outcome::NotConverged;
    return res;
  }

  Matrix best_x;
  double best_resid = std::numeric_limits<double>::infinity();
  const double scale = std::sqrt(ynorm) / std::pow(static_cast<double>(e.k), 0.25);

  for (int restart = 0; restart < opts.restarts; ++restart) {
    Rng rng(derive_seed(opts.seed, kTagRestart, static_cast<std::uint64_t>(restart), 0));
    Matrix v(e.n, opts.r);
    if (opts.init == AltMinOptions::Init::Spectral && restart == 0) {
      v = spectral_init_v(e, y, opts.r);
    } else {
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, j) = scale * rng.normal();
      }
    }

    Matrix u(e.m, opts.r);
    double prev = std::numeric_limits<double>::infinity();
    double resid = prev;
    for (int it = 0; it < opts.max_iters; ++it) {
      const Vector uvec = solve_ls(u_design(e, v), y, &res.ridge_fallbacks);
      u = Eigen::Map<const Matrix>(uvec.data(), e.m, opts.r);
      const Vector vvec = solve_ls(v_design(e, u), y, &res.ridge_fallbacks);
      v = Eigen::Map<const Matrix>(vvec.data(), e.n, opts.r);
      resid = (apply_factored(e, u, v) - y).norm();
      ++res.iterations;
      if (resid <= accept) break;
      if (it > 0 && prev - resid <= opts.tol * std::max(1.0, prev)) break;  // stalled
      prev = resid;
    }
    if (resid < best_resid) {  // ties keep the earliest restart
      best_resid = resid;
      best_x = u * v.transpose();
    }
  }

  res.x_hat = best_x;
  res.has_estimate = true;
  res.residual = best_resid;
  res.outcome = best_resid <= accept ? Outcome::Recovered : Outcome::NotConverged;
  return res;
}

DecodeResult decode_sparse_factor(const MeasurementEnsemble& e,
                                  const MeasurementVector& y, int r, int l1,
                                  int l2, const AltMinOptions& opts,
                                  long long budget) {
  validate(opts);
  if (y.size() != e.k) throw std::invalid_argument("decode_sparse_factor: y length mismatch");
  {
    SupportSpec spec;
    spec.variant = SparseFactorSpec{e.m, e.n, r, l1, l2, 1.0};
    validate_spec(spec);  // the sparse-factor construction conditions
  }
  const long long supports = binomial(e.m, l1) * binomial(e.n, l2);
  if (supports > budget) {
    throw BudgetError("decode_sparse_factor: " + std::to_string(supports) +
                      " support pairs exceed budget " + std::to_string(budget));
  }

  DecodeResult res;
  struct Fit {
    long long support_index;
    Matrix x;
    double residual;
  };
  std::vector<Fit> fits;

  AltMinOptions sub_opts = opts;
  sub_opts.r = r;
  long long support_index = 0;
  double best_seen = std::numeric_limits<double>::infinity();
  for (Combinations rows(e.m, l1); !rows.done(); rows.advance()) {
    for (Combinations cols(e.n, l2); !cols.done(); cols.advance(), ++support_index) {
      const auto& s1 = rows.current();
      const auto& s2 = cols.current();

      // Restriction to (s1, s2) is itself a measurement problem on l1 x l2
      // matrices: a^T U V^T b depends only on the supported rows of U, V.
      MeasurementEnsemble sub;
      sub.kind = e.kind;
      sub.m = l1;
      sub.n = l2;
      sub.k = e.k;
      sub.s = e.s;
      sub.seed = e.seed;
      if (e.kind == EnsembleKind::Dense) {
        sub.mats.reserve(e.k);
        for (int i = 0; i < e.k; ++i) {
          Matrix block(l1, l2);
          for (int p = 0; p < l1; ++p) {
            for (int q = 0; q < l2; ++q) block(p, q) = e.mats[i](s1[p], s2[q]);
          }
          sub.mats.push_back(std::move(block));
        }
      } else {
        sub.lefts.reserve(e.k);
        sub.rights.reserve(e.k);
        for (int i = 0; i < e.k; ++i) {
          Vector a(l1), b(l2);
          for (int p = 0; p < l1; ++p) a(p) = e.lefts[i](s1[p]);
          for (int q = 0; q < l2; ++q) b(q) = e.rights[i](s2[q]);
          sub.lefts.push_back(std::move(a));
          sub.rights.push_back(std::move(b));
        }
      }

      sub_opts.seed = derive_seed(opts.seed, kTagSupport,
                                  static_cast<std::uint64_t>(support_index), 0);
      DecodeResult sub_res = decode_altmin(sub, y, sub_opts);
      res.iterations += sub_res.iterations;
      res.ridge_fallbacks += sub_res.ridge_fallbacks;
      best_seen = std::min(best_seen, sub_res.residual);
      if (sub_res.outcome == Outcome::Recovered) {
        Matrix full = Matrix::Zero(e.m, e.n);
        for (int p = 0; p < l1; ++p) {
          for (int q = 0; q < l2; ++q) full(s1[p], s2[q]) = sub_res.x_hat(p, q);
        }
        fits.push_back({support_index, std::move(full), sub_res.residual});
      }
    }
  }

  if (fits.empty()) {
    res.outcome = Outcome::NoCandidate;
    res.residual = best_seen;
    return res;
  }
  res.num_matches = static_cast<int>(fits.size());

  // Cluster fitting reconstructions; distinct clusters mean the support
  // family is genuinely ambiguous for this y.
  std::vector<const Matrix*> reps;
  for (const Fit& f : fits) {
    bool fresh = true;
    for (const Matrix* rep : reps) {
      if ((f.x - *rep).norm() <= kDistinctTol) {
        fresh = false;
        break;
      }
    }
    if (fresh) reps.push_back(&f.x);
  }

  const Fit* winner = &fits.front();
  for (const Fit& f : fits) {
    if (f.residual < winner->residual) winner = &f;  // ties keep lowest index
  }
  res.residual = winner->residual;
  res.candidate_index = static_cast<int>(winner->support_index);
  if (reps.size() == 1) {
    res.outcome = Outcome::Recovered;
    res.x_hat = winner->x;
    res.has_estimate = true;
  } else {
    res.outcome = Outcome::Ambiguous;
  }
  return res;
}

ProbeResult injectivity_probe(const MeasurementEnsemble& e,
                              const SupportSpec& spec, long long trials,
                              std::uint64_t seed) {
  validate_spec(spec);
  if (trials < 1) throw std::invalid_argument("injectivity_probe: trials must be >= 1");
  ProbeResult probe;
  probe.min_gap = std::numeric_limits<double>::infinity();
  for (long long t = 0; t < trials; ++t) {
    double dist = 0.0;
    Matrix diff;
    int retry = 0;
    for (; retry < 100; ++retry) {
      const auto pair = sample_support(
          spec, 2, derive_seed(seed, kTagProbe, static_cast<std::uint64_t>(t),
                               static_cast<std::uint64_t>(retry)));
      diff = pair[0] - pair[1];
      dist = diff.norm();
      if (dist >= kDegenerateTol) break;
    }
    if (retry == 100) {
      throw std::runtime_error("injectivity_probe: support sampler keeps returning coincident pairs");
    }
    const double gap = apply(e, diff).norm() / dist;
    probe.min_gap = std::min(probe.min_gap, gap);
    if (gap < kCollisionTol) ++probe.collisions;
    ++probe.pairs;
  }
  return probe;
}

ProbeResult injectivity_exhaustive(const MeasurementEnsemble& e,
                                   const std::vector<Matrix>& points) {
  if (points.size() < 2) throw std::invalid_argument("injectivity_exhaustive: need >= 2 points");
  ProbeResult probe;
  probe.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const Matrix diff = points[i] - points[j];
      const double dist = diff.norm();
      ++probe.pairs;
      if (dist < kDegenerateTol) {
        probe.min_gap = 0.0;
        ++probe.collisions;
        continue;
      }
      const double gap = apply(e, diff).norm() / dist;
      probe.min_gap = std::min(probe.min_gap, gap);
      if (gap < kCollisionTol) ++probe.collisions;
    }
  }
  return probe;
}

void attach_truth(DecodeResult& result, const Matrix& truth) {
  const double tnorm = truth.norm();
  if (tnorm == 0.0) {
    result.rel_error = result.has_estimate ? result.x_hat.norm() : 0.0;
  } else if (result.has_estimate) {
    result.rel_error = (result.x_hat - truth).norm() / tnorm;
  } else {
    result.rel_error = 1.0;  // scored as the zero estimate
  }
  result.has_rel_error = true;
}

nlohmann::json result_to_json(const DecodeResult& result) {
  nlohmann::json j{{"outcome", to_string(result.outcome)},
                   {"residual", result.residual},
                   {"iterations", result.iterations},
                   {"diagnostics",
                    {{"ridge_fallbacks", result.ridge_fallbacks},
                     {"candidate_index", result.candidate_index},
                     {"num_matches", result.num_matches}}}};
  if (result.has_rel_error) {
    j["rel_error"] = result.rel_error;
  } else {
    j["rel_error"] = nullptr;
  }
  return j;
}

}  // namespace mincomp
