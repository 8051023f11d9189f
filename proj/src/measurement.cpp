#include "mincomp/measurement.hpp"

#include <cmath>
#include <stdexcept>

namespace mincomp {

const char* to_string(EnsembleKind kind) {
  return kind == EnsembleKind::Dense ? "dense" : "rankone";
}

EnsembleKind ensemble_kind_from_string(const std::string& name) {
  if (name == "dense") return EnsembleKind::Dense;
  if (name == "rankone") return EnsembleKind::RankOne;
  throw std::invalid_argument("unknown ensemble kind: " + name);
}

Vector sample_uniform_ball(int dim, double s, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("sample_uniform_ball: dim must be >= 1");
  if (!(s > 0.0)) throw std::invalid_argument("sample_uniform_ball: radius must be positive");
  Vector v(dim);
  double norm2;
  do {
    for (int i = 0; i < dim; ++i) v(i) = rng.normal();
    norm2 = v.squaredNorm();
  } while (norm2 == 0.0);  // probability-zero degenerate direction
  const double radius = s * std::pow(rng.uniform_open01(), 1.0 / dim);
  return v * (radius / std::sqrt(norm2));
}

MeasurementEnsemble sample_ensemble(EnsembleKind kind, int m, int n, int k,
                                    double s, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("sample_ensemble: m, n must be >= 1");
  if (k < 0) throw std::invalid_argument("sample_ensemble: k must be >= 0");
  if (!(s > 0.0)) throw std::invalid_argument("sample_ensemble: s must be positive");
  MeasurementEnsemble e;
  e.kind = kind;
  e.m = m;
  e.n = n;
  e.k = k;
  e.s = s;
  e.seed = seed;
  Rng rng(seed);
  if (kind == EnsembleKind::Dense) {
    e.mats.reserve(k);
    for (int i = 0; i < k; ++i) {
      // Uniform on the Frobenius ball of radius s, drawn as an mn-ball
      // point and reshaped column-major.
      const Vector v = sample_uniform_ball(m * n, s, rng);
      e.mats.push_back(Eigen::Map<const Matrix>(v.data(), m, n));
    }
  } else {
    e.lefts.reserve(k);
    e.rights.reserve(k);
    for (int i = 0; i < k; ++i) {
      e.lefts.push_back(sample_uniform_ball(m, s, rng));
      e.rights.push_back(sample_uniform_ball(n, s, rng));
    }
  }
  return e;
}

MeasurementVector apply(const MeasurementEnsemble& e, const Matrix& x) {
  if (x.rows() != e.m || x.cols() != e.n) {
    throw std::invalid_argument("apply: matrix shape does not match ensemble");
  }
  MeasurementVector y(e.k);
  if (e.kind == EnsembleKind::Dense) {
    for (int i = 0; i < e.k; ++i) y(i) = trace_inner(e.mats[i], x);
  } else {
    for (int i = 0; i < e.k; ++i) y(i) = e.lefts[i].dot(x * e.rights[i]);
  }
  return y;
}

MeasurementVector apply_factored(const MeasurementEnsemble& e, const Matrix& u,
                                 const Matrix& v) {
  if (u.rows() != e.m || v.rows() != e.n || u.cols() != v.cols()) {
    throw std::invalid_argument("apply_factored: factor shapes do not match ensemble");
  }
  MeasurementVector y(e.k);
  if (e.kind == EnsembleKind::Dense) {
    for (int i = 0; i < e.k; ++i) {
      y(i) = trace_inner(e.mats[i], Matrix(u * v.transpose()));
    }
  } else {
    for (int i = 0; i < e.k; ++i) {
      y(i) = (u.transpose() * e.lefts[i]).dot(v.transpose() * e.rights[i]);
    }
  }
  return y;
}

long long storage_cost(const MeasurementEnsemble& e) {
  if (e.kind == EnsembleKind::Dense) {
    return static_cast<long long>(e.k) * e.m * e.n;
  }
  return static_cast<long long>(e.k) * (e.m + e.n);
}

nlohmann::json ensemble_to_json(const MeasurementEnsemble& e) {
  return nlohmann::json{{"kind", to_string(e.kind)}, {"m", e.m},
                        {"n", e.n},                  {"k", e.k},
                        {"s", e.s},                  {"seed", e.seed},
                        {"rng_algorithm", kRngAlgorithm}};
}

MeasurementEnsemble ensemble_from_json(const nlohmann::json& j) {
  const std::string algo = j.at("rng_algorithm").get<std::string>();
  if (algo != kRngAlgorithm) {
    throw std::invalid_argument("ensemble_from_json: unsupported rng_algorithm " + algo);
  }
  return sample_ensemble(ensemble_kind_from_string(j.at("kind").get<std::string>()),
                         j.at("m").get<int>(), j.at("n").get<int>(),
                         j.at("k").get<int>(), j.at("s").get<double>(),
                         j.at("seed").get<std::uint64_t>());
}

}  // namespace mincomp
