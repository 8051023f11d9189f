#include "mincomp/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mincomp {

void require_finite(const Matrix& x, const char* what) {
  if (x.rows() < 1 || x.cols() < 1) {
    throw std::invalid_argument(std::string(what) + ": empty matrix");
  }
  if (!x.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(
        "shape mismatch: " + std::to_string(a.rows()) + "x" +
        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
        std::to_string(b.cols()));
  }
}

double trace_inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  return a.cwiseProduct(b).sum();
}

SvdResult svd(const Matrix& x, double rank_tol) {
  require_finite(x, "svd");
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) {
    throw std::invalid_argument("svd: rank_tol must lie in (0, 1)");
  }
  Eigen::JacobiSVD<Matrix> dec(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.singular_values = dec.singularValues();
  out.left_factors = dec.matrixU();
  out.right_factors = dec.matrixV();

  // Sign convention: flip factor pairs so the first nonzero entry of each
  // left factor is nonnegative.
  for (Eigen::Index j = 0; j < out.left_factors.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.left_factors.rows(); ++i) {
      const double v = out.left_factors(i, j);
      if (v != 0.0) {
        if (v < 0.0) {
          out.left_factors.col(j) = -out.left_factors.col(j);
          out.right_factors.col(j) = -out.right_factors.col(j);
        }
        break;
      }
    }
  }

  const double top = out.singular_values.size() ? out.singular_values(0) : 0.0;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
    if (out.singular_values(i) > rank_tol * top) ++out.numerical_rank;
  }
  return out;
}

double delta_product(const Matrix& x, double rank_tol) {
  const SvdResult dec = svd(x, rank_tol);
  if (dec.numerical_rank == 0) {
    throw std::domain_error("delta_product: zero matrix has no nonzero singular values");
  }
  double log_prod = 0.0;
  for (int i = 0; i < dec.numerical_rank; ++i) {
    log_prod += std::log(dec.singular_values(i));
  }
  return std::exp(log_prod);
}

double ball_volume(int k, double s) {
  if (k < 0) throw std::invalid_argument("ball_volume: negative dimension");
  if (!(s > 0.0)) throw std::invalid_argument("ball_volume: radius must be positive");
  const double kh = 0.5 * k;
  return std::exp(kh * std::log(M_PI) + k * std::log(s) - std::lgamma(kh + 1.0));
}

double sphere_area(int k_minus_1, double s) {
  if (k_minus_1 < 0) throw std::invalid_argument("sphere_area: negative dimension");
  if (!(s > 0.0)) throw std::invalid_argument("sphere_area: radius must be positive");
  const int k = k_minus_1 + 1;
  const double kh = 0.5 * k;
  return 2.0 * std::exp(kh * std::log(M_PI) + (k - 1) * std::log(s) - std::lgamma(kh));
}

}  // namespace mincomp
