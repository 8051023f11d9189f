#pragma once

#include <Eigen/Dense>

namespace mincomp {

// Dense real matrices are carried as Eigen values; shape and finiteness are
// validated at library entry points rather than wrapped in a bespoke type.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Throws std::invalid_argument if x is empty or contains NaN/Inf.
void require_finite(const Matrix& x, const char* what);

// Throws std::invalid_argument unless a and b have identical shape.
void require_same_shape(const Matrix& a, const Matrix& b);

// tr(a^T b); the induced norm is the Frobenius norm.
double trace_inner(const Matrix& a, const Matrix& b);

struct SvdResult {
  Vector singular_values;  // nonincreasing, length min(m, n)
  Matrix left_factors;     // m x min(m, n), orthonormal columns
  Matrix right_factors;    // n x min(m, n), orthonormal columns
  int numerical_rank = 0;  // count of sigma_i > rank_tol * sigma_1
};

// Full-accuracy SVD of a small dense matrix with a deterministic sign
// convention: the first nonzero entry of each left factor is nonnegative.
SvdResult svd(const Matrix& x, double rank_tol = 1e-10);

// Product of the singular values down to the numerical rank, evaluated in
// the log domain. Throws std::domain_error for the zero matrix.
double delta_product(const Matrix& x, double rank_tol = 1e-10);

// Volume of the k-ball of radius s; V(0, s) = 1 by convention.
double ball_volume(int k, double s);

// Surface area A(k-1, s) of the k-ball of radius s (k = k_minus_1 + 1).
double sphere_area(int k_minus_1, double s);

}  // namespace mincomp
