#include "mincomp/support.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "mincomp/io.hpp"

namespace mincomp {

namespace {

void fill_gaussian(Matrix& x, Rng& rng) {
  // Column-major fill, matching storage order; part of the seed contract.
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = rng.normal();
  }
}

}  // namespace

Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("gaussian_matrix: empty shape");
  Matrix x(rows, cols);
  fill_gaussian(x, rng);
  return x;
}

void validate_spec(const SupportSpec& spec) {
  if (!(spec.epsilon >= 0.0 && spec.epsilon < 1.0)) {
    throw std::invalid_argument("support spec: epsilon must lie in [0, 1)");
  }
  if (const auto* lr = std::get_if<LowRankSpec>(&spec.variant)) {
    if (lr->m < 1 || lr->n < 1) throw std::invalid_argument("low-rank spec: m, n must be >= 1");
    if (lr->r < 1 || lr->r > std::min(lr->m, lr->n)) {
      throw std::invalid_argument("low-rank spec: need 1 <= r <= min(m, n)");
    }
    if (!(lr->L > 0.0)) throw std::invalid_argument("low-rank spec: bound L must be positive");
  } else if (const auto* sf = std::get_if<SparseFactorSpec>(&spec.variant)) {
    if (sf->m < 1 || sf->n < 1) throw std::invalid_argument("sparse-factor spec: m, n must be >= 1");
    if (sf->r < 1) throw std::invalid_argument("sparse-factor spec: r must be >= 1");
    if (!(sf->l1 >= sf->r && 2 * sf->l1 < sf->m)) {
      throw std::invalid_argument("sparse-factor spec: need r <= l1 < m/2");
    }
    if (!(sf->l2 >= sf->r && sf->l2 <= 0.5 * sf->n - 1.0 / sf->r)) {
      throw std::invalid_argument("sparse-factor spec: need r <= l2 <= n/2 - 1/r");
    }
    if (!(sf->L > 0.0)) throw std::invalid_argument("sparse-factor spec: bound L must be positive");
  } else {
    const auto& cloud = std::get<PointCloudSpec>(spec.variant);
    if (cloud.points.empty()) throw std::invalid_argument("point-cloud spec: empty cloud");
    for (const Matrix& p : cloud.points) {
      require_finite(p, "point-cloud spec");
      require_same_shape(cloud.points.front(), p);
    }
  }
}

int manifold_dim(int m, int n, int r) {
  if (m < 0 || n < 0 || r < 0) throw std::invalid_argument("manifold_dim: negative argument");
  if (r > std::min(m, n)) throw std::invalid_argument("manifold_dim: r exceeds min(m, n)");
  return (m + n - r) * r;
}

Matrix sample_factor(int r, int m, int l, double L, Rng& rng) {
  if (r < 1 || m < 1) throw std::invalid_argument("sample_factor: r, m must be >= 1");
  if (l < r || l > m) throw std::invalid_argument("sample_factor: need r <= l <= m");
  if (!(L > 0.0)) throw std::invalid_argument("sample_factor: bound L must be positive");
  std::vector<int> cols(m);
  while (true) {
    // Partial Fisher-Yates for the l column positions, then sorted so the
    // Gaussian fill order is independent of the shuffle path.
    std::iota(cols.begin(), cols.end(), 0);
    for (int i = 0; i < l; ++i) {
      const int j = i + static_cast<int>(rng.uniform01() * (m - i));
      std::swap(cols[i], cols[std::min(j, m - 1)]);
    }
    std::sort(cols.begin(), cols.begin() + l);
    Matrix x = Matrix::Zero(r, m);
    for (int c = 0; c < l; ++c) {
      for (int i = 0; i < r; ++i) x(i, cols[c]) = rng.normal();
    }
    if (x.norm() < L) return x;
  }
}

std::vector<Matrix> sample_support(const SupportSpec& spec, int count,
                                   std::uint64_t seed) {
  validate_spec(spec);
  if (count < 1) throw std::invalid_argument("sample_support: count must be >= 1");
  std::vector<Matrix> out;
  out.reserve(count);
  Rng rng(seed);
  if (const auto* lr = std::get_if<LowRankSpec>(&spec.variant)) {
    Matrix u(lr->r, lr->m), v(lr->r, lr->n);
    while (static_cast<int>(out.size()) < count) {
      // Rejection against the Frobenius ball keeps full support on
      // {rank <= r, |X| <= L} instead of piling mass on the sphere.
      fill_gaussian(u, rng);
      fill_gaussian(v, rng);
      Matrix x = u.transpose() * v;
      if (x.norm() <= lr->L) out.push_back(std::move(x));
    }
  } else if (const auto* sf = std::get_if<SparseFactorSpec>(&spec.variant)) {
    for (int i = 0; i < count; ++i) {
      const Matrix x1 = sample_factor(sf->r, sf->m, sf->l1, sf->L, rng);
      const Matrix x2 = sample_factor(sf->r, sf->n, sf->l2, sf->L, rng);
      out.push_back(x1.transpose() * x2);
    }
  } else {
    const auto& cloud = std::get<PointCloudSpec>(spec.variant);
    const auto size = cloud.points.size();
    for (int i = 0; i < count; ++i) {
      auto idx = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(size));
      out.push_back(cloud.points[std::min(idx, size - 1)]);
    }
  }
  return out;
}

long long covering_count(const std::vector<Matrix>& points, double rho) {
  if (points.empty()) throw std::invalid_argument("covering_count: empty cloud");
  if (!(rho > 0.0)) throw std::invalid_argument("covering_count: rho must be positive");
  const Matrix& first = points.front();
  const auto dim = static_cast<std::size_t>(first.size());
  const double side = 2.0 * rho / std::sqrt(static_cast<double>(dim));

  std::unordered_set<std::string> cells;
  cells.reserve(points.size());
  std::string key(dim * sizeof(long long), '\0');
  for (const Matrix& p : points) {
    require_same_shape(first, p);
    const double* data = p.data();
    for (std::size_t i = 0; i < dim; ++i) {
      const auto cell = static_cast<long long>(std::floor(data[i] / side));
      std::memcpy(key.data() + i * sizeof(long long), &cell, sizeof(long long));
    }
    cells.insert(key);
  }
  return static_cast<long long>(cells.size());
}

DimensionEstimate estimate_dim(const std::vector<Matrix>& points,
                               double rho_min, double rho_max, int levels) {
  if (levels < 4) throw std::invalid_argument("estimate_dim: levels must be >= 4");
  if (!(rho_min > 0.0 && rho_min < rho_max)) {
    throw std::invalid_argument("estimate_dim: need 0 < rho_min < rho_max");
  }
  DimensionEstimate est;
  const double ratio = std::pow(rho_min / rho_max, 1.0 / (levels - 1));
  for (int j = 0; j < levels; ++j) {
    const double rho = rho_max * std::pow(ratio, j);
    est.rho_schedule.push_back(rho);
    est.counts.push_back(covering_count(points, rho));
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int j = 0; j < levels; ++j) {
    const double x = -std::log(est.rho_schedule[j]);
    const double y = std::log(static_cast<double>(est.counts[j]));
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double vxx = sxx - sx * sx / levels;
  const double vxy = sxy - sx * sy / levels;
  const double vyy = syy - sy * sy / levels;
  if (vyy <= 0.0) {
    // All counts equal: a constant fits exactly, dimension reads as 0.
    est.slope = 0.0;
    est.r2 = 1.0;
    return est;
  }
  const double slope = vxy / vxx;
  est.slope = std::max(0.0, slope);
  est.r2 = std::clamp(vxy * vxy / (vxx * vyy), 0.0, 1.0);
  return est;
}

std::string cloud_to_csv(const std::vector<Matrix>& points) {
  if (points.empty()) throw std::invalid_argument("cloud_to_csv: empty cloud");
  const Matrix& first = points.front();
  std::string out = "# " + std::to_string(first.rows()) + "," +
                    std::to_string(first.cols()) + "\n";
  for (const Matrix& p : points) {
    require_same_shape(first, p);
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (i) out += ',';
      out += format_double(p.data()[i]);  // column-major vec order
    }
    out += '\n';
  }
  return out;
}

std::vector<Matrix> cloud_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw std::invalid_argument("cloud_from_csv: missing `# m,n` header");
  }
  int m = 0, n = 0;
  {
    std::istringstream hdr(line.substr(2));
    char comma = 0;
    if (!(hdr >> m >> comma >> n) || comma != ',' || m < 1 || n < 1) {
      throw std::invalid_argument("cloud_from_csv: malformed header: " + line);
    }
  }
  std::vector<Matrix> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(m) * n);
    std::istringstream row(line);
    std::string tok;
    while (std::getline(row, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.size() != static_cast<std::size_t>(m) * n) {
      throw std::invalid_argument("cloud_from_csv: row has wrong arity: " + line);
    }
    points.push_back(Eigen::Map<const Matrix>(vals.data(), m, n));
  }
  if (points.empty()) throw std::invalid_argument("cloud_from_csv: no data rows");
  return points;
}

}  // namespace mincomp
