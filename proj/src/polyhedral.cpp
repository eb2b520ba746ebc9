#include "kms_cayley/polyhedral.hpp"

#include <algorithm>
#include <cmath>

namespace kms {

Eigen::MatrixXd stack_rows(const std::vector<Vec>& rows, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return m;
}

Eigen::MatrixXd null_space(const std::vector<Vec>& rows, Eigen::Index cols, double eps) {
  if (cols == 0) return Eigen::MatrixXd(0, 0);
  if (rows.empty()) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(stack_rows(rows, cols));
  lu.setThreshold(eps);
  if (lu.rank() == cols) return Eigen::MatrixXd(cols, 0);
  // LU kernel vectors are not orthonormal; orthonormalize with QR.
  Eigen::MatrixXd k = lu.kernel();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(k);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(cols, k.cols());
  return q;
}

int matrix_rank(const std::vector<Vec>& vectors, Eigen::Index cols, double eps) {
  if (vectors.empty() || cols == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(stack_rows(vectors, cols));
  lu.setThreshold(eps);
  return static_cast<int>(lu.rank());
}

namespace {

bool feasible(const std::vector<Vec>& ineq, const Vec& d, double eps) {
  for (const auto& q : ineq) {
    if (q.dot(d) > eps * std::max(1.0, q.norm())) return false;
  }
  return true;
}

void push_unique(std::vector<Vec>& rays, const Vec& d, double eps) {
  for (const auto& r : rays) {
    if ((r - d).norm() <= std::sqrt(eps)) return;
  }
  rays.push_back(d);
}

}  // namespace

std::vector<Vec> extreme_rays(const std::vector<Vec>& ineq, const std::vector<Vec>& eq,
                              Eigen::Index dim, double eps) {
  std::vector<Vec> rays;
  if (dim == 0) return rays;

  std::vector<Vec> all = ineq;
  all.insert(all.end(), eq.begin(), eq.end());
  Eigen::MatrixXd lineality = null_space(all, dim, eps);
  if (lineality.cols() > 0) {
    Vec d = lineality.col(0);
    rays.push_back(d);
    rays.push_back(-d);
    return rays;
  }

  // Work inside the subspace cut out by the equalities.
  Eigen::MatrixXd basis = null_space(eq, dim, eps);
  const Eigen::Index k = basis.cols();
  if (k == 0) return rays;
  std::vector<Vec> projected;
  projected.reserve(ineq.size());
  for (const auto& q : ineq) projected.push_back(basis.transpose() * q);

  const std::size_t m = projected.size();
  const auto pick = static_cast<std::size_t>(k - 1);
  if (pick > m) return rays;
  std::vector<bool> mask(m, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(pick), true);
  do {
    std::vector<Vec> active;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask[i]) active.push_back(projected[i]);
    }
    Eigen::MatrixXd ker = null_space(active, k, eps);
    if (ker.cols() != 1) continue;
    for (double sign : {1.0, -1.0}) {
      Vec d = sign * ker.col(0);
      if (feasible(projected, d, eps)) {
        Vec full = basis * d;
        push_unique(rays, full.normalized(), eps);
      }
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return rays;
}

}  // namespace kms
