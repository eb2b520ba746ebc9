#pragma once

#include "kms_cayley/group.hpp"

#include <vector>

namespace kms {

/// Rows stacked into a matrix with `cols` columns (zero rows allowed).
Eigen::MatrixXd stack_rows(const std::vector<Vec>& rows, Eigen::Index cols);

/// Orthonormal basis (as columns) of the null space of `rows`, computed by
/// full-pivot elimination with relative threshold `eps`.
Eigen::MatrixXd null_space(const std::vector<Vec>& rows, Eigen::Index cols, double eps);

int matrix_rank(const std::vector<Vec>& vectors, Eigen::Index cols, double eps);

/// Extreme rays (unit vectors) of the cone {v : q.v <= 0 for q in ineq,
/// e.v = 0 for e in eq}. If the cone contains a line, a unit vector of the
/// line is returned together with its negative.
std::vector<Vec> extreme_rays(const std::vector<Vec>& ineq, const std::vector<Vec>& eq,
                              Eigen::Index dim, double eps);

}  // namespace kms
