#pragma once

#include <Eigen/Dense>

#include <vector>

namespace hrqhd::spectral {

/// Rows: points, columns: h_p(x/s)/sqrt(s) for p < N (L2-normalised Hermite functions).
Eigen::MatrixXd hermite_functions(int N, double scale, const std::vector<double> &pts);

// Galerkin matrices of the first N unit-scale Hermite functions, from the
// ladder algebra x = (a + a^+)/sqrt2, d/dx = (a - a^+)/sqrt2. The squared
// operators are exact (not products of truncated matrices).
Eigen::MatrixXd position_matrix(int N);
Eigen::MatrixXd derivative_matrix(int N);
Eigen::MatrixXd position_sq_matrix(int N);
Eigen::MatrixXd derivative_sq_matrix(int N);

} // namespace hrqhd::spectral
