#include "hrqhd/hermite.hpp"

#include <cmath>
#include <numbers>

namespace hrqhd::spectral {

Eigen::MatrixXd hermite_functions(int N, double scale, const std::vector<double> &pts) {
  const int n = int(pts.size());
  Eigen::MatrixXd H(n, N);
  const double norm0 = std::pow(std::numbers::pi, -0.25) / std::sqrt(scale);
  for (int i = 0; i < n; ++i) {
    const double x = pts[i] / scale;
    double hm1 = 0.0;
    double h = norm0 * std::exp(-0.5 * x * x);
    H(i, 0) = h;
    for (int p = 0; p + 1 < N; ++p) {
      const double next = std::sqrt(2.0 / (p + 1)) * x * h - std::sqrt(double(p) / (p + 1)) * hm1;
      hm1 = h;
      h = next;
      H(i, p + 1) = h;
    }
  }
  return H;
}

Eigen::MatrixXd position_matrix(int N) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  for (int p = 0; p + 1 < N; ++p)
    M(p, p + 1) = M(p + 1, p) = std::sqrt((p + 1) / 2.0);
  return M;
}

Eigen::MatrixXd derivative_matrix(int N) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  for (int p = 0; p + 1 < N; ++p) {
    M(p, p + 1) = std::sqrt((p + 1) / 2.0);
    M(p + 1, p) = -std::sqrt((p + 1) / 2.0);
  }
  return M;
}

Eigen::MatrixXd position_sq_matrix(int N) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  for (int p = 0; p < N; ++p) {
    M(p, p) = p + 0.5;
    if (p + 2 < N)
      M(p, p + 2) = M(p + 2, p) = 0.5 * std::sqrt(double(p + 1) * (p + 2));
  }
  return M;
}

Eigen::MatrixXd derivative_sq_matrix(int N) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  for (int p = 0; p < N; ++p) {
    M(p, p) = -(p + 0.5);
    if (p + 2 < N)
      M(p, p + 2) = M(p + 2, p) = 0.5 * std::sqrt(double(p + 1) * (p + 2));
  }
  return M;
}

} // namespace hrqhd::spectral
