#include "hrqhd/group.hpp"

#include <cmath>

namespace hrqhd::geom {

GroupPoint group_mul(const GroupPoint &p, const GroupPoint &q) {
  return {p.x + q.x, p.y + q.y, p.tau + q.tau + 0.5 * (p.x * q.y - q.x * p.y)};
}

GroupPoint group_inv(const GroupPoint &p) { return {-p.x, -p.y, -p.tau}; }

GroupPoint dilate(const GroupPoint &p, double L) { return {L * p.x, L * p.y, L * L * p.tau}; }

double homogeneous_norm(const GroupPoint &p) {
  const double r2 = p.x * p.x + p.y * p.y;
  return std::sqrt(std::sqrt(r2 * r2 + p.tau * p.tau));
}

} // namespace hrqhd::geom
