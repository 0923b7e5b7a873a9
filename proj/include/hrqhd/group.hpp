#pragma once

namespace hrqhd::geom {

/// A point (x, y, tau) of the first Heisenberg group.
struct GroupPoint {
  double x = 0.0;
  double y = 0.0;
  double tau = 0.0;
};

GroupPoint group_mul(const GroupPoint &p, const GroupPoint &q);
GroupPoint group_inv(const GroupPoint &p);
GroupPoint dilate(const GroupPoint &p, double L);
double homogeneous_norm(const GroupPoint &p);

} // namespace hrqhd::geom
