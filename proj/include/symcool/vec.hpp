#pragma once

#include <Eigen/Dense>

namespace symcool {

using Vec3 = Eigen::Vector3d;

enum class Axis { x = 0, y = 1, z = 2 };

inline constexpr int index(Axis a) { return static_cast<int>(a); }

}  // namespace symcool
