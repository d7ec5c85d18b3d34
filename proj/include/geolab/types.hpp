#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace geolab {

using Real = double;
using Index = Eigen::Index;

using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec2 = Eigen::Matrix<Real, 2, 1>;
using Vec3 = Eigen::Matrix<Real, 3, 1>;
using Mat2 = Eigen::Matrix<Real, 2, 2>;
using Mat3 = Eigen::Matrix<Real, 3, 3>;

// Read-only vector/matrix parameters; binds Eigen expressions without copies
// where the layout allows.
using VecRef = const Eigen::Ref<const Vec>&;
using MatRef = const Eigen::Ref<const Mat>&;

// Thrown when an enumeration or search exceeds its configured resource
// budget; the message names the budget that was exhausted.
class budget_error : public std::runtime_error {
public:
  budget_error(std::string budget_name, std::size_t limit)
      : std::runtime_error("budget exceeded: " + budget_name + " (limit " +
                           std::to_string(limit) + ")"),
        budget(std::move(budget_name)), limit(limit) {}

  std::string budget;
  std::size_t limit;
};

}  // namespace geolab
