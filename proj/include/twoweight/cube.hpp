#pragma once

#include <span>
#include <vector>

namespace twoweight {

/// Axis-parallel cube [corner, corner + side)^n.
class Cube {
 public:
  Cube() = default;
  Cube(std::vector<double> corner, double side);

  int dimension() const { return static_cast<int>(corner_.size()); }
  const std::vector<double>& corner() const { return corner_; }
  double side() const { return side_; }
  double volume() const;
  std::vector<double> center() const;

  /// Half-open membership test.
  bool contains(std::span<const double> point) const;
  bool contains(const Cube& other) const;
  bool intersects(const Cube& other) const;

  bool operator==(const Cube&) const = default;

 private:
  std::vector<double> corner_;
  double side_ = 1.0;
};

/// Concentric cube with side t * side(q). Throws InvalidInput for t <= 0.
Cube dilate(const Cube& q, double t);

/// Unit cube [0,1)^n.
Cube unit_cube(int n);

/// Cube with the given center and side.
Cube cube_at(std::span<const double> center, double side);

}  // namespace twoweight
