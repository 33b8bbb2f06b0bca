#include "twoweight/cube.hpp"

#include <cmath>
#include <string>

#include "twoweight/error.hpp"

namespace twoweight {

Cube::Cube(std::vector<double> corner, double side) : corner_(std::move(corner)), side_(side) {
  require(!corner_.empty(), "cube dimension must be at least 1");
  require(side > 0.0 && std::isfinite(side), "cube side must be positive and finite");
}

double Cube::volume() const { return std::pow(side_, dimension()); }

std::vector<double> Cube::center() const {
  std::vector<double> c(corner_);
  for (double& x : c) x += 0.5 * side_;
  return c;
}

bool Cube::contains(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != dimension()) return false;
  for (std::size_t d = 0; d < corner_.size(); ++d) {
    if (point[d] < corner_[d] || point[d] >= corner_[d] + side_) return false;
  }
  return true;
}

bool Cube::contains(const Cube& other) const {
  if (other.dimension() != dimension()) return false;
  for (std::size_t d = 0; d < corner_.size(); ++d) {
    if (other.corner_[d] < corner_[d]) return false;
    if (other.corner_[d] + other.side_ > corner_[d] + side_) return false;
  }
  return true;
}

bool Cube::intersects(const Cube& other) const {
  if (other.dimension() != dimension()) return false;
  for (std::size_t d = 0; d < corner_.size(); ++d) {
    if (other.corner_[d] >= corner_[d] + side_) return false;
    if (corner_[d] >= other.corner_[d] + other.side_) return false;
  }
  return true;
}

Cube dilate(const Cube& q, double t) {
  require(t > 0.0 && std::isfinite(t), "dilation factor must be positive, got " + std::to_string(t));
  const double new_side = t * q.side();
  std::vector<double> corner(q.corner());
  const double shift = 0.5 * (new_side - q.side());
  for (double& x : corner) x -= shift;
  return Cube(std::move(corner), new_side);
}

Cube unit_cube(int n) {
  require(n >= 1, "dimension must be at least 1");
  return Cube(std::vector<double>(static_cast<std::size_t>(n), 0.0), 1.0);
}

Cube cube_at(std::span<const double> center, double side) {
  std::vector<double> corner(center.begin(), center.end());
  for (double& x : corner) x -= 0.5 * side;
  return Cube(std::move(corner), side);
}

}  // namespace twoweight
