#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include <Eigen/Core>

namespace irgnh {

using Index = Eigen::Index;

/// Shape of a discrete function space: node count, nodes per axis of the
/// underlying square grid (0 for unstructured spaces such as masked data),
/// and the uniform quadrature weight attached to every node.
struct Space {
  Index size = 0;
  int nodes_per_axis = 0;
  double weight = 1.0;

  /// Interior nodes of the unit square with mesh width h = 1/(n+1).
  static Space unit_square(int n);
  /// `size` nodes of weight `weight`, no grid geometry.
  static Space flat(Index size, double weight = 1.0);

  bool operator==(const Space&) const = default;
};

/// Real values on a uniform grid together with their quadrature weight.
/// Stands in for elements of L^p(Omega); every norm and pairing in the
/// library is the weighted sum over nodes.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const Space& space, double fill = 0.0);
  GridFunction(const Space& space, Eigen::VectorXd values);

  static GridFunction zeros_like(const GridFunction& other) {
    return GridFunction(other.space());
  }

  const Space& space() const { return space_; }
  Index size() const { return space_.size; }
  int nodes_per_axis() const { return space_.nodes_per_axis; }
  double weight() const { return space_.weight; }

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double operator[](Index i) const { return values_[i]; }
  double& operator[](Index i) { return values_[i]; }

  bool compatible(const GridFunction& other) const {
    return space_ == other.space_;
  }
  bool all_finite() const { return values_.allFinite(); }

  GridFunction& operator+=(const GridFunction& rhs);
  GridFunction& operator-=(const GridFunction& rhs);
  GridFunction& operator*=(double s);

  friend GridFunction operator+(GridFunction lhs, const GridFunction& rhs) {
    return lhs += rhs;
  }
  friend GridFunction operator-(GridFunction lhs, const GridFunction& rhs) {
    return lhs -= rhs;
  }
  friend GridFunction operator*(double s, GridFunction v) { return v *= s; }
  friend GridFunction operator*(GridFunction v, double s) { return v *= s; }
  friend GridFunction operator-(GridFunction v) { return v *= -1.0; }

  /// Pointwise product (both operands on the same space).
  GridFunction cwise_product(const GridFunction& rhs) const;

 private:
  Space space_;
  Eigen::VectorXd values_;
};

/// Thrown when two grid functions or operators live on different spaces.
class SpaceMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void require_same_space(const Space& a, const Space& b, const char* what);

/// Weighted pairing <a, b> = sum_i weight * a_i * b_i.
double inner(const GridFunction& a, const GridFunction& b);

/// Coordinates (x1, x2) of node `index` on a unit-square space (row-major,
/// x1 varies fastest).
std::pair<double, double> node_coordinates(const Space& space, Index index);

// Serialization. CSV is "index,value" with a header line; the binary dump
// is int64 n, float64 weight, then float64 values, all little-endian.
void write_csv(const GridFunction& v, std::ostream& out);
void write_csv(const GridFunction& v, const std::filesystem::path& path);
GridFunction read_csv(std::istream& in, const Space& space);

void write_binary(const GridFunction& v, std::ostream& out);
GridFunction read_binary(std::istream& in);

}  // namespace irgnh
