#pragma once

#include "nematic/fespace.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace nematic {

/// Rule on the reference triangle in barycentric coordinates. Weights sum to
/// the reference area 1/2.
struct QuadratureRule
{
  int degree = 0;
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// 12-point Dunavant rule, exact to degree 6.
const QuadratureRule& dunavant6();
/// 6-point Dunavant rule, exact to degree 4.
const QuadratureRule& dunavant4();
/// 16-point Dunavant rule, exact to degree 8.
const QuadratureRule& dunavant8();

/// Basis values, physical gradients and scaled weights on one triangle.
class CellValues
{
public:
  explicit CellValues(const QuadratureRule& rule) : rule_(&rule) {}

  void reinit(const Space& space, Index t);

  std::size_t num_points() const { return rule_->size(); }
  int num_basis() const { return nbasis_; }
  /// Quadrature weight times |det J|.
  double jxw(std::size_t q) const { return jxw_[q]; }
  double phi(std::size_t q, int i) const { return phi_[q][static_cast<std::size_t>(i)]; }
  const Eigen::Vector2d& grad(std::size_t q, int i) const { return grad_[q][static_cast<std::size_t>(i)]; }
  const Point& point(std::size_t q) const { return x_[q]; }
  double area() const { return area_; }

private:
  const QuadratureRule* rule_;
  int nbasis_ = 0;
  double area_ = 0.0;
  std::vector<double> jxw_;
  std::vector<std::array<double, 6>> phi_;
  std::vector<std::array<Eigen::Vector2d, 6>> grad_;
  std::vector<Point> x_;
};

} // namespace nematic
