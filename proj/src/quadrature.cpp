#include "nematic/quadrature.hpp"

#include <stdexcept>
#include <string>

namespace nematic {

namespace {

void add_orbit3(QuadratureRule& r, double w, double a, double b)
{
  r.points.emplace_back(a, b, b);
  r.points.emplace_back(b, a, b);
  r.points.emplace_back(b, b, a);
  for (int k = 0; k < 3; ++k) r.weights.push_back(0.5 * w);
}

void add_orbit6(QuadratureRule& r, double w, double a, double b, double c)
{
  r.points.emplace_back(a, b, c);
  r.points.emplace_back(a, c, b);
  r.points.emplace_back(b, a, c);
  r.points.emplace_back(b, c, a);
  r.points.emplace_back(c, a, b);
  r.points.emplace_back(c, b, a);
  for (int k = 0; k < 6; ++k) r.weights.push_back(0.5 * w);
}

QuadratureRule make_dunavant6()
{
  QuadratureRule r;
  r.degree = 6;
  add_orbit3(r, 0.116786275726379, 0.501426509658179, 0.249286745170910);
  add_orbit3(r, 0.050844906370207, 0.873821971016996, 0.063089014491502);
  add_orbit6(r, 0.082851075618374, 0.053145049844817, 0.310352451033784, 0.636502499121399);
  return r;
}

QuadratureRule make_dunavant8()
{
  QuadratureRule r;
  r.degree = 8;
  r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
  r.weights.push_back(0.5 * 0.144315607677787);
  add_orbit3(r, 0.095091634267285, 0.081414823414554, 0.459292588292723);
  add_orbit3(r, 0.103217370534718, 0.658861384496480, 0.170569307751760);
  add_orbit3(r, 0.032458497623198, 0.898905543365938, 0.050547228317031);
  add_orbit6(r, 0.027230314174435, 0.008394777409958, 0.263112829634638, 0.728492392955404);
  return r;
}

QuadratureRule make_dunavant4()
{
  QuadratureRule r;
  r.degree = 4;
  add_orbit3(r, 0.223381589678011, 0.108103018168070, 0.445948490915965);
  add_orbit3(r, 0.109951743655322, 0.816847572980459, 0.091576213509771);
  return r;
}

} // namespace

const QuadratureRule& dunavant6()
{
  static const QuadratureRule rule = make_dunavant6();
  return rule;
}

const QuadratureRule& dunavant8()
{
  static const QuadratureRule rule = make_dunavant8();
  return rule;
}

const QuadratureRule& dunavant4()
{
  static const QuadratureRule rule = make_dunavant4();
  return rule;
}

void CellValues::reinit(const Space& space, Index t)
{
  const Mesh2d& mesh = space.mesh();
  const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
  const Point v[3] = {mesh.vertices[static_cast<std::size_t>(tri[0])], mesh.vertices[static_cast<std::size_t>(tri[1])],
                      mesh.vertices[static_cast<std::size_t>(tri[2])]};
  area_ = mesh.signed_area(t);
  if (!(area_ > 0.0)) throw std::logic_error("CellValues: triangle " + std::to_string(t) + " has non-positive area");

  // grad(lambda_i) = rot(v_{i+2} - v_{i+1}) / (2 area).
  Eigen::Vector2d gl[3];
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d d = v[(i + 2) % 3] - v[(i + 1) % 3];
    gl[i] = Eigen::Vector2d(-d.y(), d.x()) / (2.0 * area_);
  }

  const std::size_t nq = rule_->size();
  nbasis_ = space.nodes_per_cell();
  jxw_.resize(nq);
  phi_.resize(nq);
  grad_.resize(nq);
  x_.resize(nq);
  const bool p2 = space.family() == Family::P2;
  for (std::size_t q = 0; q < nq; ++q) {
    const Eigen::Vector3d& l = rule_->points[q];
    jxw_[q] = rule_->weights[q] * 2.0 * area_;
    x_[q] = l[0] * v[0] + l[1] * v[1] + l[2] * v[2];
    auto& ph = phi_[q];
    auto& gr = grad_[q];
    if (!p2) {
      for (int i = 0; i < 3; ++i) {
        ph[static_cast<std::size_t>(i)] = l[i];
        gr[static_cast<std::size_t>(i)] = gl[i];
      }
      continue;
    }
    for (int i = 0; i < 3; ++i) {
      ph[static_cast<std::size_t>(i)] = l[i] * (2.0 * l[i] - 1.0);
      gr[static_cast<std::size_t>(i)] = (4.0 * l[i] - 1.0) * gl[i];
      const int j = (i + 1) % 3;
      ph[static_cast<std::size_t>(3 + i)] = 4.0 * l[i] * l[j];
      gr[static_cast<std::size_t>(3 + i)] = 4.0 * (l[j] * gl[i] + l[i] * gl[j]);
    }
  }
}

} // namespace nematic
