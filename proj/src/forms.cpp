#include "nematic/forms.hpp"
#include "nematic/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nematic {

Eigen::Vector3d curl3(const Gradient3& g)
{
  return {g(2, 1), -g(2, 0), g(1, 0) - g(0, 1)};
}

Eigen::Matrix3d z_tensor(const Eigen::Vector3d& n, double kappa)
{
  return Eigen::Matrix3d::Identity() + (kappa - 1.0) * n * n.transpose();
}

std::vector<std::string> validate_params(const ProblemParams& p)
{
  if (!(p.k1 > 0.0) || !(p.k2 > 0.0) || !(p.k3 > 0.0))
    throw std::invalid_argument("Frank constants must be positive (K1=" + std::to_string(p.k1) +
                                ", K2=" + std::to_string(p.k2) + ", K3=" + std::to_string(p.k3) + ")");
  if (!(p.gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  if (!(p.q0 >= 0.0)) throw std::invalid_argument("q0 must be non-negative");

  std::vector<std::string> warnings;
  const double chiral = p.k2 * p.q0;
  if (p.q0 > 0.0 && chiral >= 0.5 * std::min(p.k1, p.k3))
    warnings.push_back("K2*q0 = " + std::to_string(chiral) +
                       " is comparable to min(K1, K3); coercivity is not guaranteed");
  return warnings;
}

namespace {

void check_spaces(const Space& director, const Space& multiplier)
{
  if (director.components() != 3) throw std::invalid_argument("director space must have 3 components");
  if (multiplier.components() != 1 || multiplier.family() != Family::P1)
    throw std::invalid_argument("multiplier space must be scalar P1");
  if (&director.mesh() != &multiplier.mesh())
    throw std::invalid_argument("director and multiplier spaces live on different meshes");
}

void check_state(const Space& director, const Space& multiplier, const State& s)
{
  check_spaces(director, multiplier);
  if (s.director.size() != director.num_dofs() || s.multiplier.size() != multiplier.num_dofs())
    throw std::invalid_argument("state vectors do not match the spaces");
}

/// Director value and gradient at one quadrature point.
struct PointField
{
  Eigen::Vector3d n = Eigen::Vector3d::Zero();
  Gradient3 grad = Gradient3::Zero();
};

PointField eval_field(const CellValues& cv, std::size_t q, const std::array<Index, 6>& nodes, const Space& s,
                      const Vector& u)
{
  PointField f;
  for (int a = 0; a < cv.num_basis(); ++a) {
    const Index node = nodes[static_cast<std::size_t>(a)];
    const double phi = cv.phi(q, a);
    const Eigen::Vector2d& g = cv.grad(q, a);
    for (int c = 0; c < 3; ++c) {
      const double coef = u[s.dof(node, c)];
      f.n[c] += coef * phi;
      f.grad.row(c) += coef * g.transpose();
    }
  }
  return f;
}

double eval_scalar(const CellValues& cv, std::size_t q, const std::array<Index, 6>& nodes, const Vector& p)
{
  double v = 0.0;
  for (int a = 0; a < cv.num_basis(); ++a) v += p[nodes[static_cast<std::size_t>(a)]] * cv.phi(q, a);
  return v;
}

using LocalBasis = Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 18>;
using LocalVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 18, 1>;
using LocalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 18, 18>;

/// Values, curls and divergences of the vector basis phi_a e_c, local dof 3a+c.
void vector_basis(const CellValues& cv, std::size_t q, LocalBasis& val, LocalBasis& curl, LocalVector& div)
{
  const int nd = 3 * cv.num_basis();
  val.setZero(3, nd);
  curl.setZero(3, nd);
  div.setZero(nd);
  for (int a = 0; a < cv.num_basis(); ++a) {
    const double phi = cv.phi(q, a);
    const double gx = cv.grad(q, a).x(), gy = cv.grad(q, a).y();
    for (int c = 0; c < 3; ++c) val(c, 3 * a + c) = phi;
    curl(2, 3 * a) = -gy;
    curl(2, 3 * a + 1) = gx;
    curl(0, 3 * a + 2) = gy;
    curl(1, 3 * a + 2) = -gx;
    div[3 * a] = gx;
    div[3 * a + 1] = gy;
  }
}

} // namespace

double energy(const Space& director, const Vector& u, const ProblemParams& p)
{
  if (director.components() != 3 || u.size() != director.num_dofs())
    throw std::invalid_argument("energy: vector does not match a 3-component space");
  CellValues cv(dunavant8());
  double div2 = 0.0, bend = 0.0, twist = 0.0, area = 0.0;
  const double kappa = p.kappa();
  for (Index t = 0; t < director.mesh().num_triangles(); ++t) {
    cv.reinit(director, t);
    const auto nodes = director.cell_nodes(t);
    area += cv.area();
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const PointField f = eval_field(cv, q, nodes, director, u);
      const Eigen::Vector3d c = curl3(f.grad);
      const double dv = f.grad(0, 0) + f.grad(1, 1);
      div2 += cv.jxw(q) * dv * dv;
      bend += cv.jxw(q) * c.dot(z_tensor(f.n, kappa) * c);
      twist += cv.jxw(q) * f.n.dot(c);
    }
  }
  return 0.5 * (p.k1 * div2 + p.k3 * bend + 2.0 * p.k2 * p.q0 * twist + p.k2 * p.q0 * p.q0 * area);
}

SparseMatrix assemble_operator(const Space& director, const Space& multiplier, const State& state,
                               const ProblemParams& p, OperatorMode mode)
{
  check_state(director, multiplier, state);
  SparseMatrix a = sparsity_pattern(director, director);
  CellValues cv(dunavant8()), cm(dunavant8());
  const int nd = director.dofs_per_cell();
  const double k23 = p.k2 - p.k3;
  const bool augment = mode != OperatorMode::plain && p.gamma != 0.0;
  const bool newton_term = augment && mode == OperatorMode::newton_aug;

  LocalBasis val, curl;
  LocalVector div;
  LocalMatrix local(nd, nd);
  for (Index t = 0; t < director.mesh().num_triangles(); ++t) {
    cv.reinit(director, t);
    cm.reinit(multiplier, t);
    const auto nodes = director.cell_nodes(t);
    const auto mnodes = multiplier.cell_nodes(t);
    local.setZero(nd, nd);
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const PointField f = eval_field(cv, q, nodes, director, state.director);
      const double lambda = eval_scalar(cm, q, mnodes, state.multiplier);
      const Eigen::Vector3d cn = curl3(f.grad);
      vector_basis(cv, q, val, curl, div);

      const LocalVector s = curl.transpose() * f.n + val.transpose() * cn;
      const LocalMatrix cross = curl.transpose() * val;
      const double mixed = k23 * f.n.dot(cn) + p.k2 * p.q0;
      const LocalMatrix mass = val.transpose() * val;
      LocalMatrix qp = p.k1 * div * div.transpose() + p.k3 * curl.transpose() * curl + k23 * s * s.transpose() +
                       mixed * (cross + cross.transpose()) + 2.0 * lambda * mass;
      if (augment) {
        const LocalVector nv = val.transpose() * f.n;
        qp += 4.0 * p.gamma * nv * nv.transpose();
        if (newton_term) qp += 2.0 * p.gamma * (f.n.squaredNorm() - 1.0) * mass;
      }
      local += cv.jxw(q) * qp;
    }
    for (int i = 0; i < nd; ++i) {
      const Index gi = director.dof(nodes[static_cast<std::size_t>(i / 3)], i % 3);
      for (int j = 0; j < nd; ++j)
        a.coeffRef(gi, director.dof(nodes[static_cast<std::size_t>(j / 3)], j % 3)) += local(i, j);
    }
  }
  return a;
}

SparseMatrix assemble_constraint(const Space& director, const Space& multiplier, const Vector& u)
{
  check_spaces(director, multiplier);
  if (u.size() != director.num_dofs()) throw std::invalid_argument("assemble_constraint: director size mismatch");
  SparseMatrix b = sparsity_pattern(multiplier, director);
  CellValues cv(dunavant8()), cm(dunavant8());
  const int nd = director.dofs_per_cell();
  LocalBasis val, curl;
  LocalVector div;
  Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 18> local(3, nd);
  for (Index t = 0; t < director.mesh().num_triangles(); ++t) {
    cv.reinit(director, t);
    cm.reinit(multiplier, t);
    const auto nodes = director.cell_nodes(t);
    const auto mnodes = multiplier.cell_nodes(t);
    local.setZero(3, nd);
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const PointField f = eval_field(cv, q, nodes, director, u);
      vector_basis(cv, q, val, curl, div);
      const LocalVector nv = val.transpose() * f.n;
      for (int i = 0; i < 3; ++i) local.row(i) += cv.jxw(q) * 2.0 * cm.phi(q, i) * nv.transpose();
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < nd; ++j)
        b.coeffRef(mnodes[static_cast<std::size_t>(i)], director.dof(nodes[static_cast<std::size_t>(j / 3)], j % 3)) +=
          local(i, j);
  }
  return b;
}

SparseMatrix assemble_mass_multiplier(const Space& multiplier)
{
  if (multiplier.components() != 1) throw std::invalid_argument("assemble_mass_multiplier: scalar space required");
  SparseMatrix m = sparsity_pattern(multiplier, multiplier);
  CellValues cv(dunavant8());
  const int nb = multiplier.nodes_per_cell();
  for (Index t = 0; t < multiplier.mesh().num_triangles(); ++t) {
    cv.reinit(multiplier, t);
    const auto nodes = multiplier.cell_nodes(t);
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) {
        double v = 0.0;
        for (std::size_t q = 0; q < cv.num_points(); ++q) v += cv.jxw(q) * cv.phi(q, i) * cv.phi(q, j);
        m.coeffRef(nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(j)]) += v;
      }
  }
  return m;
}

Residual assemble_rhs(const Space& director, const Space& multiplier, const State& state, const ProblemParams& p)
{
  check_state(director, multiplier, state);
  Residual r{Vector::Zero(director.num_dofs()), Vector::Zero(multiplier.num_dofs())};
  CellValues cv(dunavant8()), cm(dunavant8());
  const int nd = director.dofs_per_cell();
  const double k23 = p.k2 - p.k3;
  const double kappa = p.kappa();
  LocalBasis val, curl;
  LocalVector div, local(nd);
  Eigen::Vector3d localg;
  for (Index t = 0; t < director.mesh().num_triangles(); ++t) {
    cv.reinit(director, t);
    cm.reinit(multiplier, t);
    const auto nodes = director.cell_nodes(t);
    const auto mnodes = multiplier.cell_nodes(t);
    local.setZero(nd);
    localg.setZero();
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const PointField f = eval_field(cv, q, nodes, director, state.director);
      const double lambda = eval_scalar(cm, q, mnodes, state.multiplier);
      const Eigen::Vector3d cn = curl3(f.grad);
      const double dn = f.grad(0, 0) + f.grad(1, 1);
      const double defect = f.n.squaredNorm() - 1.0;
      vector_basis(cv, q, val, curl, div);

      const LocalVector vc = val.transpose() * cn;
      const LocalVector vn = val.transpose() * f.n;
      LocalVector g = p.k1 * dn * div + p.k3 * curl.transpose() * (z_tensor(f.n, kappa) * cn) +
                      k23 * f.n.dot(cn) * vc + p.k2 * p.q0 * (vc + curl.transpose() * f.n) + 2.0 * lambda * vn;
      if (p.gamma != 0.0) g += 2.0 * p.gamma * defect * vn;
      local -= cv.jxw(q) * g;
      for (int i = 0; i < 3; ++i) localg[i] -= cv.jxw(q) * cm.phi(q, i) * defect;
    }
    for (int i = 0; i < nd; ++i) r.f[director.dof(nodes[static_cast<std::size_t>(i / 3)], i % 3)] += local[i];
    for (int i = 0; i < 3; ++i) r.g[mnodes[static_cast<std::size_t>(i)]] += localg[i];
  }
  return r;
}

double constraint_norm(const Space& director, const Vector& u)
{
  if (director.components() != 3 || u.size() != director.num_dofs())
    throw std::invalid_argument("constraint_norm: vector does not match a 3-component space");
  CellValues cv(dunavant8());
  double sum = 0.0;
  for (Index t = 0; t < director.mesh().num_triangles(); ++t) {
    cv.reinit(director, t);
    const auto nodes = director.cell_nodes(t);
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const double d = eval_field(cv, q, nodes, director, u).n.squaredNorm() - 1.0;
      sum += cv.jxw(q) * d * d;
    }
  }
  return std::sqrt(sum);
}

ErrorNorms error_norms(const Space& director, const Vector& u, const ExactField& exact)
{
  if (director.components() != 3 || u.size() != director.num_dofs())
    throw std::invalid_argument("error_norms: vector does not match a 3-component space");
  CellValues cv(dunavant8());
  double l2 = 0.0, semi = 0.0;
  for (Index t = 0; t < director.mesh().num_triangles(); ++t) {
    cv.reinit(director, t);
    const auto nodes = director.cell_nodes(t);
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      const PointField f = eval_field(cv, q, nodes, director, u);
      const Point& x = cv.point(q);
      l2 += cv.jxw(q) * (f.n - exact.value(x)).squaredNorm();
      semi += cv.jxw(q) * (f.grad - exact.gradient(x)).squaredNorm();
    }
  }
  return {std::sqrt(l2), std::sqrt(semi), std::sqrt(l2 + semi)};
}

double h1_norm(const Space& space, const Vector& u)
{
  if (u.size() != space.num_dofs()) throw std::invalid_argument("h1_norm: size mismatch");
  CellValues cv(dunavant8());
  const int nc = space.components();
  double sum = 0.0;
  for (Index t = 0; t < space.mesh().num_triangles(); ++t) {
    cv.reinit(space, t);
    const auto nodes = space.cell_nodes(t);
    for (std::size_t q = 0; q < cv.num_points(); ++q) {
      for (int c = 0; c < nc; ++c) {
        double v = 0.0;
        Eigen::Vector2d g = Eigen::Vector2d::Zero();
        for (int a = 0; a < cv.num_basis(); ++a) {
          const double coef = u[space.dof(nodes[static_cast<std::size_t>(a)], c)];
          v += coef * cv.phi(q, a);
          g += coef * cv.grad(q, a);
        }
        sum += cv.jxw(q) * (v * v + g.squaredNorm());
      }
    }
  }
  return std::sqrt(sum);
}

std::pair<double, double> director_length_range(const Space& director, const Vector& u)
{
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Index k = 0; k < director.num_nodes(); ++k) {
    const double s = Eigen::Vector3d(u[director.dof(k, 0)], u[director.dof(k, 1)], u[director.dof(k, 2)]).squaredNorm();
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

} // namespace nematic
