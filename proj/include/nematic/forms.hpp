#pragma once

#include "nematic/fespace.hpp"
#include "nematic/linalg.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace nematic {

struct ProblemParams
{
  double k1 = 1.0;
  double k2 = 1.2;
  double k3 = 1.0;
  double q0 = 0.0;
  double gamma = 0.0;

  double kappa() const { return k2 / k3; }
};

/// Director and multiplier coefficients on full-length layouts.
struct State
{
  Vector director;
  Vector multiplier;
};

enum class OperatorMode {
  plain,      ///< Newton Hessian of the Lagrangian, no augmentation
  newton_aug, ///< plain + 4g<n.u, n.v> + 2g<n.n-1, u.v>
  picard_aug  ///< plain + 4g<n.u, n.v>
};

using Gradient3 = Eigen::Matrix<double, 3, 2>;

/// curl of a 3-component field with no z dependence:
/// (d_y n3, -d_x n3, d_x n2 - d_y n1).
Eigen::Vector3d curl3(const Gradient3& grad);

/// I + (kappa - 1) n n^T.
Eigen::Matrix3d z_tensor(const Eigen::Vector3d& n, double kappa);

/// Throws std::invalid_argument on K_i <= 0, gamma < 0 or q0 < 0; returns
/// warnings when K2 q0 is comparable to K1 or K3.
std::vector<std::string> validate_params(const ProblemParams& p);

/// J(n) including the constant K2 q0^2 |Omega| / 2.
double energy(const Space& director, const Vector& u, const ProblemParams& p);

/// Linearized director operator at `state` for the requested mode.
SparseMatrix assemble_operator(const Space& director, const Space& multiplier, const State& state,
                               const ProblemParams& p, OperatorMode mode);

/// B_ij = <mu_i, 2 n_k . v_j>; multiplier rows, director columns.
SparseMatrix assemble_constraint(const Space& director, const Space& multiplier, const Vector& u);

/// (M)_ij = <mu_i, mu_j>.
SparseMatrix assemble_mass_multiplier(const Space& multiplier);

struct Residual
{
  Vector f; ///< F^c(v) = -L_n(v), augmentation included when gamma > 0
  Vector g; ///< G(mu) = -<mu, n.n - 1>
};

Residual assemble_rhs(const Space& director, const Space& multiplier, const State& state, const ProblemParams& p);

/// || n.n - 1 ||_0.
double constraint_norm(const Space& director, const Vector& u);

struct ErrorNorms
{
  double l2 = 0.0;
  double h1_semi = 0.0;
  double h1 = 0.0;
};

struct ExactField
{
  std::function<Eigen::Vector3d(const Point&)> value;
  std::function<Gradient3(const Point&)> gradient;
};

ErrorNorms error_norms(const Space& director, const Vector& u, const ExactField& exact);

/// Full H1 norm of a discrete field with any component count.
double h1_norm(const Space& space, const Vector& u);

/// Smallest and largest |n|^2 over the nodes.
std::pair<double, double> director_length_range(const Space& director, const Vector& u);

} // namespace nematic
