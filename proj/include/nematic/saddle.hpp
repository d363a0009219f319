#pragma once

#include "nematic/fespace.hpp"
#include "nematic/forms.hpp"
#include "nematic/krylov.hpp"
#include "nematic/linalg.hpp"
#include "nematic/multigrid.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace nematic {

enum class Linearization { newton, picard };
enum class InnerSolver { lu, mg_star, mg_pbj };

struct SolverConfig
{
  Linearization linearization = Linearization::picard;
  InnerSolver inner = InnerSolver::lu;
  double atol = 1e-8;
  double rtol = 1e-4;
  int max_nonlinear = 50;
  int max_linear = 100;
  int smoothing_steps = 3;
};

/// Director (vector P1 or P2) and multiplier (scalar P1) spaces on every
/// level of a uniform hierarchy, with their constraints and the director
/// prolongations.
class Discretization
{
public:
  Discretization(int coarse_n, int refinements, Family director_family, const BoundarySetup& bc);

  Index num_levels() const { return meshes_.num_levels(); }
  Index finest() const { return num_levels() - 1; }

  const Space& director(Index l) const { return director_.at(static_cast<std::size_t>(l)); }
  const Space& multiplier(Index l) const { return multiplier_.at(static_cast<std::size_t>(l)); }
  /// Constraints carrying the boundary data.
  const Constraints& director_bcs(Index l) const { return director_bcs_.at(static_cast<std::size_t>(l)); }
  /// Same with zero data, for updates.
  const Constraints& update_bcs(Index l) const { return update_bcs_.at(static_cast<std::size_t>(l)); }
  const Constraints& multiplier_bcs(Index l) const { return multiplier_bcs_.at(static_cast<std::size_t>(l)); }
  /// Director prolongation from level l to level l+1.
  const SparseMatrix& prolongation(Index l) const { return prolongations_.at(static_cast<std::size_t>(l)); }

  /// Unknowns after identifying periodic ghosts (Dirichlet dofs included).
  Index reported_dofs(Index l) const;

private:
  MeshHierarchy meshes_;
  std::vector<Space> director_, multiplier_;
  std::vector<Constraints> director_bcs_, update_bcs_, multiplier_bcs_;
  std::vector<SparseMatrix> prolongations_;
  bool periodic_ = false;
};

/// Interpolated director with Dirichlet data and periodic copies applied,
/// multiplier zero.
State initial_state(const Discretization& d, Index level, const ComponentFunction& guess);

/// Constrained blocks of one linearization step.
struct BlockSystem
{
  SparseMatrix a; ///< A + gamma A_*, folded and Dirichlet-eliminated
  SparseMatrix b; ///< constraint block, multiplier rows
  SparseMatrix m; ///< multiplier mass, identity rows at ghosts
  Vector f;
  Vector g;
  std::vector<Index> multiplier_ghosts;

  Index nu() const { return a.rows(); }
  Index np() const { return m.rows(); }
  /// [A B^T; B D] x with D = 1 on multiplier ghost rows, 0 elsewhere.
  void apply(const Vector& x, Vector& y) const;
  Vector rhs() const;
  /// The full saddle matrix in sparse form.
  SparseMatrix monolithic() const;
};

OperatorMode operator_mode(Linearization l);

BlockSystem assemble_block_system(const Discretization& d, Index level, const State& state, const ProblemParams& p,
                                  OperatorMode mode);

/// -(1 + gamma) M^{-1} v.
Vector schur_apply(const DirectFactorization& mass, double gamma, const Vector& v);

using InnerApply = std::function<Vector(const Vector&)>;

/// Full block factorization:
///   y_u = A~^{-1} r_u,  z_p = S~^{-1} (r_p - B y_u),  z_u = A~^{-1} (r_u - B^T z_p).
/// S~^{-1} is -(1 + gamma) M^{-1} unless an explicit Schur inverse is given.
class BlockPreconditioner
{
public:
  BlockPreconditioner(const BlockSystem& sys, InnerApply inner, double gamma);
  BlockPreconditioner(const BlockSystem& sys, InnerApply inner, InnerApply schur_inverse);

  void operator()(const Vector& r, Vector& z) const;

private:
  const BlockSystem* sys_;
  InnerApply inner_;
  InnerApply schur_;
  std::shared_ptr<DirectFactorization> mass_;
};

/// Ã^{-1} applications for the chosen inner solver at `level`. Multigrid
/// levels below `level` are re-assembled in Picard form from states injected
/// at the coarse nodes.
InnerApply make_inner_solver(const Discretization& d, Index level, const BlockSystem& sys, const State& state,
                             const ProblemParams& p, const SolverConfig& cfg);

struct SolveReport
{
  int nonlinear_iterations = 0;
  std::vector<int> linear_iterations;
  std::vector<bool> linear_converged;
  std::vector<double> residual_norms;
  double avg_linear = 0.0;
  int failed_linear = 0;
  double energy = 0.0;
  double constraint_norm = 0.0;
  bool converged = false;
  double min_multiplier = 0.0;
  double min_length2 = 0.0;
  double max_length2 = 0.0;
};

/// Picard or Newton iteration on the finest level. `state` is the initial
/// guess on entry (see initial_state) and the final iterate on exit. Linear
/// solves that exceed max_linear are flagged and left out of avg_linear.
SolveReport nonlinear_solve(const Discretization& d, const ProblemParams& p, const SolverConfig& cfg, State& state);

/// ||(A_* - B^T M^{-1} B) U||_2 / ||U||_1 on the free dofs of `level`, with
/// A_* = 4<n.u, n.v> and B, M from `director`.
double schur_perturbation_norm(const Discretization& d, Index level, const Vector& director, const Vector& update);

} // namespace nematic
