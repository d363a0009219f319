#include "nematic/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nematic {

Discretization::Discretization(int coarse_n, int refinements, Family director_family, const BoundarySetup& bc)
  : meshes_(MeshHierarchy::uniform(coarse_n, refinements))
  , periodic_(bc.periodic_x)
{
  const BoundarySetup multiplier_setup{0, bc.periodic_x, {}};
  for (Index l = 0; l < meshes_.num_levels(); ++l) {
    const auto& mesh = meshes_.levels[static_cast<std::size_t>(l)];
    director_.emplace_back(mesh, director_family, 3);
    multiplier_.emplace_back(mesh, Family::P1, 1);
    director_bcs_.push_back(make_constraints(director_.back(), bc));
    update_bcs_.push_back(director_bcs_.back().homogenized());
    multiplier_bcs_.push_back(make_constraints(multiplier_.back(), multiplier_setup));
  }
  for (std::size_t l = 0; l + 1 < director_.size(); ++l)
    prolongations_.push_back(build_prolongation(director_[l], director_[l + 1]));
}

Index Discretization::reported_dofs(Index l) const
{
  const Space& u = director(l);
  const Space& p = multiplier(l);
  if (!periodic_) return u.num_dofs() + p.num_dofs();
  return 3 * (u.num_nodes() - num_periodic_ghost_nodes(u)) + (p.num_nodes() - num_periodic_ghost_nodes(p));
}

State initial_state(const Discretization& d, Index level, const ComponentFunction& guess)
{
  State s;
  s.director = interpolate(d.director(level), guess);
  set_dirichlet_values(s.director, d.director_bcs(level));
  distribute(s.director, d.director_bcs(level));
  s.multiplier = Vector::Zero(d.multiplier(level).num_dofs());
  return s;
}

// ---------------------------------------------------------------------------

void BlockSystem::apply(const Vector& x, Vector& y) const
{
  const Index n = nu(), m = np();
  y.resize(n + m);
  const auto xu = x.head(n);
  const auto xp = x.tail(m);
  y.head(n).noalias() = a * xu;
  y.head(n).noalias() += b.transpose() * xp;
  y.tail(m).noalias() = b * xu;
  for (Index g : multiplier_ghosts) y[n + g] += xp[g];
}

Vector BlockSystem::rhs() const
{
  Vector r(nu() + np());
  r << f, g;
  return r;
}

SparseMatrix BlockSystem::monolithic() const
{
  const Index n = nu();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * b.nonZeros()) + multiplier_ghosts.size());
  for (Index i = 0; i < a.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(a, i); it; ++it)
      trips.emplace_back(static_cast<int>(i), static_cast<int>(it.col()), it.value());
  for (Index i = 0; i < b.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(b, i); it; ++it) {
      trips.emplace_back(static_cast<int>(n + i), static_cast<int>(it.col()), it.value());
      trips.emplace_back(static_cast<int>(it.col()), static_cast<int>(n + i), it.value());
    }
  for (Index g : multiplier_ghosts) trips.emplace_back(static_cast<int>(n + g), static_cast<int>(n + g), 1.0);
  return assemble(trips, n + np(), n + np());
}

OperatorMode operator_mode(Linearization l)
{
  return l == Linearization::newton ? OperatorMode::newton_aug : OperatorMode::picard_aug;
}

BlockSystem assemble_block_system(const Discretization& d, Index level, const State& state, const ProblemParams& p,
                                  OperatorMode mode)
{
  const Space& u = d.director(level);
  const Space& q = d.multiplier(level);
  const Constraints& ubc = d.update_bcs(level);
  const Constraints& pbc = d.multiplier_bcs(level);

  BlockSystem sys;
  const Residual res = assemble_rhs(u, q, state, p);
  ConstrainedSystem cs = apply_bcs(assemble_operator(u, q, state, p, mode), res.f, ubc);
  sys.a = std::move(cs.a);
  sys.f = std::move(cs.b);
  sys.b = fold_rectangular(assemble_constraint(u, q, state.director), pbc, ubc);
  sys.g = res.g;
  fold_residual(sys.g, pbc);
  sys.m = apply_bcs(assemble_mass_multiplier(q), Vector::Zero(q.num_dofs()), pbc).a;
  sys.multiplier_ghosts = pbc.ghost_dofs();
  return sys;
}

Vector schur_apply(const DirectFactorization& mass, double gamma, const Vector& v)
{
  return -(1.0 + gamma) * mass.solve(v);
}

// ---------------------------------------------------------------------------

BlockPreconditioner::BlockPreconditioner(const BlockSystem& sys, InnerApply inner, double gamma)
  : sys_(&sys)
  , inner_(std::move(inner))
  , mass_(std::make_shared<DirectFactorization>(factor_spd_or_lu(sys.m)))
{
  auto mass = mass_;
  const auto ghosts = sys.multiplier_ghosts;
  schur_ = [mass, gamma, ghosts](const Vector& v) {
    Vector z = schur_apply(*mass, gamma, v);
    for (Index g : ghosts) z[g] = v[g];
    return z;
  };
}

BlockPreconditioner::BlockPreconditioner(const BlockSystem& sys, InnerApply inner, InnerApply schur_inverse)
  : sys_(&sys)
  , inner_(std::move(inner))
  , schur_(std::move(schur_inverse))
{
}

void BlockPreconditioner::operator()(const Vector& r, Vector& z) const
{
  const Index n = sys_->nu(), m = sys_->np();
  if (r.size() != n + m) throw std::invalid_argument("BlockPreconditioner: residual size mismatch");
  const Vector ru = r.head(n);
  const Vector yu = inner_(ru);
  const Vector zp = schur_(r.tail(m) - sys_->b * yu);
  const Vector zu = inner_(ru - sys_->b.transpose() * zp);
  z.resize(n + m);
  z << zu, zp;
}

InnerApply make_inner_solver(const Discretization& d, Index level, const BlockSystem& sys, const State& state,
                             const ProblemParams& p, const SolverConfig& cfg)
{
  if (cfg.inner == InnerSolver::lu || level == 0) {
    auto f = std::make_shared<DirectFactorization>(factor_spd_or_lu(sys.a));
    return [f](const Vector& v) { return f->solve(v); };
  }

  std::vector<MgLevelInput> levels;
  std::vector<SparseMatrix> prolongations;
  for (Index l = 0; l < level; ++l) {
    // Coarse nodes are the leading fine nodes, so injection is a prefix.
    State coarse{state.director.head(d.director(l).num_dofs()), state.multiplier.head(d.multiplier(l).num_dofs())};
    const SparseMatrix a = assemble_operator(d.director(l), d.multiplier(l), coarse, p, OperatorMode::picard_aug);
    levels.push_back({apply_bcs(a, Vector::Zero(a.rows()), d.update_bcs(l)).a, d.update_bcs(l), &d.director(l)});
    prolongations.push_back(d.prolongation(l));
  }
  levels.push_back({sys.a, d.update_bcs(level), &d.director(level)});

  MgConfig mg;
  mg.kind = cfg.inner == InnerSolver::mg_star ? PatchKind::star : PatchKind::point_block;
  mg.smoothing_steps = cfg.smoothing_steps;
  auto cycle = std::make_shared<Multigrid>(std::move(levels), std::move(prolongations), mg);
  return [cycle](const Vector& v) { return cycle->vcycle(v); };
}

// ---------------------------------------------------------------------------

SolveReport nonlinear_solve(const Discretization& d, const ProblemParams& p, const SolverConfig& cfg, State& state)
{
  validate_params(p);
  if (!(cfg.atol > 0.0) || !(cfg.rtol > 0.0)) throw std::invalid_argument("nonlinear_solve: tolerances must be positive");
  const Index level = d.finest();
  const Space& u = d.director(level);
  if (state.director.size() != u.num_dofs() || state.multiplier.size() != d.multiplier(level).num_dofs())
    throw std::invalid_argument("nonlinear_solve: initial state does not match the finest level");

  SolveReport rep;
  const OperatorMode mode = operator_mode(cfg.linearization);
  for (int it = 0;; ++it) {
    const BlockSystem sys = assemble_block_system(d, level, state, p, mode);
    const double rn = std::sqrt(sys.f.squaredNorm() + sys.g.squaredNorm());
    rep.residual_norms.push_back(rn);
    if (rn <= cfg.atol) {
      rep.converged = true;
      break;
    }
    if (it == cfg.max_nonlinear || !std::isfinite(rn)) break;

    const BlockPreconditioner pc(sys, make_inner_solver(d, level, sys, state, p, cfg), p.gamma);
    const auto op = [&sys](const Vector& x, Vector& y) { sys.apply(x, y); };
    Vector x = Vector::Zero(sys.nu() + sys.np());
    KrylovReport kr;
    try {
      kr = fgmres(op, sys.rhs(), x, KrylovOptions{cfg.rtol, cfg.max_linear}, pc);
    }
    catch (const KrylovBreakdown&) {
      kr.converged = false;
      kr.iterations = cfg.max_linear;
    }
    rep.linear_iterations.push_back(kr.iterations);
    rep.linear_converged.push_back(kr.converged);

    Vector du = x.head(sys.nu());
    Vector dp = x.tail(sys.np());
    distribute(du, d.update_bcs(level));
    distribute(dp, d.multiplier_bcs(level));
    state.director += du;
    state.multiplier += dp;
    ++rep.nonlinear_iterations;
  }

  int counted = 0, total = 0;
  for (std::size_t k = 0; k < rep.linear_iterations.size(); ++k) {
    if (!rep.linear_converged[k]) {
      ++rep.failed_linear;
      continue;
    }
    ++counted;
    total += rep.linear_iterations[k];
  }
  rep.avg_linear = counted > 0 ? static_cast<double>(total) / counted : 0.0;
  rep.energy = energy(u, state.director, p);
  rep.constraint_norm = constraint_norm(u, state.director);
  rep.min_multiplier = state.multiplier.size() > 0 ? state.multiplier.minCoeff() : 0.0;
  std::tie(rep.min_length2, rep.max_length2) = director_length_range(u, state.director);
  return rep;
}

double schur_perturbation_norm(const Discretization& d, Index level, const Vector& director, const Vector& update)
{
  const Space& u = d.director(level);
  const Space& q = d.multiplier(level);
  const Constraints& ubc = d.update_bcs(level);
  const Constraints& pbc = d.multiplier_bcs(level);
  if (director.size() != u.num_dofs() || update.size() != u.num_dofs())
    throw std::invalid_argument("schur_perturbation_norm: vectors do not match the level");

  // With all Frank constants zero the Picard operator is exactly gamma A_*.
  ProblemParams pure{0.0, 0.0, 0.0, 0.0, 1.0};
  const State s{director, Vector::Zero(q.num_dofs())};
  const SparseMatrix aplus =
    apply_bcs(assemble_operator(u, q, s, pure, OperatorMode::picard_aug), Vector::Zero(u.num_dofs()), ubc).a;
  const SparseMatrix b = fold_rectangular(assemble_constraint(u, q, director), pbc, ubc);
  const SparseMatrix m = apply_bcs(assemble_mass_multiplier(q), Vector::Zero(q.num_dofs()), pbc).a;
  const DirectFactorization mf = factor_spd_or_lu(m);

  Vector x = update;
  zero_constrained(x, ubc);
  Vector r = aplus * x - b.transpose() * mf.solve(b * x);
  zero_constrained(r, ubc);
  const double h1 = h1_norm(u, update);
  if (!(h1 > 0.0)) throw std::invalid_argument("schur_perturbation_norm: zero update");
  return r.norm() / h1;
}

} // namespace nematic
