#include "nematic/multigrid.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace nematic {

namespace {

/// Node that owns node k under the periodic identification.
Index node_owner(const Space& space, const Constraints& c, Index k)
{
  return c.owner(space.dof(k, 0)) / space.components();
}

void check_constraints(const Space& space, const Constraints& c)
{
  if (c.size() != space.num_dofs()) throw std::invalid_argument("patches: constraints do not match the space");
}

} // namespace

PatchDecomposition build_patches(const Space& space, const Constraints& c, PatchKind kind)
{
  check_constraints(space, c);
  const Mesh2d& mesh = space.mesh();
  const int nc = space.components();
  PatchDecomposition d;
  d.kind = kind;

  auto push_free = [&](const std::vector<Index>& nodes) {
    std::vector<Index> dofs;
    for (Index node : nodes)
      for (int comp = 0; comp < nc; ++comp) {
        const Index dof = space.dof(node, comp);
        if (!c.is_constrained(dof)) dofs.push_back(dof);
      }
    std::sort(dofs.begin(), dofs.end());
    dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
    if (!dofs.empty()) d.patches.push_back(std::move(dofs));
  };

  if (kind == PatchKind::point_block) {
    for (Index k = 0; k < space.num_nodes(); ++k)
      if (node_owner(space, c, k) == k) push_free({k});
    return d;
  }

  // Ghost vertices contribute their stars to their owners.
  std::vector<std::vector<Index>> centers(static_cast<std::size_t>(mesh.num_vertices()));
  for (Index v = 0; v < mesh.num_vertices(); ++v)
    centers[static_cast<std::size_t>(node_owner(space, c, v))].push_back(v);

  const Index nv = mesh.num_vertices();
  for (Index v = 0; v < nv; ++v) {
    if (node_owner(space, c, v) != v) continue;
    std::vector<Index> nodes;
    for (Index w : centers[static_cast<std::size_t>(v)]) {
      nodes.push_back(w);
      if (space.family() != Family::P2) continue;
      for (Index t : vertex_star(mesh, w)) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const auto& te = mesh.triangle_edges[static_cast<std::size_t>(t)];
        for (int k = 0; k < 3; ++k)
          if (tri[static_cast<std::size_t>(k)] == w || tri[static_cast<std::size_t>((k + 1) % 3)] == w)
            nodes.push_back(nv + te[static_cast<std::size_t>(k)]);
      }
    }
    for (Index& node : nodes) node = node_owner(space, c, node);
    push_free(nodes);
  }
  return d;
}

int overlap_number(const Space& space, const Constraints& c, const PatchDecomposition& d)
{
  check_constraints(space, c);
  const Index nt = space.mesh().num_triangles();
  std::vector<std::vector<Index>> node_support(static_cast<std::size_t>(space.num_nodes()));
  for (Index t = 0; t < nt; ++t) {
    const auto nodes = space.cell_nodes(t);
    for (int a = 0; a < space.nodes_per_cell(); ++a)
      node_support[static_cast<std::size_t>(node_owner(space, c, nodes[static_cast<std::size_t>(a)]))].push_back(t);
  }

  std::vector<std::vector<Index>> support(d.patches.size());
  std::vector<std::vector<Index>> patches_on(static_cast<std::size_t>(nt));
  for (std::size_t i = 0; i < d.patches.size(); ++i) {
    std::set<Index> tris;
    for (Index dof : d.patches[i]) {
      const auto& s = node_support[static_cast<std::size_t>(dof / space.components())];
      tris.insert(s.begin(), s.end());
    }
    support[i].assign(tris.begin(), tris.end());
    for (Index t : support[i]) patches_on[static_cast<std::size_t>(t)].push_back(static_cast<Index>(i));
  }

  int best = 0;
  for (std::size_t i = 0; i < d.patches.size(); ++i) {
    std::set<Index> neighbours;
    for (Index t : support[i])
      neighbours.insert(patches_on[static_cast<std::size_t>(t)].begin(), patches_on[static_cast<std::size_t>(t)].end());
    best = std::max(best, static_cast<int>(neighbours.size()));
  }
  return best;
}

// ---------------------------------------------------------------------------

AdditiveSchwarz::AdditiveSchwarz(const SparseMatrix& a, PatchDecomposition patches)
  : n_(a.rows())
  , patches_(std::move(patches))
{
  std::vector<int> local(static_cast<std::size_t>(n_), -1);
  blocks_.resize(patches_.patches.size());
  for (std::size_t p = 0; p < patches_.patches.size(); ++p) {
    const auto& idx = patches_.patches[p];
    const auto m = static_cast<Index>(idx.size());
    for (Index i = 0; i < m; ++i) {
      if (idx[static_cast<std::size_t>(i)] < 0 || idx[static_cast<std::size_t>(i)] >= n_)
        throw std::invalid_argument("AdditiveSchwarz: patch " + std::to_string(p) + " has an out-of-range dof");
      local[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = static_cast<int>(i);
    }
    DenseMatrix block = DenseMatrix::Zero(m, m);
    for (Index i = 0; i < m; ++i)
      for (SparseMatrix::InnerIterator it(a, idx[static_cast<std::size_t>(i)]); it; ++it) {
        const int j = local[static_cast<std::size_t>(it.col())];
        if (j >= 0) block(i, j) = it.value();
      }
    for (Index i : idx) local[static_cast<std::size_t>(i)] = -1;

    Block& b = blocks_[p];
    b.llt.compute(block);
    if (b.llt.info() != Eigen::Success) {
      b.use_lu = true;
      ++lu_fallbacks_;
      b.lu.compute(block);
      const auto pivots = b.lu.matrixLU().diagonal().cwiseAbs();
      if (!(pivots.minCoeff() > 1e-14 * pivots.maxCoeff()) || !(b.lu.rcond() > 1e-14)) throw std::runtime_error("AdditiveSchwarz: patch " + std::to_string(p) + " is singular");
    }
  }
}

Vector AdditiveSchwarz::apply(const Vector& r) const
{
  Vector z;
  (*this)(r, z);
  return z;
}

void AdditiveSchwarz::operator()(const Vector& r, Vector& z) const
{
  if (r.size() != n_) throw std::invalid_argument("AdditiveSchwarz: residual size mismatch");
  z = Vector::Zero(n_);
  Vector local;
  for (std::size_t p = 0; p < patches_.patches.size(); ++p) {
    const auto& idx = patches_.patches[p];
    local.resize(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) local[static_cast<Index>(i)] = r[idx[i]];
    const Block& b = blocks_[p];
    const Vector sol = b.use_lu ? Vector(b.lu.solve(local)) : Vector(b.llt.solve(local));
    for (std::size_t i = 0; i < idx.size(); ++i) z[idx[i]] += sol[static_cast<Index>(i)];
  }
}

// ---------------------------------------------------------------------------

Multigrid::Multigrid(std::vector<MgLevelInput> levels, std::vector<SparseMatrix> prolongations, const MgConfig& config)
  : prolongations_(std::move(prolongations))
  , config_(config)
{
  if (levels.empty()) throw std::invalid_argument("Multigrid: no levels");
  if (prolongations_.size() + 1 != levels.size())
    throw std::invalid_argument("Multigrid: need one prolongation per pair of levels");
  if (config.smoothing_steps < 1) throw std::invalid_argument("Multigrid: smoothing steps must be >= 1");

  for (std::size_t l = 0; l < levels.size(); ++l) {
    Level lev{std::move(levels[l].a), std::move(levels[l].constraints), std::nullopt};
    if (l > 0) {
      if (!levels[l].space) throw std::invalid_argument("Multigrid: level space missing");
      const SparseMatrix& p = prolongations_[l - 1];
      if (p.rows() != lev.a.rows() || p.cols() != levels_.back().a.rows())
        throw std::invalid_argument("Multigrid: prolongation shape does not match the levels");
      lev.smoother.emplace(lev.a, build_patches(*levels[l].space, lev.constraints, config.kind));
    }
    levels_.push_back(std::move(lev));
  }
  for (const auto& p : prolongations_) restrictions_.push_back(p.transpose());
  coarse_ = std::make_unique<DirectFactorization>(factor_spd_or_lu(levels_.front().a));
}

const AdditiveSchwarz& Multigrid::smoother(Index level) const
{
  const auto& s = levels_.at(static_cast<std::size_t>(level)).smoother;
  if (!s) throw std::invalid_argument("Multigrid: the coarsest level has no smoother");
  return *s;
}

void Multigrid::relax(Index level, const Vector& b, Vector& x) const
{
  const Level& lev = levels_.at(static_cast<std::size_t>(level));
  if (!lev.smoother) throw std::invalid_argument("Multigrid: the coarsest level has no smoother");
  gmres_fixed_steps(MatrixOperator{&lev.a}, b, x, config_.smoothing_steps, *lev.smoother);
}

Vector Multigrid::restrict_residual(Index fine_level, const Vector& r) const
{
  const Level& coarse = levels_[static_cast<std::size_t>(fine_level - 1)];
  Vector rc = restrictions_[static_cast<std::size_t>(fine_level - 1)] * r;
  fold_residual(rc, coarse.constraints);
  zero_constrained(rc, coarse.constraints);
  return rc;
}

Vector Multigrid::prolong_correction(Index fine_level, const Vector& e) const
{
  Vector ec = e;
  distribute(ec, levels_[static_cast<std::size_t>(fine_level - 1)].constraints);
  Vector ef = prolongations_[static_cast<std::size_t>(fine_level - 1)] * ec;
  zero_constrained(ef, levels_[static_cast<std::size_t>(fine_level)].constraints);
  return ef;
}

Vector Multigrid::cycle(Index level, const Vector& b) const
{
  if (level == 0) return coarse_->solve(b);
  const Level& lev = levels_[static_cast<std::size_t>(level)];
  Vector x = Vector::Zero(b.size());
  if (config_.pre_smooth) relax(level, b, x);
  const Vector r = b - lev.a * x;
  x += prolong_correction(level, cycle(level - 1, restrict_residual(level, r)));
  if (config_.post_smooth) relax(level, b, x);
  return x;
}

Vector Multigrid::vcycle(const Vector& b) const
{
  if (b.size() != levels_.back().a.rows()) throw std::invalid_argument("Multigrid: rhs size mismatch");
  return cycle(num_levels() - 1, b);
}

// ---------------------------------------------------------------------------

SpectralEstimate estimate_spectrum(const SparseMatrix& a, const AdditiveSchwarz& d, const Constraints& c, int steps)
{
  const Index n = a.rows();
  if (c.size() != n) throw std::invalid_argument("estimate_spectrum: constraints do not match the operator");
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(0.37 * static_cast<double>(i) + 0.1);
  zero_constrained(v, c);

  std::vector<Vector> basis, abasis;
  Vector av = a * v;
  double nrm = std::sqrt(v.dot(av));
  if (!(nrm > 0.0)) throw std::invalid_argument("estimate_spectrum: operator is not positive on the start vector");
  basis.push_back(v / nrm);
  abasis.push_back(av / nrm);

  std::vector<double> alpha, beta;
  for (int j = 0; j < steps; ++j) {
    Vector w = d.apply(abasis.back());
    alpha.push_back(w.dot(abasis.back()));
    // Full reorthogonalization in the A inner product (twice for stability).
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < basis.size(); ++i) w -= w.dot(abasis[i]) * basis[i];
    const Vector aw = a * w;
    const double b = std::sqrt(std::max(w.dot(aw), 0.0));
    if (!(b > 1e-12 * std::abs(alpha.front())) || j + 1 == steps) break;
    beta.push_back(b);
    basis.push_back(w / b);
    abasis.push_back(aw / b);
  }

  const auto m = static_cast<Index>(alpha.size());
  DenseMatrix t = DenseMatrix::Zero(m, m);
  for (Index i = 0; i < m; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(t, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff(), static_cast<int>(m)};
}

} // namespace nematic
