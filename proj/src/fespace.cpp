#include "nematic/fespace.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nematic {

Space::Space(std::shared_ptr<const Mesh2d> mesh, Family family, int components)
  : mesh_(std::move(mesh))
  , family_(family)
  , components_(components)
{
  if (!mesh_) throw std::invalid_argument("Space: null mesh");
  if (family != Family::P1 && family != Family::P2) throw std::invalid_argument("Space: unsupported family");
  if (components != 1 && components != 3)
    throw std::invalid_argument("Space: components must be 1 or 3, got " + std::to_string(components));
  num_nodes_ = mesh_->num_vertices() + (family == Family::P2 ? mesh_->num_edges() : 0);
}

std::array<Index, 6> Space::cell_nodes(Index t) const
{
  const auto& tri = mesh_->triangles[static_cast<std::size_t>(t)];
  std::array<Index, 6> nodes{tri[0], tri[1], tri[2], -1, -1, -1};
  if (family_ == Family::P2) {
    const auto& te = mesh_->triangle_edges[static_cast<std::size_t>(t)];
    const Index nv = mesh_->num_vertices();
    nodes[3] = nv + te[0];
    nodes[4] = nv + te[1];
    nodes[5] = nv + te[2];
  }
  return nodes;
}

Point Space::node_coord(Index node) const
{
  const Index nv = mesh_->num_vertices();
  if (node < nv) return mesh_->vertices[static_cast<std::size_t>(node)];
  return mesh_->edge_midpoint(node - nv);
}

std::uint8_t Space::node_tag(Index node) const
{
  const Index nv = mesh_->num_vertices();
  if (node < nv) return mesh_->vertex_tags[static_cast<std::size_t>(node)];
  return mesh_->edge_tags[static_cast<std::size_t>(node - nv)];
}

std::vector<Point> Space::node_coords() const
{
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(num_nodes_));
  for (Index k = 0; k < num_nodes_; ++k) pts.push_back(node_coord(k));
  return pts;
}

std::vector<std::uint8_t> Space::node_tags() const
{
  std::vector<std::uint8_t> tags;
  tags.reserve(static_cast<std::size_t>(num_nodes_));
  for (Index k = 0; k < num_nodes_; ++k) tags.push_back(node_tag(k));
  return tags;
}

// ---------------------------------------------------------------------------

Constraints::Constraints(Index num_dofs)
  : kind_(static_cast<std::size_t>(num_dofs), free_kind)
  , value_(static_cast<std::size_t>(num_dofs), 0.0)
  , owner_(static_cast<std::size_t>(num_dofs))
{
  for (Index i = 0; i < num_dofs; ++i) owner_[static_cast<std::size_t>(i)] = i;
}

void Constraints::check(Index dof) const
{
  if (dof < 0 || dof >= size())
    throw std::invalid_argument("constraints: dof " + std::to_string(dof) + " out of range [0," +
                                std::to_string(size()) + ")");
}

void Constraints::add_dirichlet(Index dof, double value)
{
  check(dof);
  const auto i = static_cast<std::size_t>(dof);
  if (kind_[i] == ghost_kind) owner_[i] = dof;
  kind_[i] = dirichlet_kind;
  value_[i] = value;
}

void Constraints::add_periodic(Index owner, Index ghost)
{
  check(owner);
  check(ghost);
  if (owner == ghost) throw std::invalid_argument("constraints: dof paired with itself");
  if (is_dirichlet(owner) || is_dirichlet(ghost)) return;
  if (is_ghost(owner)) throw std::logic_error("constraints: owner " + std::to_string(owner) + " is itself a ghost");
  const auto g = static_cast<std::size_t>(ghost);
  kind_[g] = ghost_kind;
  owner_[g] = owner;
}

std::vector<Index> Constraints::dirichlet_dofs() const
{
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i)
    if (is_dirichlet(i)) out.push_back(i);
  return out;
}

std::vector<Index> Constraints::ghost_dofs() const
{
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i)
    if (is_ghost(i)) out.push_back(i);
  return out;
}

Index Constraints::num_free() const
{
  return static_cast<Index>(std::count(kind_.begin(), kind_.end(), free_kind));
}

Constraints Constraints::homogenized() const
{
  Constraints c = *this;
  std::fill(c.value_.begin(), c.value_.end(), 0.0);
  return c;
}

Constraints make_constraints(const Space& space, const BoundarySetup& setup)
{
  Constraints c(space.num_dofs());
  const int nc = space.components();
  if (setup.dirichlet_sides != 0) {
    if (!setup.value) throw std::invalid_argument("make_constraints: Dirichlet sides given without a value function");
    for (Index k = 0; k < space.num_nodes(); ++k) {
      if (!(space.node_tag(k) & setup.dirichlet_sides)) continue;
      const Point p = space.node_coord(k);
      for (int comp = 0; comp < nc; ++comp) c.add_dirichlet(space.dof(k, comp), setup.value(p, comp));
    }
  }
  if (setup.periodic_x) {
    const PeriodicMap map = periodic_pairs(space.node_coords(), space.node_tags());
    for (const auto& [owner, ghost] : map.pairs)
      for (int comp = 0; comp < nc; ++comp) c.add_periodic(space.dof(owner, comp), space.dof(ghost, comp));
  }
  return c;
}

Index num_periodic_ghost_nodes(const Space& space)
{
  Index count = 0;
  for (Index k = 0; k < space.num_nodes(); ++k)
    if (space.node_tag(k) & boundary::right) ++count;
  return count;
}

// ---------------------------------------------------------------------------

namespace {

void check_layout(const SparseMatrix& a, const Vector& b, const Constraints& c)
{
  if (a.rows() != a.cols()) throw std::invalid_argument("apply_bcs: matrix is not square");
  if (a.rows() != b.size() || a.rows() != c.size())
    throw std::invalid_argument("apply_bcs: size mismatch between matrix (" + std::to_string(a.rows()) + "), rhs (" +
                                std::to_string(b.size()) + ") and constraints (" + std::to_string(c.size()) + ")");
}

} // namespace

ConstrainedSystem apply_bcs(const SparseMatrix& a, const Vector& b, const Constraints& c)
{
  check_layout(a, b, c);
  const Index n = a.rows();

  // Ghosts already reduced to an identity row and column are left alone.
  std::vector<int> off_diagonal_in_col(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(a, i); it; ++it)
      if (it.col() != i && it.value() != 0.0) ++off_diagonal_in_col[static_cast<std::size_t>(it.col())];

  std::vector<Index> target(static_cast<std::size_t>(n));
  std::vector<bool> fold(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) {
    target[static_cast<std::size_t>(i)] = i;
    if (!c.is_ghost(i)) continue;
    bool identity_row = off_diagonal_in_col[static_cast<std::size_t>(i)] == 0;
    for (SparseMatrix::InnerIterator it(a, i); it && identity_row; ++it)
      if (it.value() != 0.0 && (it.col() != i || it.value() != 1.0)) identity_row = false;
    if (identity_row && a.coeff(i, i) == 1.0) continue;
    target[static_cast<std::size_t>(i)] = c.owner(i);
    fold[static_cast<std::size_t>(i)] = true;
  }

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros()) + static_cast<std::size_t>(n));
  Vector bf = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const Index ti = target[static_cast<std::size_t>(i)];
    bf[ti] += b[i];
    for (SparseMatrix::InnerIterator it(a, i); it; ++it)
      trips.emplace_back(static_cast<int>(ti), static_cast<int>(target[static_cast<std::size_t>(it.col())]),
                         it.value());
  }
  for (Index i = 0; i < n; ++i) {
    if (!c.is_ghost(i)) continue;
    bf[i] = 0.0;
    if (fold[static_cast<std::size_t>(i)]) trips.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  }
  const SparseMatrix folded = assemble(trips, n, n);

  // Symmetric Dirichlet elimination with lifting.
  trips.clear();
  for (Index i = 0; i < n; ++i) {
    const bool row_d = c.is_dirichlet(i);
    for (SparseMatrix::InnerIterator it(folded, i); it; ++it) {
      const Index j = it.col();
      const bool col_d = c.is_dirichlet(j);
      if (row_d || col_d) {
        if (!row_d) bf[i] -= it.value() * c.value(j);
        continue;
      }
      trips.emplace_back(static_cast<int>(i), static_cast<int>(j), it.value());
    }
    if (row_d) trips.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  }
  for (Index i = 0; i < n; ++i)
    if (c.is_dirichlet(i)) bf[i] = c.value(i);

  return {assemble(trips, n, n), std::move(bf)};
}

SparseMatrix fold_rectangular(const SparseMatrix& b, const Constraints& rows, const Constraints& cols)
{
  if (b.rows() != rows.size() || b.cols() != cols.size())
    throw std::invalid_argument("fold_rectangular: constraint sizes do not match the block");
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(b.nonZeros()));
  for (Index i = 0; i < b.rows(); ++i) {
    const Index ti = rows.owner(i);
    if (rows.is_dirichlet(ti)) continue;
    for (SparseMatrix::InnerIterator it(b, i); it; ++it) {
      const Index tj = cols.owner(it.col());
      if (cols.is_dirichlet(tj)) continue;
      trips.emplace_back(static_cast<int>(ti), static_cast<int>(tj), it.value());
    }
  }
  return assemble(trips, b.rows(), b.cols());
}

void fold_residual(Vector& r, const Constraints& c)
{
  for (Index i = 0; i < c.size(); ++i) {
    if (!c.is_ghost(i)) continue;
    r[c.owner(i)] += r[i];
    r[i] = 0.0;
  }
}

void distribute(Vector& x, const Constraints& c)
{
  for (Index i = 0; i < c.size(); ++i)
    if (c.is_ghost(i)) x[i] = x[c.owner(i)];
}

void zero_constrained(Vector& x, const Constraints& c)
{
  for (Index i = 0; i < c.size(); ++i)
    if (c.is_constrained(i)) x[i] = 0.0;
}

void set_dirichlet_values(Vector& x, const Constraints& c)
{
  for (Index i = 0; i < c.size(); ++i)
    if (c.is_dirichlet(i)) x[i] = c.value(i);
}

// ---------------------------------------------------------------------------

SparseMatrix sparsity_pattern(const Space& rows, const Space& cols)
{
  if (&rows.mesh() != &cols.mesh()) throw std::invalid_argument("sparsity_pattern: spaces live on different meshes");
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(rows.num_nodes()));
  const int nr = rows.nodes_per_cell(), ncl = cols.nodes_per_cell();
  for (Index t = 0; t < rows.mesh().num_triangles(); ++t) {
    const auto rn = rows.cell_nodes(t);
    const auto cn = cols.cell_nodes(t);
    for (int a = 0; a < nr; ++a)
      for (int b = 0; b < ncl; ++b) adj[static_cast<std::size_t>(rn[static_cast<std::size_t>(a)])].push_back(cn[static_cast<std::size_t>(b)]);
  }
  Eigen::VectorXi per_row(rows.num_dofs());
  for (Index k = 0; k < rows.num_nodes(); ++k) {
    auto& list = adj[static_cast<std::size_t>(k)];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (int r = 0; r < rows.components(); ++r)
      per_row[rows.dof(k, r)] = static_cast<int>(list.size()) * cols.components();
  }
  SparseMatrix m(rows.num_dofs(), cols.num_dofs());
  m.reserve(per_row);
  for (Index k = 0; k < rows.num_nodes(); ++k)
    for (int r = 0; r < rows.components(); ++r)
      for (Index other : adj[static_cast<std::size_t>(k)])
        for (int cc = 0; cc < cols.components(); ++cc) m.insert(rows.dof(k, r), cols.dof(other, cc)) = 0.0;
  m.makeCompressed();
  return m;
}

namespace {

Eigen::Vector3d barycentric(const Point& p, const Point& a, const Point& b, const Point& c)
{
  Eigen::Matrix2d t;
  t.col(0) = b - a;
  t.col(1) = c - a;
  const Eigen::Vector2d s = t.partialPivLu().solve(p - a);
  return {1.0 - s[0] - s[1], s[0], s[1]};
}

std::array<double, 6> basis_at(Family family, const Eigen::Vector3d& l)
{
  if (family == Family::P1) return {l[0], l[1], l[2], 0.0, 0.0, 0.0};
  return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[0] * l[1],         4.0 * l[1] * l[2],         4.0 * l[2] * l[0]};
}

} // namespace

SparseMatrix build_prolongation(const Space& coarse, const Space& fine)
{
  if (coarse.family() != fine.family() || coarse.components() != fine.components())
    throw std::invalid_argument("build_prolongation: coarse and fine spaces differ in family or components");
  const Mesh2d& cm = coarse.mesh();
  const Mesh2d& fm = fine.mesh();
  if (fm.num_triangles() != 4 * cm.num_triangles())
    throw std::invalid_argument("build_prolongation: fine mesh is not a refinement of the coarse mesh");

  const int nc = coarse.components();
  std::vector<bool> done(static_cast<std::size_t>(fine.num_nodes()), false);
  std::vector<Triplet> trips;
  for (Index t = 0; t < cm.num_triangles(); ++t) {
    const auto& tri = cm.triangles[static_cast<std::size_t>(t)];
    const Point& a = cm.vertices[static_cast<std::size_t>(tri[0])];
    const Point& b = cm.vertices[static_cast<std::size_t>(tri[1])];
    const Point& c = cm.vertices[static_cast<std::size_t>(tri[2])];
    const auto cnodes = coarse.cell_nodes(t);
    for (int k = 0; k < 4; ++k) {
      const auto fnodes = fine.cell_nodes(4 * t + k);
      for (int j = 0; j < fine.nodes_per_cell(); ++j) {
        const Index fn = fnodes[static_cast<std::size_t>(j)];
        if (done[static_cast<std::size_t>(fn)]) continue;
        done[static_cast<std::size_t>(fn)] = true;
        // Fine nodes sit at multiples of 1/4 in the parent's barycentrics.
        Eigen::Vector3d l = barycentric(fine.node_coord(fn), a, b, c);
        for (int q = 0; q < 3; ++q) l[q] = std::round(4.0 * l[q]) / 4.0;
        const auto phi = basis_at(coarse.family(), l);
        for (int i = 0; i < coarse.nodes_per_cell(); ++i) {
          if (phi[static_cast<std::size_t>(i)] == 0.0) continue;
          for (int comp = 0; comp < nc; ++comp)
            trips.emplace_back(static_cast<int>(fine.dof(fn, comp)),
                               static_cast<int>(coarse.dof(cnodes[static_cast<std::size_t>(i)], comp)),
                               phi[static_cast<std::size_t>(i)]);
        }
      }
    }
  }
  return assemble(trips, fine.num_dofs(), coarse.num_dofs());
}

Vector interpolate(const Space& space, const ComponentFunction& f)
{
  Vector x(space.num_dofs());
  for (Index k = 0; k < space.num_nodes(); ++k) {
    const Point p = space.node_coord(k);
    for (int c = 0; c < space.components(); ++c) x[space.dof(k, c)] = f(p, c);
  }
  return x;
}

Vector inject(const Space& coarse, const Space& fine, const Vector& fine_values)
{
  if (coarse.components() != fine.components() || fine_values.size() != fine.num_dofs())
    throw std::invalid_argument("inject: incompatible spaces or vector length");
  // Coarse node k coincides with fine node k for both families.
  return fine_values.head(coarse.num_dofs());
}

} // namespace nematic
