#pragma once

#include "nematic/linalg.hpp"
#include "nematic/mesh.hpp"

#include <array>
#include <functional>
#include <memory>

namespace nematic {

enum class Family { P1, P2 };

/// Lagrange space on a triangulation with 1 or 3 components.
///
/// Nodes are the mesh vertices followed (P2) by the edge midpoints, so node
/// `num_vertices + e` sits on edge e. Vector dofs are interleaved:
/// dof(node, c) = components * node + c. Local cell nodes are ordered
/// v0, v1, v2 and then (P2) the midpoints of edges 01, 12, 20.
class Space
{
public:
  Space(std::shared_ptr<const Mesh2d> mesh, Family family, int components);

  const Mesh2d& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh2d>& mesh_ptr() const { return mesh_; }
  Family family() const { return family_; }
  int components() const { return components_; }

  Index num_nodes() const { return num_nodes_; }
  Index num_dofs() const { return num_nodes_ * components_; }
  int nodes_per_cell() const { return family_ == Family::P1 ? 3 : 6; }
  int dofs_per_cell() const { return nodes_per_cell() * components_; }

  /// Global nodes of triangle t; only the first nodes_per_cell() entries are used.
  std::array<Index, 6> cell_nodes(Index t) const;
  Index dof(Index node, int c) const { return node * components_ + c; }
  Point node_coord(Index node) const;
  std::uint8_t node_tag(Index node) const;

  std::vector<Point> node_coords() const;
  std::vector<std::uint8_t> node_tags() const;

private:
  std::shared_ptr<const Mesh2d> mesh_;
  Family family_;
  int components_;
  Index num_nodes_;
};

/// Dirichlet and periodic constraints on a full-length dof layout.
///
/// A ghost dof is identified with its owner; a Dirichlet dof carries a
/// prescribed value. A dof is never both.
class Constraints
{
public:
  explicit Constraints(Index num_dofs = 0);

  Index size() const { return static_cast<Index>(kind_.size()); }

  void add_dirichlet(Index dof, double value);
  /// Ignored when either side is already Dirichlet.
  void add_periodic(Index owner, Index ghost);

  bool is_dirichlet(Index dof) const { return kind_[static_cast<std::size_t>(dof)] == dirichlet_kind; }
  bool is_ghost(Index dof) const { return kind_[static_cast<std::size_t>(dof)] == ghost_kind; }
  bool is_constrained(Index dof) const { return kind_[static_cast<std::size_t>(dof)] != free_kind; }
  Index owner(Index dof) const { return owner_[static_cast<std::size_t>(dof)]; }
  double value(Index dof) const { return value_[static_cast<std::size_t>(dof)]; }

  std::vector<Index> dirichlet_dofs() const;
  std::vector<Index> ghost_dofs() const;
  Index num_free() const;

  /// Same constraints with every Dirichlet value set to zero.
  Constraints homogenized() const;

private:
  static constexpr std::int8_t free_kind = 0;
  static constexpr std::int8_t dirichlet_kind = 1;
  static constexpr std::int8_t ghost_kind = 2;
  void check(Index dof) const;

  std::vector<std::int8_t> kind_;
  std::vector<double> value_;
  std::vector<Index> owner_;
};

using ComponentFunction = std::function<double(const Point&, int)>;

struct BoundarySetup
{
  /// Bitmask of sides carrying Dirichlet data (see `boundary`).
  std::uint8_t dirichlet_sides = 0;
  bool periodic_x = false;
  /// Boundary value of component c at a point; unused without Dirichlet sides.
  ComponentFunction value;
};

/// Dirichlet dofs on the tagged sides first, then x-periodic pairs of the
/// remaining left/right nodes.
Constraints make_constraints(const Space& space, const BoundarySetup& setup);

/// Nodes on the x=1 side paired with x=0 (corners included). This is the
/// quantity subtracted when counting the reduced unknowns of a periodic space.
Index num_periodic_ghost_nodes(const Space& space);

struct ConstrainedSystem
{
  SparseMatrix a;
  Vector b;
};

/// Folds ghost rows and columns into their owners and leaves an identity row
/// with zero rhs at each ghost; then eliminates Dirichlet dofs symmetrically
/// (row and column zeroed, unit diagonal, rhs = value, columns lifted into b).
/// Applying it to its own output changes nothing.
ConstrainedSystem apply_bcs(const SparseMatrix& a, const Vector& b, const Constraints& c);

/// E_r^T B E_c for a rectangular block; constrained rows and columns are zeroed.
SparseMatrix fold_rectangular(const SparseMatrix& b, const Constraints& rows, const Constraints& cols);

/// r_owner += r_ghost, r_ghost = 0.
void fold_residual(Vector& r, const Constraints& c);
/// x_ghost = x_owner.
void distribute(Vector& x, const Constraints& c);
/// Zeroes Dirichlet and ghost entries.
void zero_constrained(Vector& x, const Constraints& c);
/// x_d = value(d) on Dirichlet dofs.
void set_dirichlet_values(Vector& x, const Constraints& c);

/// Sparsity of a bilinear form with test functions in `rows` and trial
/// functions in `cols` on the same mesh; all stored values are zero.
SparseMatrix sparsity_pattern(const Space& rows, const Space& cols);

/// Coarse basis functions evaluated at the fine nodes. `fine` must live on
/// refine(coarse mesh) with the same family and component count.
SparseMatrix build_prolongation(const Space& coarse, const Space& fine);

/// Nodal interpolation.
Vector interpolate(const Space& space, const ComponentFunction& f);

/// Restriction of a fine coefficient vector to the coarse nodes (which are
/// the first coarse-node-count fine nodes).
Vector inject(const Space& coarse, const Space& fine, const Vector& fine_values);

} // namespace nematic
