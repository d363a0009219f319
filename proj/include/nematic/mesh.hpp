#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace nematic {

using Index = std::ptrdiff_t;
using Point = Eigen::Vector2d;

/// Boundary classification of a vertex or edge. Stored as a bitmask so the
/// four corners of the square carry both of their sides.
namespace boundary {
inline constexpr std::uint8_t interior = 0;
inline constexpr std::uint8_t bottom = 1;
inline constexpr std::uint8_t top = 2;
inline constexpr std::uint8_t left = 4;
inline constexpr std::uint8_t right = 8;
inline constexpr std::uint8_t all = bottom | top | left | right;
} // namespace boundary

/// Conforming triangulation of the unit square.
///
/// Local edge k of a triangle joins local vertices k and (k+1)%3; the global
/// edge index is stored in `triangle_edges`. Edges are keyed by their sorted
/// vertex pair, so P2 edge dofs need no orientation sign.
struct Mesh2d
{
  std::vector<Point> vertices;
  std::vector<std::array<Index, 3>> triangles;
  std::vector<std::array<Index, 2>> edges;
  std::vector<std::array<Index, 3>> triangle_edges;
  std::vector<std::uint8_t> vertex_tags;
  std::vector<std::uint8_t> edge_tags;

  Index num_vertices() const { return static_cast<Index>(vertices.size()); }
  Index num_triangles() const { return static_cast<Index>(triangles.size()); }
  Index num_edges() const { return static_cast<Index>(edges.size()); }

  Point edge_midpoint(Index e) const;
  double signed_area(Index t) const;

  /// Triangles incident to each vertex, CSR layout.
  std::vector<Index> vertex_cell_offsets;
  std::vector<Index> vertex_cells;
};

/// Builds edges, edge tags and vertex-cell adjacency from vertices, triangles
/// and vertex tags. Edge order is first encounter in triangle order.
void finalize_topology(Mesh2d& mesh);

/// N x N grid on [0,1]^2, each cell cut by its negative-slope diagonal
/// (top-left to bottom-right). Vertices are numbered y-major.
Mesh2d build_structured_square(int n);

/// Regular (red) refinement. Parent vertices keep their indices; the midpoint
/// of coarse edge e becomes fine vertex `num_vertices + e`. Child triangle
/// 4t+k lies inside coarse triangle t.
Mesh2d refine(const Mesh2d& mesh);

/// Triangles containing vertex v.
std::vector<Index> vertex_star(const Mesh2d& mesh, Index v);

/// Owner/ghost identification of the x=0 and x=1 sides at equal y.
struct PeriodicMap
{
  std::vector<std::pair<Index, Index>> pairs; // (owner on x=0, ghost on x=1)
};

/// Pairs every vertex on x=1 with the vertex on x=0 at the same height.
/// Corners are paired as well; Dirichlet precedence is decided later.
PeriodicMap periodic_pairs(const Mesh2d& mesh);

/// Pairs arbitrary points tagged left/right by their y coordinate.
PeriodicMap periodic_pairs(const std::vector<Point>& points, const std::vector<std::uint8_t>& tags);

/// Nested sequence of uniformly refined meshes, coarsest first.
struct MeshHierarchy
{
  std::vector<std::shared_ptr<const Mesh2d>> levels;

  static MeshHierarchy uniform(int coarse_n, int refinements);
  Index num_levels() const { return static_cast<Index>(levels.size()); }
  const Mesh2d& level(Index l) const { return *levels.at(static_cast<std::size_t>(l)); }
  const Mesh2d& finest() const { return *levels.back(); }
};

} // namespace nematic
