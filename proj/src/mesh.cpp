#include "nematic/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace nematic {

Point Mesh2d::edge_midpoint(Index e) const
{
  const auto& [a, b] = edges[static_cast<std::size_t>(e)];
  return 0.5 * (vertices[static_cast<std::size_t>(a)] + vertices[static_cast<std::size_t>(b)]);
}

double Mesh2d::signed_area(Index t) const
{
  const auto& tri = triangles[static_cast<std::size_t>(t)];
  const Point& a = vertices[static_cast<std::size_t>(tri[0])];
  const Point& b = vertices[static_cast<std::size_t>(tri[1])];
  const Point& c = vertices[static_cast<std::size_t>(tri[2])];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

void finalize_topology(Mesh2d& mesh)
{
  mesh.edges.clear();
  mesh.triangle_edges.assign(mesh.triangles.size(), {0, 0, 0});
  std::map<std::pair<Index, Index>, Index> edge_index;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      Index a = tri[static_cast<std::size_t>(k)];
      Index b = tri[static_cast<std::size_t>((k + 1) % 3)];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_index.try_emplace({a, b}, static_cast<Index>(mesh.edges.size()));
      if (inserted) mesh.edges.push_back({a, b});
      mesh.triangle_edges[t][static_cast<std::size_t>(k)] = it->second;
    }
  }

  mesh.edge_tags.resize(mesh.edges.size());
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const auto& [a, b] = mesh.edges[e];
    mesh.edge_tags[e] = mesh.vertex_tags[static_cast<std::size_t>(a)] & mesh.vertex_tags[static_cast<std::size_t>(b)];
  }

  const std::size_t nv = mesh.vertices.size();
  mesh.vertex_cell_offsets.assign(nv + 1, 0);
  for (const auto& tri : mesh.triangles)
    for (Index v : tri) ++mesh.vertex_cell_offsets[static_cast<std::size_t>(v) + 1];
  for (std::size_t v = 0; v < nv; ++v) mesh.vertex_cell_offsets[v + 1] += mesh.vertex_cell_offsets[v];
  mesh.vertex_cells.assign(static_cast<std::size_t>(mesh.vertex_cell_offsets[nv]), 0);
  std::vector<Index> fill(mesh.vertex_cell_offsets.begin(), mesh.vertex_cell_offsets.end() - 1);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (Index v : mesh.triangles[t])
      mesh.vertex_cells[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = static_cast<Index>(t);
}

Mesh2d build_structured_square(int n)
{
  if (n < 1) throw std::invalid_argument("build_structured_square: n must be >= 1, got " + std::to_string(n));

  Mesh2d mesh;
  const auto np = static_cast<std::size_t>(n + 1);
  mesh.vertices.reserve(np * np);
  mesh.vertex_tags.reserve(np * np);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
      std::uint8_t tag = boundary::interior;
      if (j == 0) tag |= boundary::bottom;
      if (j == n) tag |= boundary::top;
      if (i == 0) tag |= boundary::left;
      if (i == n) tag |= boundary::right;
      mesh.vertex_tags.push_back(tag);
    }
  }

  auto id = [n](int i, int j) { return static_cast<Index>(j) * (n + 1) + i; };
  mesh.triangles.reserve(2 * static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Index bl = id(i, j), br = id(i + 1, j), tl = id(i, j + 1), tr = id(i + 1, j + 1);
      mesh.triangles.push_back({bl, br, tl});
      mesh.triangles.push_back({br, tr, tl});
    }
  }
  finalize_topology(mesh);
  return mesh;
}

Mesh2d refine(const Mesh2d& coarse)
{
  Mesh2d fine;
  const Index nv = coarse.num_vertices();
  fine.vertices = coarse.vertices;
  fine.vertex_tags = coarse.vertex_tags;
  fine.vertices.reserve(static_cast<std::size_t>(nv + coarse.num_edges()));
  for (Index e = 0; e < coarse.num_edges(); ++e) {
    fine.vertices.push_back(coarse.edge_midpoint(e));
    fine.vertex_tags.push_back(coarse.edge_tags[static_cast<std::size_t>(e)]);
  }

  fine.triangles.reserve(4 * coarse.triangles.size());
  for (std::size_t t = 0; t < coarse.triangles.size(); ++t) {
    const auto& [a, b, c] = coarse.triangles[t];
    const auto& te = coarse.triangle_edges[t];
    const Index mab = nv + te[0], mbc = nv + te[1], mca = nv + te[2];
    fine.triangles.push_back({a, mab, mca});
    fine.triangles.push_back({mab, b, mbc});
    fine.triangles.push_back({mca, mbc, c});
    fine.triangles.push_back({mab, mbc, mca});
  }
  finalize_topology(fine);
  return fine;
}

std::vector<Index> vertex_star(const Mesh2d& mesh, Index v)
{
  if (v < 0 || v >= mesh.num_vertices())
    throw std::invalid_argument("vertex_star: vertex " + std::to_string(v) + " out of range");
  const auto begin = mesh.vertex_cells.begin() + mesh.vertex_cell_offsets[static_cast<std::size_t>(v)];
  const auto end = mesh.vertex_cells.begin() + mesh.vertex_cell_offsets[static_cast<std::size_t>(v) + 1];
  return {begin, end};
}

PeriodicMap periodic_pairs(const std::vector<Point>& points, const std::vector<std::uint8_t>& tags)
{
  std::vector<Index> left, right;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (tags[i] & boundary::left) left.push_back(static_cast<Index>(i));
    if (tags[i] & boundary::right) right.push_back(static_cast<Index>(i));
  }
  auto by_y = [&](Index a, Index b) {
    return points[static_cast<std::size_t>(a)].y() < points[static_cast<std::size_t>(b)].y();
  };
  std::sort(left.begin(), left.end(), by_y);
  std::sort(right.begin(), right.end(), by_y);
  if (left.size() != right.size())
    throw std::logic_error("periodic_pairs: " + std::to_string(left.size()) + " left vs " +
                           std::to_string(right.size()) + " right boundary entities");

  PeriodicMap map;
  map.pairs.reserve(left.size());
  for (std::size_t k = 0; k < left.size(); ++k) {
    const Point& o = points[static_cast<std::size_t>(left[k])];
    const Point& g = points[static_cast<std::size_t>(right[k])];
    if (std::abs(o.y() - g.y()) > 1e-12)
      throw std::logic_error("periodic_pairs: unmatched boundary entity at y=" + std::to_string(g.y()));
    map.pairs.emplace_back(left[k], right[k]);
  }
  return map;
}

PeriodicMap periodic_pairs(const Mesh2d& mesh)
{
  return periodic_pairs(mesh.vertices, mesh.vertex_tags);
}

MeshHierarchy MeshHierarchy::uniform(int coarse_n, int refinements)
{
  if (refinements < 0) throw std::invalid_argument("MeshHierarchy: negative refinement count");
  MeshHierarchy h;
  h.levels.push_back(std::make_shared<const Mesh2d>(build_structured_square(coarse_n)));
  for (int r = 0; r < refinements; ++r)
    h.levels.push_back(std::make_shared<const Mesh2d>(refine(*h.levels.back())));
  return h;
}

} // namespace nematic
