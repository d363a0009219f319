#include "nematic/fespace.hpp"
#include "nematic/forms.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <set>

using namespace nematic;

namespace {

std::shared_ptr<const Mesh2d> square(int n) { return std::make_shared<const Mesh2d>(build_structured_square(n)); }

DenseMatrix dense(const SparseMatrix& a) { return DenseMatrix(a); }

// Random symmetric sparse-ish matrix with a dominant diagonal.
SparseMatrix random_symmetric(Index n, std::mt19937& rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution keep(0.3);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    t.emplace_back(static_cast<int>(i), static_cast<int>(i), 4.0 + n);
    for (Index j = 0; j < i; ++j)
      if (keep(rng)) {
        const double v = u(rng);
        t.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
        t.emplace_back(static_cast<int>(j), static_cast<int>(i), v);
      }
  }
  return assemble(t, n, n);
}

// Extension operator E (full layout x = E y + g) built directly from the
// constraint description: one column per free dof, ghosts copy their owner.
DenseMatrix extension(const Constraints& c, std::vector<Index>& free)
{
  free.clear();
  for (Index i = 0; i < c.size(); ++i)
    if (!c.is_constrained(i)) free.push_back(i);
  DenseMatrix e = DenseMatrix::Zero(c.size(), static_cast<Index>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) e(free[k], static_cast<Index>(k)) = 1.0;
  for (Index i = 0; i < c.size(); ++i)
    if (c.is_ghost(i))
      for (std::size_t k = 0; k < free.size(); ++k)
        if (free[k] == c.owner(i)) e(i, static_cast<Index>(k)) = 1.0;
  return e;
}

Constraints mixed_constraints(Index n)
{
  Constraints c(n);
  c.add_dirichlet(0, 0.7);
  c.add_dirichlet(5, -1.3);
  c.add_periodic(2, 7);
  c.add_periodic(3, 9);
  c.add_periodic(4, 8);
  return c;
}

} // namespace

TEST(Space, DofCounts)
{
  EXPECT_EQ(Space(square(10), Family::P2, 3).num_dofs(), 3 * (121 + 320));
  EXPECT_EQ(Space(square(10), Family::P2, 3).num_dofs(), 1323);
  EXPECT_EQ(Space(square(10), Family::P1, 1).num_dofs(), 121);
  EXPECT_EQ(Space(square(1), Family::P2, 1).num_dofs(), 9);
  EXPECT_EQ(Space(square(4), Family::P1, 3).num_dofs(), 75);
}

TEST(Space, InvalidArguments)
{
  EXPECT_THROW(Space(square(2), Family::P1, 2), std::invalid_argument);
  EXPECT_THROW(Space(nullptr, Family::P1, 1), std::invalid_argument);
  EXPECT_THROW(Space(square(2), static_cast<Family>(7), 1), std::invalid_argument);
}

TEST(Space, CellDofsCoverLayoutBijectively)
{
  const Space s(square(3), Family::P2, 3);
  std::set<Index> seen;
  for (Index t = 0; t < s.mesh().num_triangles(); ++t) {
    const auto nodes = s.cell_nodes(t);
    for (int a = 0; a < s.nodes_per_cell(); ++a)
      for (int c = 0; c < 3; ++c) seen.insert(s.dof(nodes[static_cast<std::size_t>(a)], c));
  }
  EXPECT_EQ(static_cast<Index>(seen.size()), s.num_dofs());
  EXPECT_EQ(*seen.begin(), 0);
  EXPECT_EQ(*seen.rbegin(), s.num_dofs() - 1);
}

TEST(Space, EdgeNodesSitAtMidpoints)
{
  const Space s(square(2), Family::P2, 1);
  for (Index t = 0; t < s.mesh().num_triangles(); ++t) {
    const auto nodes = s.cell_nodes(t);
    for (int k = 0; k < 3; ++k) {
      const Point a = s.node_coord(nodes[static_cast<std::size_t>(k)]);
      const Point b = s.node_coord(nodes[static_cast<std::size_t>((k + 1) % 3)]);
      EXPECT_LT((s.node_coord(nodes[static_cast<std::size_t>(3 + k)]) - 0.5 * (a + b)).norm(), 1e-15);
    }
  }
}

TEST(Interpolate, ConstantAndLinear)
{
  const Space v(square(3), Family::P2, 3);
  const Vector u = interpolate(v, [](const Point&, int c) { return c == 0 ? 1.0 : 0.0; });
  for (Index k = 0; k < v.num_nodes(); ++k) {
    EXPECT_EQ(u[v.dof(k, 0)], 1.0);
    EXPECT_EQ(u[v.dof(k, 1)], 0.0);
    EXPECT_EQ(u[v.dof(k, 2)], 0.0);
  }
  const Space s(square(3), Family::P1, 1);
  const Vector y = interpolate(s, [](const Point& p, int) { return p.y(); });
  for (Index k = 0; k < s.num_nodes(); ++k) EXPECT_EQ(y[k], s.node_coord(k).y());
}

TEST(Interpolate, TwistReproducedAtNodes)
{
  const double t0 = M_PI / 8;
  const Space v(square(4), Family::P2, 3);
  auto f = [t0](const Point& p, int c) {
    const double t = t0 * (2 * p.y() - 1);
    return c == 0 ? std::cos(t) : c == 1 ? 0.0 : std::sin(t);
  };
  const Vector u = interpolate(v, f);
  for (Index k = 0; k < v.num_nodes(); ++k)
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(u[v.dof(k, c)], f(v.node_coord(k), c), 1e-14);
}

TEST(Constraints, TwistCorners)
{
  const Space v(square(10), Family::P2, 3);
  BoundarySetup bc;
  bc.dirichlet_sides = boundary::bottom | boundary::top;
  bc.periodic_x = true;
  bc.value = [](const Point& p, int c) { return p.y() + c; };
  const Constraints c = make_constraints(v, bc);
  // 21 nodes on each of top and bottom; 21 right-side nodes minus 2 corners are ghosts.
  EXPECT_EQ(c.dirichlet_dofs().size(), 3u * 42u);
  EXPECT_EQ(c.ghost_dofs().size(), 3u * 19u);
  EXPECT_EQ(num_periodic_ghost_nodes(v), 21);
  for (Index i = 0; i < c.size(); ++i) EXPECT_FALSE(c.is_dirichlet(i) && c.is_ghost(i));
  for (Index g : c.ghost_dofs()) {
    const Index o = c.owner(g);
    EXPECT_EQ(v.node_coord(g / 3).y(), v.node_coord(o / 3).y());
    EXPECT_EQ(g % 3, o % 3);
    EXPECT_EQ(v.node_coord(o / 3).x(), 0.0);
  }
  for (Index d : c.dirichlet_dofs()) EXPECT_EQ(c.value(d), v.node_coord(d / 3).y() + static_cast<double>(d % 3));
  const Constraints h = c.homogenized();
  for (Index d : h.dirichlet_dofs()) EXPECT_EQ(h.value(d), 0.0);
  EXPECT_EQ(h.ghost_dofs(), c.ghost_dofs());
}

TEST(Constraints, RangeChecked)
{
  Constraints c(3);
  EXPECT_THROW(c.add_dirichlet(3, 0.0), std::invalid_argument);
  EXPECT_THROW(c.add_periodic(-1, 1), std::invalid_argument);
  EXPECT_THROW(c.add_periodic(1, 1), std::invalid_argument);
  c.add_dirichlet(0, 1.0);
  c.add_periodic(0, 2); // ignored, Dirichlet wins
  EXPECT_FALSE(c.is_ghost(2));
  EXPECT_EQ(c.num_free(), 2);
}

TEST(ApplyBcs, AllDirichletGivesIdentity)
{
  std::mt19937 rng(1);
  const SparseMatrix a = random_symmetric(6, rng);
  Constraints c(6);
  for (Index i = 0; i < 6; ++i) c.add_dirichlet(i, 0.0);
  const ConstrainedSystem s = apply_bcs(a, Vector::Ones(6), c);
  EXPECT_EQ(dense(s.a), DenseMatrix::Identity(6, 6));
  EXPECT_EQ(s.b, Vector::Zero(6));
}

TEST(ApplyBcs, TwoDofPeriodicFold)
{
  const SparseMatrix a = assemble({{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {1, 1, 4.0}}, 2, 2);
  Constraints c(2);
  c.add_periodic(0, 1);
  const ConstrainedSystem s = apply_bcs(a, Vector::Constant(2, 1.0), c);
  DenseMatrix expected(2, 2);
  expected << 10.0, 0.0, 0.0, 1.0;
  EXPECT_EQ(dense(s.a), expected);
  EXPECT_EQ(s.b[0], 2.0);
  EXPECT_EQ(s.b[1], 0.0);
}

TEST(ApplyBcs, SymmetricAndIdempotent)
{
  std::mt19937 rng(7);
  const SparseMatrix a = random_symmetric(10, rng);
  const Vector b = Vector::LinSpaced(10, -1.0, 2.0);
  const Constraints c = mixed_constraints(10);
  const ConstrainedSystem once = apply_bcs(a, b, c);
  EXPECT_LT(asymmetry(once.a), 1e-14);
  const ConstrainedSystem twice = apply_bcs(once.a, once.b, c);
  EXPECT_EQ(dense(twice.a), dense(once.a));
  EXPECT_EQ(twice.b, once.b);
}

TEST(ApplyBcs, MatchesReducedDenseSolve)
{
  std::mt19937 rng(11);
  const Index n = 10;
  const SparseMatrix a = random_symmetric(n, rng);
  const Vector b = Vector::LinSpaced(n, 0.5, 3.0);
  const Constraints c = mixed_constraints(n);

  std::vector<Index> free;
  const DenseMatrix e = extension(c, free);
  Vector g = Vector::Zero(n);
  for (Index d : c.dirichlet_dofs()) g[d] = c.value(d);
  const DenseMatrix ad = dense(a);
  const Vector y = (e.transpose() * ad * e).ldlt().solve(e.transpose() * (b - ad * g));
  const Vector oracle = e * y + g;

  const ConstrainedSystem s = apply_bcs(a, b, c);
  Vector x = dense(s.a).partialPivLu().solve(s.b);
  distribute(x, c);
  EXPECT_LT((x - oracle).norm(), 1e-12 * oracle.norm());
}

TEST(ApplyBcs, SizeMismatch)
{
  const SparseMatrix a = assemble({{0, 0, 1.0}}, 2, 2);
  EXPECT_THROW(apply_bcs(a, Vector::Zero(3), Constraints(2)), std::invalid_argument);
  EXPECT_THROW(apply_bcs(a, Vector::Zero(2), Constraints(3)), std::invalid_argument);
}

TEST(FoldRectangular, MatchesExtensionProduct)
{
  const Index m = 4, n = 10;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> t;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) t.emplace_back(i, j, u(rng));
  const SparseMatrix b = assemble(t, m, n);
  Constraints rows(m);
  rows.add_periodic(0, 3);
  const Constraints cols = mixed_constraints(n);

  std::vector<Index> fr, fc;
  const DenseMatrix er = extension(rows, fr), ec = extension(cols, fc);
  const DenseMatrix reduced = er.transpose() * dense(b) * ec;
  const DenseMatrix folded = dense(fold_rectangular(b, rows, cols));
  for (std::size_t i = 0; i < fr.size(); ++i)
    for (std::size_t j = 0; j < fc.size(); ++j)
      EXPECT_NEAR(folded(fr[i], fc[j]), reduced(static_cast<Index>(i), static_cast<Index>(j)), 1e-14);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (rows.is_constrained(i) || cols.is_constrained(j)) EXPECT_EQ(folded(i, j), 0.0);
}

TEST(VectorConstraints, FoldDistributeZero)
{
  const Constraints c = mixed_constraints(10);
  Vector r = Vector::LinSpaced(10, 0.0, 9.0);
  fold_residual(r, c);
  EXPECT_EQ(r[2], 2.0 + 7.0);
  EXPECT_EQ(r[7], 0.0);
  Vector x = Vector::LinSpaced(10, 0.0, 9.0);
  distribute(x, c);
  EXPECT_EQ(x[9], 3.0);
  set_dirichlet_values(x, c);
  EXPECT_EQ(x[0], 0.7);
  EXPECT_EQ(x[5], -1.3);
  zero_constrained(x, c);
  for (Index i : {0, 5, 7, 8, 9}) EXPECT_EQ(x[i], 0.0);
  EXPECT_EQ(x[1], 1.0);
}

TEST(Sparsity, MatchesNodalAdjacency)
{
  const auto mesh = square(3);
  const Space v(mesh, Family::P2, 3), q(mesh, Family::P1, 1);
  const SparseMatrix p = sparsity_pattern(q, v);
  EXPECT_EQ(p.rows(), q.num_dofs());
  EXPECT_EQ(p.cols(), v.num_dofs());
  std::set<std::pair<Index, Index>> expected;
  for (Index t = 0; t < mesh->num_triangles(); ++t) {
    const auto rn = q.cell_nodes(t), cn = v.cell_nodes(t);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 6; ++b)
        for (int c = 0; c < 3; ++c) expected.emplace(rn[static_cast<std::size_t>(a)], v.dof(cn[static_cast<std::size_t>(b)], c));
  }
  EXPECT_EQ(static_cast<std::size_t>(p.nonZeros()), expected.size());
  for (Index i = 0; i < p.rows(); ++i)
    for (SparseMatrix::InnerIterator it(p, i); it; ++it) EXPECT_EQ(expected.count({i, it.col()}), 1u);
}

TEST(Prolongation, P1Entries)
{
  const auto coarse = square(2);
  const auto fine = std::make_shared<const Mesh2d>(refine(*coarse));
  const Space sc(coarse, Family::P1, 1), sf(fine, Family::P1, 1);
  const SparseMatrix p = build_prolongation(sc, sf);
  for (Index k = 0; k < sf.num_nodes(); ++k) {
    std::vector<double> vals;
    for (SparseMatrix::InnerIterator it(p, k); it; ++it)
      if (it.value() != 0.0) vals.push_back(it.value());
    if (k < sc.num_nodes()) {
      ASSERT_EQ(vals.size(), 1u);
      EXPECT_EQ(vals[0], 1.0);
      EXPECT_EQ(p.coeff(k, k), 1.0);
    }
    else {
      ASSERT_EQ(vals.size(), 2u);
      EXPECT_EQ(vals[0], 0.5);
      EXPECT_EQ(vals[1], 0.5);
    }
  }
}

TEST(Prolongation, P2ReproducesQuadratics)
{
  const auto coarse = square(3);
  const auto fine = std::make_shared<const Mesh2d>(refine(*coarse));
  const Space sc(coarse, Family::P2, 3), sf(fine, Family::P2, 3);
  const SparseMatrix p = build_prolongation(sc, sf);
  auto f = [](const Point& x, int c) { return c == 0 ? x.x() * x.x() : c == 1 ? x.x() * x.y() - 0.3 * x.y() : 1.0; };
  const Vector fine_vals = p * interpolate(sc, f);
  for (Index k = 0; k < sf.num_nodes(); ++k)
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(fine_vals[sf.dof(k, c)], f(sf.node_coord(k), c), 1e-14);

  for (Index i = 0; i < p.rows(); ++i) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(p, i); it; ++it) {
      EXPECT_EQ(it.col() % 3, i % 3);
      sum += it.value();
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
  }
}

TEST(Prolongation, PreservesNorms)
{
  const MeshHierarchy h = MeshHierarchy::uniform(3, 1);
  for (Family fam : {Family::P1, Family::P2}) {
    const Space sc(h.levels[0], fam, 3), sf(h.levels[1], fam, 3);
    const SparseMatrix p = build_prolongation(sc, sf);
    const Vector uc = interpolate(sc, [](const Point& x, int c) { return std::sin(3 * x.x() + c) * std::exp(x.y()); });
    const double nc = h1_norm(sc, uc), nf = h1_norm(sf, p * uc);
    EXPECT_NEAR(nf, nc, 1e-12 * nc);
  }
}

TEST(Prolongation, Mismatch)
{
  const MeshHierarchy h = MeshHierarchy::uniform(2, 1);
  EXPECT_THROW(build_prolongation(Space(h.levels[0], Family::P1, 1), Space(h.levels[1], Family::P2, 1)),
               std::invalid_argument);
  EXPECT_THROW(build_prolongation(Space(h.levels[0], Family::P1, 1), Space(h.levels[0], Family::P1, 1)),
               std::invalid_argument);
}

TEST(Inject, RestrictsNodalValues)
{
  const MeshHierarchy h = MeshHierarchy::uniform(2, 2);
  const Space sc(h.levels[0], Family::P2, 3), sf(h.levels[2], Family::P2, 3);
  auto f = [](const Point& x, int c) { return std::cos(x.x() + 2 * x.y() + c); };
  EXPECT_EQ(inject(sc, sf, interpolate(sf, f)), interpolate(sc, f));
}
