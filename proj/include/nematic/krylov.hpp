#pragma once

#include "nematic/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace nematic {

struct KrylovOptions
{
  double rtol = 1e-4;
  int max_iterations = 100;
};

struct KrylovReport
{
  int iterations = 0;
  /// Residual norms ||b - A x_k|| tested against the stopping rule, x_0 first.
  std::vector<double> residuals;
  bool converged = false;
  bool breakdown = false;
};

class KrylovBreakdown : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Identity preconditioner.
struct IdentityPreconditioner
{
  void operator()(const Vector& r, Vector& z) const { z = r; }
};

namespace detail {

inline void apply_givens(double& a, double& b, double c, double s)
{
  const double t = c * a + s * b;
  b = -s * a + c * b;
  a = t;
}

/// Right-preconditioned Arnoldi. With `flexible` the preconditioned
/// directions z_j = M v_j are stored and the update is sum_j y_j z_j;
/// otherwise the update is M (sum_j y_j v_j).
template <class Operator, class Preconditioner>
KrylovReport arnoldi_solve(const Operator& apply_a, const Preconditioner& apply_m, const Vector& b, Vector& x,
                           const KrylovOptions& opts, bool flexible, bool use_tolerance)
{
  const Eigen::Index n = b.size();
  if (x.size() != n) x = Vector::Zero(n);
  KrylovReport report;

  const double bnorm = b.norm();
  Vector r(n);
  apply_a(x, r);
  r = b - r;
  double beta = r.norm();
  report.residuals.push_back(beta);
  const double target = opts.rtol * bnorm;
  if (beta == 0.0 || (use_tolerance && beta <= target)) {
    report.converged = true;
    return report;
  }

  const int m = opts.max_iterations;
  std::vector<Vector> v;
  std::vector<Vector> z;
  v.reserve(static_cast<std::size_t>(m) + 1);
  if (flexible) z.reserve(static_cast<std::size_t>(m));
  DenseMatrix h = DenseMatrix::Zero(m + 1, m);
  Vector cs = Vector::Zero(m), sn = Vector::Zero(m), g = Vector::Zero(m + 1);
  g[0] = beta;
  v.emplace_back(r / beta);

  Vector w(n), zj(n);
  int k = 0;
  bool done = false;
  while (k < m && !done) {
    apply_m(v[static_cast<std::size_t>(k)], zj);
    apply_a(zj, w);
    if (flexible) z.push_back(zj);

    // Modified Gram-Schmidt.
    for (int i = 0; i <= k; ++i) {
      h(i, k) = w.dot(v[static_cast<std::size_t>(i)]);
      w -= h(i, k) * v[static_cast<std::size_t>(i)];
    }
    const double hnext = w.norm();
    h(k + 1, k) = hnext;
    const bool lucky = !(hnext > 1e-14 * beta);

    for (int i = 0; i < k; ++i) apply_givens(h(i, k), h(i + 1, k), cs[i], sn[i]);
    const double denom = std::hypot(h(k, k), h(k + 1, k));
    if (denom == 0.0) {
      report.breakdown = true;
      break;
    }
    cs[k] = h(k, k) / denom;
    sn[k] = h(k + 1, k) / denom;
    h(k, k) = denom;
    h(k + 1, k) = 0.0;
    g[k + 1] = -sn[k] * g[k];
    g[k] = cs[k] * g[k];
    ++k;

    const double res = std::abs(g[k]);
    report.residuals.push_back(res);
    if (use_tolerance && res <= target) {
      report.converged = true;
      done = true;
    }
    if (lucky && !done) {
      report.breakdown = true;
      done = true;
    }
    if (!done) v.emplace_back(w / hnext);
  }

  // Solve the triangular least-squares system and form the update.
  if (k > 0) {
    Vector y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    if (flexible) {
      for (int i = 0; i < k; ++i) x += y[i] * z[static_cast<std::size_t>(i)];
    }
    else {
      Vector combo = Vector::Zero(n);
      for (int i = 0; i < k; ++i) combo += y[i] * v[static_cast<std::size_t>(i)];
      apply_m(combo, zj);
      x += zj;
    }
  }
  report.iterations = k;

  if (report.breakdown && !report.converged && use_tolerance) {
    Vector ax(n);
    apply_a(x, ax);
    const double true_res = (b - ax).norm();
    if (true_res <= target) {
      report.converged = true;
      report.residuals.back() = true_res;
    }
    else {
      throw KrylovBreakdown("gmres: Arnoldi breakdown with residual " + std::to_string(true_res) + " above target " +
                            std::to_string(target));
    }
  }
  return report;
}

} // namespace detail

/// Full (unrestarted) right-preconditioned GMRES. Converged iff
/// ||b - A x|| <= rtol ||b|| within max_iterations. `x` holds the initial
/// guess on entry (resized to zero if empty).
template <class Operator, class Preconditioner = IdentityPreconditioner>
KrylovReport gmres(const Operator& a, const Vector& b, Vector& x, const KrylovOptions& opts,
                   const Preconditioner& m = {})
{
  return detail::arnoldi_solve(a, m, b, x, opts, false, true);
}

/// Flexible GMRES: the preconditioner may change from one application to the next.
template <class Operator, class Preconditioner = IdentityPreconditioner>
KrylovReport fgmres(const Operator& a, const Vector& b, Vector& x, const KrylovOptions& opts,
                    const Preconditioner& m = {})
{
  return detail::arnoldi_solve(a, m, b, x, opts, true, true);
}

/// Exactly `steps` right-preconditioned GMRES iterations (fewer on breakdown),
/// no tolerance test. Used as a multigrid smoother.
template <class Operator, class Preconditioner>
KrylovReport gmres_fixed_steps(const Operator& a, const Vector& b, Vector& x, int steps, const Preconditioner& m)
{
  KrylovOptions opts{0.0, steps};
  return detail::arnoldi_solve(a, m, b, x, opts, false, false);
}

/// Adapts a sparse matrix to the operator signature.
struct MatrixOperator
{
  const SparseMatrix* a;
  void operator()(const Vector& x, Vector& y) const { y.noalias() = (*a) * x; }
};

} // namespace nematic
