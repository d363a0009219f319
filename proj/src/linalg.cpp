#include "nematic/linalg.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <variant>

namespace nematic {

SparseMatrix assemble(const std::vector<Triplet>& triplets, Eigen::Index rows, Eigen::Index cols)
{
  for (const auto& t : triplets) {
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols)
      throw std::invalid_argument("assemble: entry (" + std::to_string(t.row()) + "," + std::to_string(t.col()) +
                                  ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  SparseMatrix a(rows, cols);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

double asymmetry(const SparseMatrix& a)
{
  const SparseMatrix at = a.transpose();
  const SparseMatrix diff = a - at;
  double m = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

IndefiniteMatrixError::IndefiniteMatrixError(Eigen::Index pivot, double value)
  : std::runtime_error("cholesky: non-positive pivot " + std::to_string(value) + " at row " + std::to_string(pivot))
  , pivot_(pivot)
  , value_(value)
{
}

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct DirectFactorization::Impl
{
  std::variant<Eigen::SimplicialLDLT<ColMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>,
               Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>>
    solver;
};

DirectFactorization::DirectFactorization(const SparseMatrix& a, FactorKind kind)
  : kind_(kind)
  , n_(a.rows())
  , impl_(std::make_unique<Impl>())
{
  if (a.rows() != a.cols()) throw std::invalid_argument("factor: matrix is not square");
  const ColMatrix col = a;

  if (kind == FactorKind::cholesky) {
    double scale = 0.0;
    for (int k = 0; k < col.outerSize(); ++k)
      for (ColMatrix::InnerIterator it(col, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    if (asymmetry(a) > 1e-12 * std::max(scale, 1.0))
      throw std::invalid_argument("cholesky: matrix is not symmetric");

    auto& ldlt = impl_->solver.emplace<0>();
    ldlt.compute(col);
    if (ldlt.info() != Eigen::Success) throw IndefiniteMatrixError(0, 0.0);
    const Vector& d = ldlt.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (!(d[i] > 0.0)) {
        // D is in the permuted ordering; report the original row.
        const Eigen::Index original = ldlt.permutationPinv().indices()[i];
        throw IndefiniteMatrixError(original, d[i]);
      }
    }
  }
  else {
    auto& lu = impl_->solver.emplace<1>();
    lu.analyzePattern(col);
    lu.factorize(col);
    if (lu.info() != Eigen::Success) throw std::runtime_error("lu: factorization failed: " + lu.lastErrorMessage());
  }
}

DirectFactorization::~DirectFactorization() = default;
DirectFactorization::DirectFactorization(DirectFactorization&&) noexcept = default;
DirectFactorization& DirectFactorization::operator=(DirectFactorization&&) noexcept = default;

Vector DirectFactorization::solve(const Vector& b) const
{
  if (b.size() != n_) throw std::invalid_argument("solve: rhs size mismatch");
  return std::visit([&](const auto& s) -> Vector { return s.solve(b); }, impl_->solver);
}

DirectFactorization factor_spd_or_lu(const SparseMatrix& a)
{
  try {
    return DirectFactorization(a, FactorKind::cholesky);
  }
  catch (const IndefiniteMatrixError&) {
  }
  catch (const std::invalid_argument&) {
  }
  return DirectFactorization(a, FactorKind::lu);
}

} // namespace nematic
