#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace nematic {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
/// Compressed-row sparse matrix.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Sums duplicate triplets into a compressed-row matrix with sorted columns.
/// Throws std::invalid_argument on an index outside the shape.
SparseMatrix assemble(const std::vector<Triplet>& triplets, Eigen::Index rows, Eigen::Index cols);

/// max |A_ij - A_ji|.
double asymmetry(const SparseMatrix& a);

/// Raised by a Cholesky factorization when a pivot is not positive.
class IndefiniteMatrixError : public std::runtime_error
{
public:
  IndefiniteMatrixError(Eigen::Index pivot, double value);
  Eigen::Index pivot() const { return pivot_; }
  double value() const { return value_; }

private:
  Eigen::Index pivot_;
  double value_;
};

enum class FactorKind { cholesky, lu };

/// Sparse direct factorization. Cholesky is an LDL^T with an AMD ordering
/// and a positivity check on D; LU is supernodal with a COLAMD ordering.
class DirectFactorization
{
public:
  DirectFactorization(const SparseMatrix& a, FactorKind kind);
  ~DirectFactorization();
  DirectFactorization(DirectFactorization&&) noexcept;
  DirectFactorization& operator=(DirectFactorization&&) noexcept;

  FactorKind kind() const { return kind_; }
  Eigen::Index size() const { return n_; }
  Vector solve(const Vector& b) const;

private:
  struct Impl;
  FactorKind kind_;
  Eigen::Index n_ = 0;
  std::unique_ptr<Impl> impl_;
};

inline DirectFactorization factor(const SparseMatrix& a, FactorKind kind) { return {a, kind}; }
inline Vector solve(const DirectFactorization& f, const Vector& b) { return f.solve(b); }

/// Cholesky when the matrix is SPD, LU otherwise.
DirectFactorization factor_spd_or_lu(const SparseMatrix& a);

} // namespace nematic
