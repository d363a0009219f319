#pragma once

#include "nematic/fespace.hpp"
#include "nematic/krylov.hpp"
#include "nematic/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <memory>
#include <optional>
#include <vector>

namespace nematic {

enum class PatchKind { star, point_block };

/// Dof index sets of one level, owners only; Dirichlet and ghost dofs never
/// appear and empty patches are dropped.
struct PatchDecomposition
{
  PatchKind kind = PatchKind::star;
  std::vector<std::vector<Index>> patches;
};

/// Star patches: the dofs whose basis support lies in the star of a vertex
/// (for P2 the vertex and the midpoints of its edges). A left-side vertex
/// also collects the star of its periodic partner. Point-block patches: the
/// colocated component dofs of each node.
PatchDecomposition build_patches(const Space& space, const Constraints& c, PatchKind kind);

/// Largest number of patches whose supports share a triangle with a given
/// patch (the patch itself included), by brute force.
int overlap_number(const Space& space, const Constraints& c, const PatchDecomposition& d);

/// D^{-1} = sum_i I_i A_i^{-1} I_i^T with dense patch factorizations.
class AdditiveSchwarz
{
public:
  AdditiveSchwarz(const SparseMatrix& a, PatchDecomposition patches);

  void operator()(const Vector& r, Vector& z) const;
  Vector apply(const Vector& r) const;

  const PatchDecomposition& patches() const { return patches_; }
  /// Patch blocks that were not positive definite and use LU instead.
  int lu_fallbacks() const { return lu_fallbacks_; }

private:
  struct Block
  {
    Eigen::LLT<DenseMatrix> llt;
    Eigen::PartialPivLU<DenseMatrix> lu;
    bool use_lu = false;
  };
  Index n_ = 0;
  PatchDecomposition patches_;
  std::vector<Block> blocks_;
  int lu_fallbacks_ = 0;
};

struct MgConfig
{
  PatchKind kind = PatchKind::star;
  int smoothing_steps = 3;
  bool pre_smooth = true;
  bool post_smooth = true;
};

/// One level of the director hierarchy, coarse level first.
struct MgLevelInput
{
  SparseMatrix a;          ///< constrained operator
  Constraints constraints; ///< homogeneous constraints of the level
  const Space* space = nullptr;
};

/// Geometric V-cycle for the augmented director block. The coarsest level
/// is solved directly; every finer level is relaxed by GMRES preconditioned
/// with additive Schwarz over the chosen patches.
class Multigrid
{
public:
  /// `prolongations[l]` maps level l to level l+1 on full-length layouts.
  Multigrid(std::vector<MgLevelInput> levels, std::vector<SparseMatrix> prolongations, const MgConfig& config);

  Vector vcycle(const Vector& b) const;
  void operator()(const Vector& r, Vector& z) const { z = vcycle(r); }

  /// Pre-relaxation on `level` with initial guess x.
  void relax(Index level, const Vector& b, Vector& x) const;

  Index num_levels() const { return static_cast<Index>(levels_.size()); }
  const SparseMatrix& op(Index level) const { return levels_[static_cast<std::size_t>(level)].a; }
  const AdditiveSchwarz& smoother(Index level) const;

  Vector restrict_residual(Index fine_level, const Vector& r) const;
  Vector prolong_correction(Index fine_level, const Vector& e) const;

private:
  Vector cycle(Index level, const Vector& b) const;

  struct Level
  {
    SparseMatrix a;
    Constraints constraints;
    std::optional<AdditiveSchwarz> smoother;
  };
  std::vector<Level> levels_;
  std::vector<SparseMatrix> prolongations_;
  std::vector<SparseMatrix> restrictions_;
  std::unique_ptr<DirectFactorization> coarse_;
  MgConfig config_;
};

struct SpectralEstimate
{
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int steps = 0;
};

/// Extreme eigenvalues of D^{-1} A by Lanczos in the A inner product with
/// full reorthogonalization. A must be positive definite on the free dofs;
/// the start vector is a fixed smooth vector with constrained entries zeroed.
SpectralEstimate estimate_spectrum(const SparseMatrix& a, const AdditiveSchwarz& d, const Constraints& c,
                                   int steps = 50);

} // namespace nematic
