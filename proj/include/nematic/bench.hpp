#pragma once

#include "nematic/forms.hpp"
#include "nematic/saddle.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nematic {

/// Periodic twist in the unit square: n = (cos t, 0, sin t) with
/// t = theta0 (2y - 1), Dirichlet on y = 0 and y = 1, periodic in x.
namespace twist {
inline constexpr double theta0 = 0.39269908169872414; // pi / 8
BoundarySetup boundary();
ExactField exact();
/// Exact energy 2 K2 theta0^2.
double reference_energy(double k2);
/// n0 = (1, 0, 0).
ComponentFunction initial_guess();
} // namespace twist

struct BenchRow
{
  std::string experiment;
  int ref = 0;
  Index dofs = 0;
  double gamma = 0.0;
  std::string param;
  int nonlinear_iters = 0;
  double avg_fgmres = 0.0;
  double energy = 0.0;
  double constraint_norm = 0.0;
  std::optional<double> l2_error;
  std::optional<double> h1_error;
  bool converged = false;
  /// Linear solves that hit the iteration cap (the ">100" entries).
  int failed_linear = 0;
};

std::string csv_header();
std::string to_csv(const BenchRow& row);
void write_csv(std::ostream& os, const std::vector<BenchRow>& rows);
/// Two whitespace-separated columns per row: the experiment's natural
/// abscissa (gamma, parameter value or h) and its main quantity. Spectra
/// rows are skipped.
void write_gnuplot(std::ostream& os, const std::vector<BenchRow>& rows);

struct BenchConfig
{
  std::vector<int> refs{1, 2};
  std::vector<double> gammas{1e3, 1e4, 1e5, 1e6};
  SolverConfig solver;
  ProblemParams params;
  Family element = Family::P2;
  int coarse_n = 10;
  /// Continuation step and end value.
  double step = 0.5;
  double sweep_end = 8.0;
};

std::vector<BenchRow> run_twist(const BenchConfig& cfg);

enum class SweepParameter { k2, q0 };
/// Warm-started sweep at refs.front() and gammas.front(); a failed value
/// restarts the next one from the last converged state.
std::vector<BenchRow> run_continuation(const BenchConfig& cfg, SweepParameter which);

struct ConstraintStudy
{
  std::vector<BenchRow> rows;
  double slope = 0.0;   ///< least-squares slope of log constraint vs log gamma, gamma >= 100
  /// Every gamma landed on the constant solution (energy below 1e-10) or
  /// has a constraint defect below 1e-12.
  bool degenerate = false;
};
/// P1-P1, Dirichlet (0,0,1) on the whole boundary, initial guess (0,0,0.8),
/// equal constants, at refs.front(); gamma = 0 is always included.
ConstraintStudy run_constraint_study(const BenchConfig& cfg);

struct ConvergenceStudy
{
  std::vector<BenchRow> rows;
  std::vector<double> l2_slopes; ///< one per gamma
  std::vector<double> h1_slopes;
};
ConvergenceStudy run_convergence(const BenchConfig& cfg);

struct SpectraRow
{
  int ref = 0;
  double gamma = 0.0;
  PatchKind kind = PatchKind::star;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int overlap = 0;
};
/// D^{-1} A_gamma at the interpolated exact twist state for every ref,
/// gamma and both patch kinds.
std::vector<SpectraRow> run_spectra(const BenchConfig& cfg);
std::vector<BenchRow> spectra_rows(const std::vector<SpectraRow>& rows, const BenchConfig& cfg);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);
double mesh_size(const BenchConfig& cfg, int ref);

} // namespace nematic
