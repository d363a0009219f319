#include "nematic/bench.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace nematic {

namespace twist {

BoundarySetup boundary()
{
  BoundarySetup b;
  b.dirichlet_sides = boundary::bottom | boundary::top;
  b.periodic_x = true;
  b.value = [](const Point& p, int c) {
    const double t = theta0 * (2.0 * p.y() - 1.0);
    return c == 0 ? std::cos(t) : c == 1 ? 0.0 : std::sin(t);
  };
  return b;
}

ExactField exact()
{
  ExactField e;
  e.value = [](const Point& p) {
    const double t = theta0 * (2.0 * p.y() - 1.0);
    return Eigen::Vector3d(std::cos(t), 0.0, std::sin(t));
  };
  e.gradient = [](const Point& p) {
    const double t = theta0 * (2.0 * p.y() - 1.0);
    Gradient3 g = Gradient3::Zero();
    g(0, 1) = -2.0 * theta0 * std::sin(t);
    g(2, 1) = 2.0 * theta0 * std::cos(t);
    return g;
  };
  return e;
}

double reference_energy(double k2) { return 2.0 * k2 * theta0 * theta0; }

ComponentFunction initial_guess()
{
  return [](const Point&, int c) { return c == 0 ? 1.0 : 0.0; };
}

} // namespace twist

// ---------------------------------------------------------------------------

std::string csv_header()
{
  return "experiment,ref,dofs,gamma,param,nonlinear_iters,avg_fgmres,energy,constraint_norm,l2_error,h1_error,"
         "converged";
}

std::string to_csv(const BenchRow& r)
{
  std::ostringstream os;
  os << std::setprecision(10);
  os << r.experiment << ',' << r.ref << ',' << r.dofs << ',' << r.gamma << ',' << r.param << ','
     << r.nonlinear_iters << ',' << r.avg_fgmres << ',' << r.energy << ',' << r.constraint_norm << ',';
  if (r.l2_error) os << *r.l2_error;
  os << ',';
  if (r.h1_error) os << *r.h1_error;
  os << ',' << (r.converged ? "true" : "false");
  return os.str();
}

void write_csv(std::ostream& os, const std::vector<BenchRow>& rows)
{
  os << csv_header() << '\n';
  for (const auto& r : rows) os << to_csv(r) << '\n';
}

namespace {

double param_value(const std::string& param)
{
  const auto eq = param.find('=');
  return eq == std::string::npos ? 0.0 : std::stod(param.substr(eq + 1));
}

} // namespace

void write_gnuplot(std::ostream& os, const std::vector<BenchRow>& rows)
{
  os << std::setprecision(10);
  for (const auto& r : rows) {
    if (r.experiment == "twist")
      os << r.gamma << ' ' << r.avg_fgmres << '\n';
    else if (r.experiment == "continue-k2" || r.experiment == "continue-q0")
      os << param_value(r.param) << ' ' << r.avg_fgmres << '\n';
    else if (r.experiment == "constraint")
      os << r.gamma << ' ' << r.constraint_norm << '\n';
    else if (r.experiment == "convergence" && r.l2_error)
      os << param_value(r.param) << ' ' << *r.l2_error << '\n';
  }
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y)
{
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_slope: need two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double mesh_size(const BenchConfig& cfg, int ref) { return 1.0 / (cfg.coarse_n * std::pow(2.0, ref)); }

namespace {

void check_config(const BenchConfig& cfg)
{
  if (cfg.refs.empty()) throw std::invalid_argument("bench: no refinement levels given");
  if (cfg.gammas.empty()) throw std::invalid_argument("bench: no gamma values given");
  for (int r : cfg.refs)
    if (r < 0 || r > 6) throw std::invalid_argument("bench: refinement level must lie in [0, 6], got " + std::to_string(r));
  for (double g : cfg.gammas)
    if (!(g >= 0.0)) throw std::invalid_argument("bench: gamma must be non-negative");
  if (cfg.coarse_n < 1) throw std::invalid_argument("bench: coarse mesh size must be >= 1");
  validate_params(cfg.params);
}

BenchRow make_row(const std::string& experiment, int ref, const Discretization& d, double gamma,
                  const SolveReport& rep)
{
  BenchRow row;
  row.experiment = experiment;
  row.ref = ref;
  row.dofs = d.reported_dofs(d.finest());
  row.gamma = gamma;
  row.nonlinear_iters = rep.nonlinear_iterations;
  row.avg_fgmres = rep.avg_linear;
  row.energy = rep.energy;
  row.constraint_norm = rep.constraint_norm;
  row.converged = rep.converged;
  row.failed_linear = rep.failed_linear;
  return row;
}

std::string fmt(const std::string& key, double v)
{
  std::ostringstream os;
  os << key << '=' << v;
  return os.str();
}

} // namespace

std::vector<BenchRow> run_twist(const BenchConfig& cfg)
{
  check_config(cfg);
  std::vector<BenchRow> rows;
  for (int ref : cfg.refs) {
    const Discretization d(cfg.coarse_n, ref, cfg.element, twist::boundary());
    for (double gamma : cfg.gammas) {
      ProblemParams p = cfg.params;
      p.gamma = gamma;
      State s = initial_state(d, d.finest(), twist::initial_guess());
      const SolveReport rep = nonlinear_solve(d, p, cfg.solver, s);
      rows.push_back(make_row("twist", ref, d, gamma, rep));
    }
  }
  return rows;
}

std::vector<BenchRow> run_continuation(const BenchConfig& cfg, SweepParameter which)
{
  check_config(cfg);
  if (!(cfg.step > 0.0)) throw std::invalid_argument("continuation: step must be positive");
  const int ref = cfg.refs.front();
  const double gamma = cfg.gammas.front();
  const Discretization d(cfg.coarse_n, ref, cfg.element, twist::boundary());
  const bool k2 = which == SweepParameter::k2;
  const double start = k2 ? 0.2 : 0.0;
  const std::string name = k2 ? "continue-k2" : "continue-q0";

  std::vector<BenchRow> rows;
  State last = initial_state(d, d.finest(), twist::initial_guess());
  const int count = static_cast<int>(std::floor((cfg.sweep_end - start) / cfg.step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) {
    const double value = start + i * cfg.step;
    ProblemParams p = cfg.params;
    p.gamma = gamma;
    (k2 ? p.k2 : p.q0) = value;
    State s = last;
    const SolveReport rep = nonlinear_solve(d, p, cfg.solver, s);
    BenchRow row = make_row(name, ref, d, gamma, rep);
    row.param = fmt(k2 ? "k2" : "q0", value);
    rows.push_back(row);
    if (rep.converged) last = s;
  }
  return rows;
}

ConstraintStudy run_constraint_study(const BenchConfig& cfg)
{
  check_config(cfg);
  const int ref = cfg.refs.front();
  BoundarySetup bc;
  bc.dirichlet_sides = boundary::all;
  bc.value = [](const Point&, int c) { return c == 2 ? 1.0 : 0.0; };
  const Discretization d(cfg.coarse_n, ref, Family::P1, bc);
  const ComponentFunction guess = [](const Point&, int c) { return c == 2 ? 0.8 : 0.0; };

  std::vector<double> gammas{0.0};
  for (double g : cfg.gammas)
    if (g > 0.0) gammas.push_back(g);

  ConstraintStudy study;
  std::vector<double> lx, ly;
  bool all_tiny = true;
  for (double gamma : gammas) {
    ProblemParams p{1.0, 1.0, 1.0, 0.0, gamma};
    State s = initial_state(d, d.finest(), guess);
    const SolveReport rep = nonlinear_solve(d, p, cfg.solver, s);
    BenchRow row = make_row("constraint", ref, d, gamma, rep);
    row.param = "p1p1-dirichlet";
    study.rows.push_back(row);
    // Zero energy means the constant field g, which is exactly unit.
    if (rep.constraint_norm >= 1e-12 && rep.energy >= 1e-10) all_tiny = false;
    if (gamma >= 1e2 && rep.constraint_norm > 0.0) {
      lx.push_back(std::log(gamma));
      ly.push_back(std::log(rep.constraint_norm));
    }
  }
  study.degenerate = all_tiny;
  if (study.degenerate) {
    for (auto& r : study.rows) r.param = "degenerate";
  }
  else if (lx.size() >= 2) {
    study.slope = least_squares_slope(lx, ly);
  }
  return study;
}

ConvergenceStudy run_convergence(const BenchConfig& cfg)
{
  check_config(cfg);
  ConvergenceStudy study;
  const ExactField exact = twist::exact();
  std::vector<std::vector<double>> l2(cfg.gammas.size()), h1(cfg.gammas.size());
  std::vector<double> logh;
  for (int ref : cfg.refs) {
    const Discretization d(cfg.coarse_n, ref, cfg.element, twist::boundary());
    logh.push_back(std::log(mesh_size(cfg, ref)));
    for (std::size_t g = 0; g < cfg.gammas.size(); ++g) {
      ProblemParams p = cfg.params;
      p.gamma = cfg.gammas[g];
      State s = initial_state(d, d.finest(), twist::initial_guess());
      const SolveReport rep = nonlinear_solve(d, p, cfg.solver, s);
      const ErrorNorms e = error_norms(d.director(d.finest()), s.director, exact);
      BenchRow row = make_row("convergence", ref, d, p.gamma, rep);
      row.param = fmt("h", mesh_size(cfg, ref));
      row.l2_error = e.l2;
      row.h1_error = e.h1;
      study.rows.push_back(row);
      l2[g].push_back(std::log(e.l2));
      h1[g].push_back(std::log(e.h1));
    }
  }
  if (logh.size() >= 2)
    for (std::size_t g = 0; g < cfg.gammas.size(); ++g) {
      study.l2_slopes.push_back(least_squares_slope(logh, l2[g]));
      study.h1_slopes.push_back(least_squares_slope(logh, h1[g]));
    }
  return study;
}

std::vector<SpectraRow> run_spectra(const BenchConfig& cfg)
{
  check_config(cfg);
  std::vector<SpectraRow> out;
  const ExactField exact = twist::exact();
  for (int ref : cfg.refs) {
    const Discretization d(cfg.coarse_n, ref, cfg.element, twist::boundary());
    const Index l = d.finest();
    State s{interpolate(d.director(l), [&](const Point& p, int c) { return exact.value(p)[c]; }),
            Vector::Zero(d.multiplier(l).num_dofs())};
    for (double gamma : cfg.gammas) {
      ProblemParams p = cfg.params;
      p.gamma = gamma;
      const BlockSystem sys = assemble_block_system(d, l, s, p, OperatorMode::picard_aug);
      for (PatchKind kind : {PatchKind::star, PatchKind::point_block}) {
        PatchDecomposition patches = build_patches(d.director(l), d.update_bcs(l), kind);
        const int overlap = overlap_number(d.director(l), d.update_bcs(l), patches);
        const AdditiveSchwarz as(sys.a, std::move(patches));
        const SpectralEstimate est = estimate_spectrum(sys.a, as, d.update_bcs(l));
        out.push_back({ref, gamma, kind, est.lambda_min, est.lambda_max, overlap});
      }
    }
  }
  return out;
}

std::vector<BenchRow> spectra_rows(const std::vector<SpectraRow>& rows, const BenchConfig& cfg)
{
  std::vector<BenchRow> out;
  for (const auto& s : rows) {
    const Discretization d(cfg.coarse_n, s.ref, cfg.element, twist::boundary());
    BenchRow r;
    r.dofs = d.reported_dofs(d.finest());
    r.experiment = "spectra";
    r.ref = s.ref;
    r.gamma = s.gamma;
    std::ostringstream os;
    os << std::setprecision(8) << (s.kind == PatchKind::star ? "star" : "pbj") << ";lambda_min=" << s.lambda_min
       << ";lambda_max=" << s.lambda_max << ";N_O=" << s.overlap;
    r.param = os.str();
    r.converged = s.lambda_max <= s.overlap + 0.1;
    out.push_back(r);
  }
  return out;
}

} // namespace nematic
