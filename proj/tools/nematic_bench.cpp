// Benchmark driver for the augmented-Lagrangian Oseen-Frank solver.
#include "nematic/bench.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace nematic;

namespace {

struct Options
{
  std::vector<int> refs;
  std::vector<double> gammas;
  std::string inner = "lu";
  std::string linearization = "picard";
  std::string element = "p2p1";
  double k1 = 1.0, k2 = 1.2, k3 = 1.0, q0 = 0.0;
  double atol = 1e-8, rtol = 1e-4;
  double step = 0.5;
  int coarse = 10;
  std::string out;
  std::string gnuplot;
  bool deterministic = false;
};

void add_common(CLI::App* cmd, Options& o)
{
  cmd->add_option("--refs", o.refs, "Refinement levels of the 10x10 coarse mesh")->delimiter(',');
  cmd->add_option("--gamma", o.gammas, "Augmentation parameter (repeatable)")->delimiter(',');
  cmd->add_option("--inner", o.inner, "Inner solver for the director block")
    ->check(CLI::IsMember({"lu", "mg-star", "mg-pbj"}));
  cmd->add_option("--linearization", o.linearization)->check(CLI::IsMember({"newton", "picard"}));
  cmd->add_option("--element", o.element)->check(CLI::IsMember({"p1p1", "p2p1"}));
  cmd->add_option("--k1", o.k1);
  cmd->add_option("--k2", o.k2);
  cmd->add_option("--k3", o.k3);
  cmd->add_option("--q0", o.q0);
  cmd->add_option("--atol", o.atol, "Absolute nonlinear tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--rtol", o.rtol, "Relative FGMRES tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--step", o.step, "Continuation step")->check(CLI::PositiveNumber);
  cmd->add_option("--coarse", o.coarse, "Coarse mesh subdivisions")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "CSV output path (stdout if empty)");
  cmd->add_option("--gnuplot", o.gnuplot, "Two-column data output path");
  cmd->add_flag("--deterministic", o.deterministic, "Sequential reproducible mode (always on)");
}

BenchConfig to_config(const Options& o, const std::vector<int>& default_refs, const std::vector<double>& default_gammas)
{
  BenchConfig c;
  c.refs = o.refs.empty() ? default_refs : o.refs;
  c.gammas = o.gammas.empty() ? default_gammas : o.gammas;
  c.solver.inner = o.inner == "lu" ? InnerSolver::lu : o.inner == "mg-star" ? InnerSolver::mg_star : InnerSolver::mg_pbj;
  c.solver.linearization = o.linearization == "newton" ? Linearization::newton : Linearization::picard;
  c.solver.atol = o.atol;
  c.solver.rtol = o.rtol;
  c.element = o.element == "p1p1" ? Family::P1 : Family::P2;
  c.params = ProblemParams{o.k1, o.k2, o.k3, o.q0, 0.0};
  c.step = o.step;
  c.coarse_n = o.coarse;
  return c;
}

void emit(const Options& o, const std::vector<BenchRow>& rows)
{
  if (o.out.empty()) {
    write_csv(std::cout, rows);
  }
  else {
    std::ofstream f(o.out);
    if (!f) throw std::runtime_error("cannot open " + o.out);
    write_csv(f, rows);
  }
  if (!o.gnuplot.empty()) {
    std::ofstream g(o.gnuplot);
    if (!g) throw std::runtime_error("cannot open " + o.gnuplot);
    write_gnuplot(g, rows);
  }
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Oseen-Frank augmented Lagrangian benchmark harness"};
  app.set_config("--config", "", "File of key=value lines; command-line flags take precedence");
  app.require_subcommand(1);

  Options o;
  add_common(&app, o);
  app.fallthrough();
  const std::vector<std::pair<std::string, std::string>> commands{
    {"twist", "Periodic twist iteration counts (Tables 1-5 style)"},
    {"continue-k2", "Continuation in K2"},
    {"continue-q0", "Continuation in q0"},
    {"constraint", "Constraint defect versus gamma"},
    {"convergence", "Error convergence against the exact twist"},
    {"spectra", "Extreme eigenvalues of the patch-preconditioned director block"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [name, help] : commands) {
      if (!app.got_subcommand(name)) continue;
      for (const auto& w : validate_params(ProblemParams{o.k1, o.k2, o.k3, o.q0, 0.0})) std::cerr << "warning: " << w << '\n';

      if (name == "twist") {
        emit(o, run_twist(to_config(o, {1, 2}, {1e3, 1e4, 1e5, 1e6})));
      }
      else if (name == "continue-k2" || name == "continue-q0") {
        const BenchConfig c = to_config(o, {2}, {1e6});
        emit(o, run_continuation(c, name == "continue-k2" ? SweepParameter::k2 : SweepParameter::q0));
      }
      else if (name == "constraint") {
        BenchConfig c = to_config(o, {1}, {1e2, 1e3, 1e4, 1e5, 1e6});
        const ConstraintStudy s = run_constraint_study(c);
        emit(o, s.rows);
        if (s.degenerate)
          std::cerr << "constraint study: degenerate (every gamma converged to the constant unit solution)\n";
        else
          std::cerr << "constraint study: slope " << s.slope << '\n';
      }
      else if (name == "convergence") {
        Options tight = o;
        if (app.count("--atol") == 0) tight.atol = 1e-10;
        if (app.count("--inner") == 0) tight.inner = "mg-pbj";
        const ConvergenceStudy s = run_convergence(to_config(tight, {1, 2, 3}, {1e4, 1e5, 1e6}));
        emit(o, s.rows);
        for (std::size_t g = 0; g < s.l2_slopes.size(); ++g)
          std::cerr << "slopes: L2 " << s.l2_slopes[g] << ", H1 " << s.h1_slopes[g] << '\n';
      }
      else {
        const BenchConfig c = to_config(o, {1, 2}, {0.0, 1e6});
        emit(o, spectra_rows(run_spectra(c), c));
      }
    }
  }
  catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  }
  catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
