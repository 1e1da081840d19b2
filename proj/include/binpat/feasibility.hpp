#pragma once

#include <iosfwd>
#include <optional>

#include "binpat/measures.hpp"
#include "binpat/word.hpp"

namespace binpat {

/// E_{1,tau} at a fixed rho_1: rho_tau ranges over [0, upper].
struct FeasibilityInterval {
  BinaryWord tau;
  double rho1 = 0.0;
  double upper = 0.0;
  double c_value = 0.0;
  std::size_t ones = 0;
  std::size_t zeros = 0;
  bool closed_form = false;
};

/// Root of xi * e^xi = 1/e on [0.1, 0.5], by bisection to 1e-14.
double xi_root();

/// Closed-form C_tau for the tabulated families (up to reversal and
/// complement); std::nullopt otherwise. Throws for constant tau.
std::optional<double> c_closed_form(const BinaryWord& tau);

struct CNumericOptions {
  int max_iters = 50000;
  /// Converged once the relative gain stays below this for `stall_iters`
  /// consecutive iterations.
  double rel_tol = 1e-10;
  int stall_iters = 50;
  /// A cell whose density exceeds this after the first pass is treated as a
  /// smeared interior atom and refined by golden-section search.
  double atom_density_threshold = 10.0;
  /// Ascent budget before looking for a smeared interior atom.
  int probe_iters = 2000;
  int golden_iters = 30;
  /// Ascent budget per trial atom position during the golden-section search.
  int golden_inner_iters = 400;
};

struct CNumericResult {
  double value = 0.0;
  /// The maximizing probability measure g (cells plus atoms at 0, 1 and at
  /// most one interior point).
  StepMeasure argmax;
  int iterations = 0;
};

/// Maximizes k! * I_tau(g) over probability measures g on [0,1] discretized
/// on grid_n cells plus atoms. Throws ConvergenceError with the best value if
/// the iteration budget runs out.
CNumericResult c_numeric(const BinaryWord& tau, int grid_n, const CNumericOptions& options = {});

/// k! * I_tau(g): 1-letters integrate Lebesgue measure, 0-letters integrate g,
/// over ordered positions. For a maximizing g this is C_tau.
double aux_functional(const BinaryWord& tau, const StepMeasure& g);

/// The sublebesgue measure f with rho_1(f) = rho whose rescaled inverse
/// distribution function has excess derivative g. Satisfies
/// rho_tau(f) = aux_functional(tau, g) * rho^m (1-rho)^n.
StepMeasure sublebesgue_from_aux(const StepMeasure& g, double rho);

/// Closed-form rho_1010 maximizer at fixed rho_1, evaluated pointwise.
double extremal_1010_value(double rho1, double x);

/// The maximizer averaged exactly over grid_n equal cells.
StepMeasure extremal_density_1010(double rho1, int grid_n = 2000);

/// Uses the closed form when available, otherwise c_numeric at grid_n.
FeasibilityInterval feasible_interval(const BinaryWord& tau, double rho1, int grid_n = 1000);

/// Writes rho,upper for rho on an equally spaced grid of `points` + 1 values.
void write_boundary_csv(std::ostream& out, const BinaryWord& tau, double c_value, int points);

/// Maximum violation of the stationarity condition for g, for tau in
/// {1010, 11010, 10110, 10101}. For 10110 the optimizer is atomic and the
/// residual is the mass carried by the density part.
double euler_lagrange_residual(const BinaryWord& tau, const StepMeasure& g);

}  // namespace binpat
