#pragma once

#include <map>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "binpat/measures.hpp"
#include "binpat/word.hpp"

namespace binpat {

/// p(y) = a_0 + a_1 y + ... + a_k y^k with a_0 < 0. The limit shape has
/// H'(y) = 1 / (1 - e^{p(y)}) on [0, rho_1], where H inverts F.
struct ExpPolynomial {
  std::vector<double> coeffs;

  double operator()(double y) const noexcept;
  std::size_t degree() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

/// Target densities rho_1 and rho_{1^i 0} for selected i >= 1. Densities
/// that are not listed are free (their coefficient is held at zero).
struct DensityTargets {
  double rho1 = 0.5;
  std::map<int, double> ones_then_zero;

  /// "rho1=0.5,rho110=0.3333"; rho0 may replace rho1 as 1 - rho1.
  static DensityTargets parse(std::string_view text);
};

struct LimitShapeOptions {
  /// Relative tolerance of every quadrature.
  double quad_rel_tol = 1e-13;
  /// Newton stops once the max target residual is below this.
  double newton_tol = 1e-12;
  /// Looser tolerance for intermediate homotopy stages.
  double stage_tol = 1e-8;
  int max_newton = 60;
  int max_halvings = 30;
  double min_homotopy_step = 1e-8;
  double coeff_cap = 1e6;
  /// 1 - e^{p} below this at y = rho_1 counts as reaching the boundary.
  double boundary_gap = 1e-13;
  /// Newton iterates must keep 1 - e^{p(rho_1)} above this; quadrature noise
  /// grows like eps / gap, so closer shapes are reported as boundary.
  double near_boundary_gap = 1e-10;
  /// Reconstruction grid: cells have y-width <= rho_1/grid and x-width <= 1/grid.
  int grid = 2000;
};

struct PhiResult {
  double rho1 = 0.0;
  /// densities[i] = rho_{1^i 0}; densities[0] = rho_0 = 1 - rho_1.
  std::vector<double> densities;
  /// 1 - e^{p(rho_1)}; small values mean the shape is close to the boundary.
  double boundary_gap = 0.0;
};

/// S(p) = -p log p - (1-p) log(1-p), with S(0) = S(1) = 0.
double shannon(double p) noexcept;

/// Sum over cells of width * S(value). Rejects atoms.
double entropy(const StepMeasure& mu);

/// rho_1 solving int_0^{rho_1} H' = 1 and rho_{1^i 0} = (i+1) int_0^{rho_1}
/// y^i (H'(y) - 1) dy. Throws InfeasibleExponent if a_0 >= 0 or the shape
/// is numerically on the boundary.
PhiResult phi_forward(const ExpPolynomial& p, const LimitShapeOptions& options = {});

/// d densities[i] / d a_j, (k+1) x (k+1), from the closed-form integrals.
Eigen::MatrixXd phi_jacobian(const ExpPolynomial& p, const LimitShapeOptions& options = {});

/// f = 1/H' o F on a grid adapted to the shape; each cell carries its exact
/// mass, so F is exact at cell boundaries.
StepMeasure reconstruct_density(const ExpPolynomial& p, const LimitShapeOptions& options = {});

/// int_0^1 S(f(x)) dx evaluated exactly in the y variable.
double shape_entropy(const ExpPolynomial& p, const LimitShapeOptions& options = {});

struct LimitShape {
  ExpPolynomial p;
  double rho1 = 0.0;
  std::vector<double> densities;
  StepMeasure f;
  double entropy = 0.0;
  int newton_iterations = 0;
  /// Max |target - density_of_measure(pattern, f)| over the constrained patterns.
  double reconstruction_residual = 0.0;
};

/// A {0,1}-valued step description of where the solver was heading when the
/// targets turned out to lie on (or numerically at) the feasibility boundary.
struct BoundaryShape {
  std::vector<Cell> steps;
  int zero_intervals = 0;
  ExpPolynomial last;
  /// Fraction of the homotopy from the i.i.d. start that was completed.
  double progress = 0.0;
};

class BoundaryReached : public std::runtime_error {
 public:
  BoundaryReached(const std::string& what, BoundaryShape shape)
      : std::runtime_error(what), shape_(std::move(shape)) {}
  const BoundaryShape& shape() const noexcept { return shape_; }

 private:
  BoundaryShape shape_;
};

/// Damped Newton with homotopy from the i.i.d. shape. Throws BoundaryReached
/// or ConvergenceError.
LimitShape solve_limit_shape(const DensityTargets& targets, const LimitShapeOptions& options = {});

/// Multipliers lambda_w of the tilted weight exp(n sum lambda_w rho_w) whose
/// entropy maximizer is the shape of p: lambda_1 = log(1 - e^{p(rho_1)}) - a_0
/// and lambda_{1^i 0} = a_i / (i+1) for the listed i.
std::vector<std::pair<BinaryWord, double>> lagrange_multipliers(const ExpPolynomial& p,
                                                               const std::vector<int>& indices,
                                                               const LimitShapeOptions& options = {});

/// "1^i 0" as a word.
BinaryWord ones_then_zero(int i);

}  // namespace binpat
