#pragma once

#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "binpat/word.hpp"

namespace binpat {

struct Cell {
  double width;
  double value;
};

struct Atom {
  double position;
  double mass;
};

/// A measure on [0,1] with piecewise-constant density plus optional point
/// atoms. Sublebesgue measures have values in [0,1] and no atoms; the
/// auxiliary probability measures of the feasibility solver may have values
/// above 1 and atoms.
class StepMeasure {
 public:
  StepMeasure() = default;

  /// Validates and canonicalizes (drops empty cells, merges adjacent cells
  /// whose values agree to 1e-12, sorts and merges atoms).
  StepMeasure(std::vector<Cell> cells, std::vector<Atom> atoms = {});

  /// Equal-width cells on [0,1] with the given values.
  static StepMeasure uniform_grid(std::span<const double> values);
  static StepMeasure constant(double value);

  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  bool has_atoms() const noexcept { return !atoms_.empty(); }

  /// True when every value lies in [0,1] and there are no atoms.
  bool is_sublebesgue() const noexcept;
  /// Throws InvalidArgument unless is_sublebesgue().
  void require_sublebesgue(const char* where) const;

  double total_mass() const noexcept;
  /// Density at x (right-continuous; the last cell owns x = 1).
  double value_at(double x) const noexcept;
  /// Interior cell boundaries and atom positions, sorted, including 0 and 1.
  std::vector<double> breakpoints() const;

  /// Density 1 - f reflected to x -> 1 - x. Sublebesgue only.
  StepMeasure complement_reflected() const;

 private:
  std::vector<Cell> cells_;
  std::vector<Atom> atoms_;
  std::vector<double> edges_;  // cumulative cell boundaries, edges_.front() == 0
};

/// F(x) = mu([0, x]), piecewise linear with jumps at atoms.
class DistributionFunction {
 public:
  explicit DistributionFunction(const StepMeasure& mu);

  double operator()(double x) const noexcept;
  /// Smallest x with F(x) >= y (generalized inverse); y is clamped to [0, F(1)].
  double inverse(double y) const noexcept;
  double total() const noexcept { return values_.back(); }
  /// Slope of F on the knot interval containing x.
  double slope_at(double x) const noexcept;

  /// Knots x_0 = 0 < ... < x_K = 1 with right-limit values F(x_k) and the
  /// slope on [x_k, x_{k+1}).
  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& slopes() const noexcept { return slopes_; }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> slopes_;

  std::size_t interval(double x) const noexcept;
};

StepMeasure measure_of_word(const BinaryWord& host);

/// d_W = integral over [0,1] of |F1 - F2|, exact for step measures.
double wasserstein(const StepMeasure& mu1, const StepMeasure& mu2);

/// Limiting pattern density k! * int_{x_1<...<x_k} prod g(x_i), evaluated
/// exactly for step densities. Rejects measures with atoms.
double density_of_measure(const BinaryWord& pattern, const StepMeasure& mu);

/// m_n = integral of x^n f(x) dx.
double moment(const StepMeasure& mu, int n);

struct MomentCheck {
  int n;
  double direct;
  double from_patterns;
  bool pass;
};

/// Compares m_n with (1/(n+1)) * sum over |w| = n of rho_{w1}(mu), n = 0..n_max.
std::vector<MomentCheck> moments_identity_check(const StepMeasure& mu, int n_max, double tol = 1e-9);

struct ConvergenceRow {
  std::size_t n;
  double wasserstein;
  std::vector<double> density_errors;  // |rho_w(X_n) - rho_w(mu)| per pattern
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  /// Both the distance and every density error end no higher than they
  /// started, with no step increasing by more than `tolerance`.
  bool jointly_decreasing = false;
};

ConvergenceReport word_convergence_check(std::span<const BinaryWord> hosts, const StepMeasure& mu,
                                         std::span<const BinaryWord> patterns, double tolerance = 1e-3);

/// Deterministic n-word whose distribution function tracks F: symbol i is
/// round(n F(i/n)) - round(n F((i-1)/n)).
BinaryWord round_word(const StepMeasure& mu, std::size_t n);

/// Symbol i drawn Bernoulli(f at the cell midpoint (i - 1/2)/n).
BinaryWord sample_word(const StepMeasure& mu, std::size_t n, std::mt19937_64& rng);

// -- serialization ----------------------------------------------------------

/// {"cells":[{"w":..,"v":..}], "atoms":[{"x":..,"m":..}]}
nlohmann::json to_json(const StepMeasure& mu);
StepMeasure measure_from_json(const nlohmann::json& j);

/// CSV with columns x,F,f on grid_n + 1 equally spaced points.
void write_curve_csv(std::ostream& out, const StepMeasure& mu, int grid_n);

}  // namespace binpat
