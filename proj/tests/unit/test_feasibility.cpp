#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "binpat/error.hpp"
#include "binpat/feasibility.hpp"
#include "binpat/measures.hpp"
#include "binpat/verify/oracles.hpp"
#include "helpers.hpp"

using namespace binpat;

namespace {

BinaryWord W(const char* s) { return BinaryWord::parse(s); }
const double kE = std::numbers::e;

double scale(const BinaryWord& tau, double rho) {
  return std::pow(rho, static_cast<double>(tau.ones())) * std::pow(1.0 - rho, static_cast<double>(tau.zeros()));
}

// Analytic maximizers of the auxiliary problem, averaged over n equal cells.
StepMeasure analytic_g_1010(int n) { return verify::analytic_aux_1010(n); }

StepMeasure analytic_g_10101(int n) { return verify::analytic_aux_10101(n); }

StepMeasure analytic_g_11010(int n) {
  const double s3 = std::sqrt(3.0);
  const double b = std::exp(-5.0 * std::numbers::pi / (3.0 * s3));
  const auto g = [&](double a) { return std::pow(a, -2.5) * std::cos(std::numbers::pi / 3.0 + 0.5 * s3 * std::log(a)); };
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    vals[i] = x > b ? g(x) : 0.0;
  }
  return StepMeasure::uniform_grid(vals);
}

// Random sublebesgue density with rho_1 = rho: f^s of a random positive step
// function, with s chosen by bisection.
StepMeasure random_with_mass(std::mt19937_64& rng, double rho) {
  std::vector<double> base(12);
  for (auto& v : base) v = 0.02 + 0.96 * uniform01(rng);
  auto mass = [&](double s) {
    double m = 0.0;
    for (double v : base) m += std::pow(v, s);
    return m / static_cast<double>(base.size());
  };
  double lo = -30.0;
  double hi = 30.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass(std::exp(mid)) > rho) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double s = std::exp(0.5 * (lo + hi));
  for (auto& v : base) v = std::pow(v, s);
  return StepMeasure::uniform_grid(base);
}

}  // namespace

TEST_CASE("closed forms") {
  CHECK(*c_closed_form(W("10")) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(*c_closed_form(W("1100")) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(*c_closed_form(W("11000")) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(*c_closed_form(W("1010")) == doctest::Approx(1.624023).epsilon(1e-6));
  CHECK(*c_closed_form(W("0101")) == doctest::Approx(12.0 / (kE * kE)).epsilon(1e-15));
  CHECK(*c_closed_form(W("11010")) == doctest::Approx(30.0 * std::exp(-std::numbers::pi / std::sqrt(3.0))));
  CHECK(*c_closed_form(W("01101")) == doctest::Approx(20.0 / 9.0).epsilon(1e-15));
  CHECK(xi_root() == doctest::Approx(0.278465).epsilon(1e-6));
  CHECK(xi_root() * std::exp(xi_root()) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
  CHECK(*c_closed_form(W("10101")) == doctest::Approx(1.42326).epsilon(1e-5));
  // 1^k 0^l 1^m: 101 -> 3! * 1/4 = 1.5; 1001 -> 12 * 1/4 = 3
  CHECK(*c_closed_form(W("101")) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(*c_closed_form(W("1001")) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(*c_closed_form(W("0110")) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_FALSE(c_closed_form(W("100110")).has_value());
  CHECK_THROWS_AS(c_closed_form(W("111")), InvalidArgument);
}

TEST_CASE("closed forms are invariant under reversal and complement") {
  for (const char* s : {"10", "1100", "110", "1001", "11001", "1010", "11010", "10110", "10101"}) {
    const auto w = W(s);
    const double c = *c_closed_form(w);
    CHECK(*c_closed_form(w.reversed()) == doctest::Approx(c).epsilon(1e-15));
    CHECK(*c_closed_form(w.complement()) == doctest::Approx(c).epsilon(1e-15));
  }
}

TEST_CASE("aux functional maps to sublebesgue densities") {
  // 10110 with atoms at 1/3 and 1 gives 20/9
  const StepMeasure g({{1.0, 0.0}}, {{1.0 / 3.0, 0.5}, {1.0, 0.5}});
  CHECK(aux_functional(W("10110"), g) == doctest::Approx(20.0 / 9.0).epsilon(1e-13));
  // 1100 with all mass at 1 gives 6
  CHECK(aux_functional(W("1100"), StepMeasure({{1.0, 0.0}}, {{1.0, 1.0}})) == doctest::Approx(6.0));

  std::mt19937_64 rng(61);
  for (int t = 0; t < 20; ++t) {
    auto base = testing::random_step(rng, 6);
    std::vector<Cell> cells = base.cells();
    const double dens = base.total_mass();
    const double atom = 0.3 * uniform01(rng);
    for (auto& c : cells) c.value *= (1.0 - atom) / dens;
    const StepMeasure gt(cells, {{uniform01(rng), atom}});
    const auto tau = testing::random_word(rng, 2 + rng() % 4);
    if (tau.is_constant()) continue;
    const double rho = 0.1 + 0.8 * uniform01(rng);
    const auto f = sublebesgue_from_aux(gt, rho);
    CHECK(f.is_sublebesgue());
    CHECK(density_of_measure(W("1"), f) == doctest::Approx(rho).epsilon(1e-12));
    CHECK(density_of_measure(tau, f) == doctest::Approx(aux_functional(tau, gt) * scale(tau, rho)).epsilon(1e-11));
  }
}

TEST_CASE("c_numeric examples") {
  const auto r10 = c_numeric(W("10"), 1000);
  CHECK(r10.value == doctest::Approx(2.0).epsilon(5e-3));

  const auto r1100 = c_numeric(W("1100"), 500);
  CHECK(r1100.value == doctest::Approx(6.0).epsilon(5e-3));

  const auto r = c_numeric(W("1010"), 1000);
  CHECK(r.value == doctest::Approx(12.0 / (kE * kE)).epsilon(5e-3));
  const auto& g = r.argmax;
  CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  const DistributionFunction G(g);
  CHECK(G(1.0 / kE - 0.01) < 1e-3);
  REQUIRE_FALSE(g.atoms().empty());
  CHECK(g.atoms().back().position == 1.0);
  CHECK(g.atoms().back().mass == doctest::Approx(1.0 / kE).epsilon(0.02));
  // proportional to 1/x^2 on the support
  CHECK(g.value_at(0.5) * 0.25 == doctest::Approx(g.value_at(0.9) * 0.81).epsilon(0.02));

  CHECK_THROWS_AS(c_numeric(W("1111"), 100), InvalidArgument);
  CHECK_THROWS_AS(c_numeric(W("1010101"), 100), InvalidArgument);
  CHECK_THROWS_AS(c_numeric(W("10"), 49), InvalidArgument);
}

TEST_CASE("c_numeric reports non-convergence with the best value") {
  CNumericOptions opt;
  opt.max_iters = 5;
  opt.probe_iters = 5;
  try {
    c_numeric(W("1010"), 100, opt);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.best_value() > 0.0);
    CHECK(e.best_value() < 12.0 / (kE * kE) + 1e-9);
  }
}

TEST_CASE("c_numeric is nondecreasing along dyadic refinement") {
  for (const char* s : {"1010", "10101", "10110"}) {
    double prev = 0.0;
    for (int n : {50, 100, 200, 400, 800}) {
      const double v = c_numeric(W(s), n).value;
      INFO(s << " grid " << n);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("maximal density scales as rho^m (1-rho)^n") {
  for (const char* s : {"1010", "10110"}) {
    const auto tau = W(s);
    const auto g = c_numeric(tau, 400).argmax;
    std::vector<double> ratios;
    for (double rho : {0.2, 0.35, 0.5, 0.65, 0.8}) {
      ratios.push_back(density_of_measure(tau, sublebesgue_from_aux(g, rho)) / scale(tau, rho));
    }
    for (double r : ratios) CHECK(r == doctest::Approx(ratios.front()).epsilon(1e-2));
  }
}

TEST_CASE("closed-form bound dominates random densities") {
  std::mt19937_64 rng(67);
  const char* family[] = {"10", "01", "1100", "110", "1001", "0110", "11001", "1010", "0101", "11010", "10110", "10101"};
  for (const char* s : family) {
    const auto tau = W(s);
    const double c = *c_closed_form(tau);
    for (int i = 1; i <= 20; ++i) {
      const double rho = i / 21.0;
      double worst = -1.0;
      for (int t = 0; t < 500; ++t) {
        const auto f = random_with_mass(rng, rho);
        worst = std::max(worst, density_of_measure(tau, f) - c * scale(tau, rho));
      }
      INFO(s << " rho " << rho);
      CHECK(worst <= 1e-9);
    }
  }
}

TEST_CASE("extremal density for 1010") {
  const auto f = extremal_density_1010(0.5, 2000);
  CHECK(f.is_sublebesgue());
  CHECK(std::abs(density_of_measure(W("1"), f) - 0.5) < 1e-6);
  CHECK(std::abs(density_of_measure(W("1010"), f) - 3.0 / (4.0 * kE * kE)) < 1e-4);
  CHECK(3.0 / (4.0 * kE * kE) == doctest::Approx(0.101499).epsilon(1e-5));
  CHECK(extremal_1010_value(0.5, 0.18) == 1.0);
  CHECK(extremal_1010_value(0.5, 0.19) < 1.0);
  CHECK(1.0 / (2.0 * kE) == doctest::Approx(0.18394).epsilon(1e-4));
  CHECK(f.value_at(0.1) == doctest::Approx(1.0).epsilon(1e-12));

  for (double rho : {0.25, 0.7}) {
    const auto fr = extremal_density_1010(rho, 2000);
    CHECK(std::abs(density_of_measure(W("1"), fr) - rho) < 1e-6);
    CHECK(std::abs(density_of_measure(W("1010"), fr) - 12.0 / (kE * kE) * scale(W("1010"), rho)) < 1e-4);
  }
  CHECK(density_of_measure(W("1010"), extremal_density_1010(1e-4, 2000)) < 1e-7);

  // beats new deck order 1^13 0^13 1^13 0^13
  const auto deck = measure_of_word(W("1010").stretched(13));
  CHECK(density_of_measure(W("1010"), f) > density_of_measure(W("1010"), deck));

  CHECK_THROWS_AS(extremal_density_1010(0.0), InvalidArgument);
  CHECK_THROWS_AS(extremal_density_1010(1.0), InvalidArgument);
}

TEST_CASE("feasible intervals") {
  for (double d : {0.0, 0.2, 0.5, 1.0}) {
    const auto iv = feasible_interval(W("10"), d);
    CHECK(iv.upper == doctest::Approx(2 * d * (1 - d)).epsilon(1e-15));
    CHECK(iv.closed_form);
    CHECK(iv.ones == 1);
    CHECK(iv.zeros == 1);
  }
  CHECK(feasible_interval(W("10"), 0.0).upper == 0.0);
  CHECK(feasible_interval(W("1010"), 1.0).upper == 0.0);
  CHECK(feasible_interval(W("1010"), 0.5).upper == doctest::Approx(3.0 / (4.0 * kE * kE)).epsilon(1e-14));
  const auto numeric = feasible_interval(W("100110"), 0.5, 200);
  CHECK_FALSE(numeric.closed_form);
  CHECK(numeric.upper == doctest::Approx(numeric.c_value / 64.0).epsilon(1e-14));
  CHECK_THROWS_AS(feasible_interval(W("0000"), 0.5), InvalidArgument);

  std::ostringstream os;
  write_boundary_csv(os, W("10"), 2.0, 4);
  CHECK(os.str() == "rho,upper\n0,0\n0.25,0.375\n0.5,0.5\n0.75,0.375\n1,0\n");
}

TEST_CASE("Euler-Lagrange residuals") {
  CHECK(euler_lagrange_residual(W("1010"), analytic_g_1010(2000)) < 1e-3);
  CHECK(euler_lagrange_residual(W("10101"), analytic_g_10101(2000)) < 1e-3);
  const double r11010 = euler_lagrange_residual(W("11010"), analytic_g_11010(4000));
  CHECK(r11010 < 1e-3);
  CHECK(euler_lagrange_residual(W("10110"), StepMeasure({{1.0, 0.0}}, {{1.0 / 3.0, 0.5}, {1.0, 0.5}})) == 0.0);
  CHECK(euler_lagrange_residual(W("1010"), StepMeasure::constant(1.0)) > 0.05);
  CHECK_THROWS_AS(euler_lagrange_residual(W("1100"), StepMeasure::constant(1.0)), InvalidArgument);
}

TEST_CASE("numeric argmax of 10110 is atomic") {
  const auto r = c_numeric(W("10110"), 400);
  CHECK(r.value == doctest::Approx(20.0 / 9.0).epsilon(5e-3));
  CHECK(euler_lagrange_residual(W("10110"), r.argmax) < 0.02);
  bool interior = false;
  for (const auto& a : r.argmax.atoms()) {
    if (std::abs(a.position - 1.0 / 3.0) < 5e-3) interior = true;
  }
  CHECK(interior);
}
