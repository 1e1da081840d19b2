#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "binpat/deckopt.hpp"
#include "binpat/error.hpp"
#include "binpat/feasibility.hpp"
#include "binpat/heisenberg.hpp"
#include "binpat/limitshape.hpp"
#include "binpat/measures.hpp"
#include "binpat/patterns.hpp"
#include "binpat/sampler.hpp"

namespace py = pybind11;
using namespace binpat;

namespace {

// Words cross the boundary as "0101" strings, big integers as Python ints.
BinaryWord W(const std::string& s) { return BinaryWord::parse(s); }

py::int_ to_py(const BigInt& v) {
  return py::reinterpret_steal<py::int_>(PyLong_FromString(to_decimal(v).c_str(), nullptr, 10));
}

std::vector<BinaryWord> words(const std::vector<std::string>& v) {
  std::vector<BinaryWord> out;
  for (const auto& s : v) out.push_back(W(s));
  return out;
}

py::list matrix_rows(const UnitriangularMatrix& m) {
  py::list rows;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    py::list row;
    for (std::size_t j = 0; j < m.dim(); ++j) row.append(to_py(m(i, j)));
    rows.append(row);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "binary pattern densities";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<InfeasibleExponent>(m, "InfeasibleExponent", PyExc_ValueError);
  py::register_exception<BoundaryReached>(m, "BoundaryReached", PyExc_RuntimeError);

  // patterns
  m.def("count_pattern", [](const std::string& p, const std::string& x) { return to_py(count_pattern(W(p), W(x))); },
        py::arg("pattern"), py::arg("host"));
  m.def("density", [](const std::string& p, const std::string& x) { return density(W(p), W(x)); }, py::arg("pattern"),
        py::arg("host"));
  m.def(
      "count_all",
      [](const std::string& x, int max_len) {
        py::dict d;
        for (const auto& [w, c] : count_all(W(x), max_len)) d[py::str(w.str())] = to_py(c);
        return d;
      },
      py::arg("host"), py::arg("max_len"));
  m.def(
      "check_relations",
      [](const std::string& x) {
        py::list out;
        for (const auto& r : check_relations(W(x))) out.append(py::make_tuple(r.relation, to_py(r.lhs), to_py(r.rhs), r.pass));
        return out;
      },
      py::arg("host"));
  m.def(
      "block_counts_polynomial",
      [](const std::string& p, std::vector<double> blocks) { return block_counts_polynomial(W(p), {std::move(blocks)}); },
      py::arg("pattern"), py::arg("blocks"));
  m.def(
      "independence_rank",
      [](const std::vector<std::string>& ps, std::vector<double> blocks) {
        const auto w = words(ps);
        return independence_rank(w, {std::move(blocks)}).rank;
      },
      py::arg("patterns"), py::arg("blocks"));

  // measures
  py::class_<StepMeasure>(m, "StepMeasure")
      .def(py::init([](const std::vector<std::pair<double, double>>& cells,
                       const std::vector<std::pair<double, double>>& atoms) {
             std::vector<Cell> c;
             std::vector<Atom> a;
             for (const auto& [w, v] : cells) c.push_back({w, v});
             for (const auto& [x, mass] : atoms) a.push_back({x, mass});
             return StepMeasure(std::move(c), std::move(a));
           }),
           py::arg("cells"), py::arg("atoms") = std::vector<std::pair<double, double>>{})
      .def_static("uniform_grid", [](const std::vector<double>& v) { return StepMeasure::uniform_grid(v); })
      .def_static("constant", &StepMeasure::constant)
      .def_property_readonly("cells",
                             [](const StepMeasure& mu) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& c : mu.cells()) out.emplace_back(c.width, c.value);
                               return out;
                             })
      .def_property_readonly("atoms",
                             [](const StepMeasure& mu) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& a : mu.atoms()) out.emplace_back(a.position, a.mass);
                               return out;
                             })
      .def("total_mass", &StepMeasure::total_mass)
      .def("value_at", &StepMeasure::value_at)
      .def("distribution", [](const StepMeasure& mu, double x) { return DistributionFunction(mu)(x); });

  m.def("measure_of_word", [](const std::string& x) { return measure_of_word(W(x)); }, py::arg("host"));
  m.def("wasserstein", &wasserstein, py::arg("mu1"), py::arg("mu2"));
  m.def("density_of_measure", [](const std::string& p, const StepMeasure& mu) { return density_of_measure(W(p), mu); },
        py::arg("pattern"), py::arg("mu"));
  m.def("entropy", &entropy, py::arg("mu"));

  // feasibility
  m.def("c_closed_form", [](const std::string& tau) { return c_closed_form(W(tau)); }, py::arg("tau"));
  m.def(
      "c_numeric",
      [](const std::string& tau, int grid) {
        auto r = c_numeric(W(tau), grid);
        return py::make_tuple(r.value, r.argmax);
      },
      py::arg("tau"), py::arg("grid_n") = 1000);
  m.def(
      "feasible_interval",
      [](const std::string& tau, double rho1, int grid) {
        const auto iv = feasible_interval(W(tau), rho1, grid);
        return py::make_tuple(0.0, iv.upper);
      },
      py::arg("tau"), py::arg("rho1"), py::arg("grid_n") = 1000);
  m.def("extremal_density_1010", &extremal_density_1010, py::arg("rho1"), py::arg("grid_n") = 2000);

  // limit shapes
  m.def(
      "phi_forward",
      [](std::vector<double> coeffs) {
        const auto r = phi_forward(ExpPolynomial{std::move(coeffs)});
        return py::make_tuple(r.rho1, r.densities);
      },
      py::arg("coeffs"));
  m.def("phi_jacobian", [](std::vector<double> coeffs) { return phi_jacobian(ExpPolynomial{std::move(coeffs)}); },
        py::arg("coeffs"));
  m.def(
      "solve_limit_shape",
      [](const std::string& targets) {
        auto s = solve_limit_shape(DensityTargets::parse(targets));
        return py::make_tuple(s.p.coeffs, s.f, s.entropy);
      },
      py::arg("targets"));

  // heisenberg
  m.def(
      "matrix_of_word",
      [](const std::string& mask, const std::string& x) {
        return matrix_rows(matrix_of_word(GeneratorSpec::from_mask(W(mask)), W(x)));
      },
      py::arg("mask"), py::arg("host"));
  m.def(
      "min_minor",
      [](const std::string& mask, const std::string& x, std::size_t order) {
        return to_py(min_minor(matrix_of_word(GeneratorSpec::from_mask(W(mask)), W(x)), order).value);
      },
      py::arg("mask"), py::arg("host"), py::arg("order"));

  // sampler
  m.def(
      "mcmc_sample",
      [](std::size_t n, const std::vector<std::string>& patterns, std::vector<double> multipliers, std::uint64_t seed,
         std::size_t sweeps) {
        GibbsSpec spec;
        spec.n = n;
        spec.patterns = words(patterns);
        spec.multipliers = std::move(multipliers);
        spec.seed = seed;
        spec.sweeps = sweeps;
        SampleResult r;
        {
          py::gil_scoped_release release;
          r = mcmc_sample(spec);
        }
        return py::make_tuple(r.final_word.str(), r.stats.mean_densities, r.stats.acceptance_rate);
      },
      py::arg("n"), py::arg("patterns"), py::arg("multipliers"), py::arg("seed") = 1, py::arg("sweeps") = 1000);
  m.def(
      "calibrate_multipliers",
      [](const std::vector<std::pair<std::string, double>>& targets, std::size_t n, std::uint64_t seed) {
        std::vector<std::pair<BinaryWord, double>> t;
        for (const auto& [w, v] : targets) t.emplace_back(W(w), v);
        CalibrationOptions opt;
        opt.seed = seed;
        py::gil_scoped_release release;
        return calibrate_multipliers(t, n, opt).multipliers;
      },
      py::arg("targets"), py::arg("n"), py::arg("seed") = 1);

  // decks
  m.def(
      "optimize_deck",
      [](std::size_t n, std::size_t ones, const std::string& pattern, const std::string& mode, std::uint64_t seed,
         std::size_t restarts, std::uint64_t steps) {
        DeckProblem prob;
        prob.n = n;
        prob.ones = ones;
        prob.pattern = W(pattern);
        prob.mode = parse_deck_mode(mode);
        AnnealOptions opt;
        opt.restarts = restarts;
        opt.steps = steps;
        DeckResult r;
        {
          py::gil_scoped_release release;
          r = optimize_deck(prob, seed, opt);
        }
        return py::make_tuple(r.best.str(), to_py(r.exact_count), r.density);
      },
      py::arg("n") = 52, py::arg("ones") = 26, py::arg("pattern") = "1010", py::arg("mode") = "anneal",
      py::arg("seed") = 1, py::arg("restarts") = 20, py::arg("steps") = 1000000);
}
