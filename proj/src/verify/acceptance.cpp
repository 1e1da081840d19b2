#include "binpat/verify/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "binpat/deckopt.hpp"
#include "binpat/feasibility.hpp"
#include "binpat/heisenberg.hpp"
#include "binpat/limitshape.hpp"
#include "binpat/measures.hpp"
#include "binpat/patterns.hpp"
#include "binpat/random.hpp"
#include "binpat/sampler.hpp"
#include "binpat/verify/oracles.hpp"

namespace binpat::verify {

namespace {

BinaryWord W(const char* s) { return BinaryWord::parse(s); }

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

BinaryWord random_word(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  return BinaryWord(std::move(bits));
}

BinaryWord mask_word(std::size_t len, unsigned bits) {
  BinaryWord m;
  for (std::size_t i = 0; i < len; ++i) m.push_back(static_cast<std::uint8_t>((bits >> i) & 1u));
  return m;
}

// -- 1 ------------------------------------------------------------------------

CriterionResult counting_oracle(std::uint64_t) {
  CriterionResult r{1, "counting oracle equivalence, n <= 12, m <= 4", false, false, "", 0, 60};
  // Every m-subset of positions of every host spells one pattern; tally them
  // and compare each tally with count_pattern.
  long checked = 0, mismatches = 0;
  for (std::size_t n = 0; n <= 12; ++n) {
    for (unsigned hb = 0; hb < (1u << n); ++hb) {
      const BinaryWord host = mask_word(n, hb);
      for (std::size_t m = 1; m <= 4; ++m) {
        std::vector<long> tally(std::size_t{1} << m, 0);
        if (m <= n) {
          std::vector<std::size_t> pos(m);
          for (std::size_t i = 0; i < m; ++i) pos[i] = i;
          for (;;) {
            unsigned code = 0;
            for (std::size_t i = 0; i < m; ++i) code |= static_cast<unsigned>(host[pos[i]]) << i;
            ++tally[code];
            std::size_t i = m;
            while (i > 0 && pos[i - 1] == n - m + i - 1) --i;
            if (i == 0) break;
            ++pos[i - 1];
            for (std::size_t j = i; j < m; ++j) pos[j] = pos[j - 1] + 1;
          }
        }
        for (unsigned code = 0; code < (1u << m); ++code) {
          ++checked;
          if (count_pattern(mask_word(m, code), host) != tally[code]) ++mismatches;
        }
      }
    }
  }
  r.pass = mismatches == 0;
  r.detail = std::to_string(checked) + " (host, pattern) pairs, " + std::to_string(mismatches) + " mismatches";
  return r;
}

// -- 2 ------------------------------------------------------------------------

CriterionResult identity_suite(std::uint64_t seed) {
  CriterionResult r{2, "length <= 4 identity suite on 1000 random hosts", false, false, "", 0, 10};
  std::mt19937_64 rng(seed);
  long checks = 0, failures = 0;
  std::size_t relations = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto host = random_word(rng, 4 + uniform_index(rng, 61));
    const auto rel = check_relations(host);
    relations = std::max(relations, rel.size());
    for (const auto& c : rel) {
      ++checks;
      if (!c.pass || c.lhs != c.rhs) ++failures;
    }
  }
  r.pass = failures == 0 && relations > 0;
  r.detail = std::to_string(relations) + " relations x 1000 hosts, " + std::to_string(failures) + " failures";
  return r;
}

// -- 3 ------------------------------------------------------------------------

BlockSequence generic_blocks(std::mt19937_64& rng, int k) {
  BlockSequence b;
  for (int i = 0; i < k; ++i) b.lengths.push_back(0.5 + 2.5 * uniform01(rng));
  return b;
}

std::string show(const BlockSequence& b) {
  std::string s = "(";
  for (std::size_t i = 0; i < b.lengths.size(); ++i) s += (i ? ", " : "") + fmt(b.lengths[i], 4);
  return s + ")";
}

CriterionResult independence(std::uint64_t seed) {
  CriterionResult r{3, "independence rank", false, false, "", 0, 5};
  std::mt19937_64 rng(seed);
  const std::vector<BinaryWord> seven = {W("1"), W("10"), W("100"), W("110"), W("1000"), W("1100"), W("1110")};
  const auto b8 = generic_blocks(rng, 8);
  const auto r7 = independence_rank(seven, b8);

  // Length-5 extension in the same 1...0 family: add words 1xxx0 in order
  // whenever they raise the rank at a 16-block point, up to A(5) = 13.
  const auto b16 = generic_blocks(rng, 16);
  std::vector<BinaryWord> set = seven;
  int rank = independence_rank(set, b16).rank;
  for (const auto& w : all_words(5)) {
    if (static_cast<long>(set.size()) >= conjectured_independent_count(5)) break;
    if (w[0] != 1 || w[4] != 0) continue;
    set.push_back(w);
    const int nr = independence_rank(set, b16).rank;
    if (nr > rank) {
      rank = nr;
    } else {
      set.pop_back();
    }
  }
  const auto b10 = generic_blocks(rng, 10);
  const int r10 = independence_rank(set, b10).rank;
  std::string added;
  for (std::size_t i = seven.size(); i < set.size(); ++i) added += (added.empty() ? "" : ",") + set[i].str();

  r.pass = r7.rank == 7 && !r7.degenerate_blocks;
  r.detail = "rank " + std::to_string(r7.rank) + " at 8 blocks " + show(b8) + "; length-5 set +{" + added +
             "}: rank " + std::to_string(r10) + " at 10 blocks (at most 10 columns), " + std::to_string(rank) +
             " at 16 blocks (reported, conjecture A(5) = 13)";
  return r;
}

// -- 4 ------------------------------------------------------------------------

CriterionResult c_values(std::uint64_t) {
  CriterionResult r{4, "C_tau cross-validation at grid 1000 (0.5%)", false, false, "", 0, 120};
  const double xi = xi_root();
  const std::vector<std::pair<const char*, double>> cases = {
      {"10", 2.0},
      {"1100", 6.0},
      {"1010", 12.0 / (std::numbers::e * std::numbers::e)},
      {"10110", 20.0 / 9.0},
      {"11010", *c_closed_form(W("11010"))},
      {"10101", 30.0 * xi * xi / ((1.0 + xi) * (1.0 + xi))},
  };
  std::vector<std::string> failed;
  std::string detail;
  for (const auto& [tau, expected] : cases) {
    const double v = c_numeric(W(tau), 1000).value;
    const double rel = std::abs(v - expected) / expected;
    const bool ok = rel < 5e-3;
    if (!ok) failed.push_back(tau);
    detail += std::string(detail.empty() ? "" : "; ") + tau + " " + fmt(v) + " vs " + fmt(expected) + (ok ? "" : " FAIL");
  }
  r.pass = failed.empty();
  // The tabulated 11010 value is twice the maximum of the functional it is
  // defined by (two ones between the same zeros are ordered: factor 1/2!).
  r.known_failure = failed == std::vector<std::string>{"11010"};
  if (r.known_failure) detail += " (tabulated 11010 value is 2x the computed maximum 15 e^{-pi/sqrt3})";
  r.detail = detail;
  return r;
}

// -- 5 ------------------------------------------------------------------------

CriterionResult brbr_limit(std::uint64_t) {
  CriterionResult r{5, "extremal 1010 density 3/(4e^2) and Euler-Lagrange residual", false, false, "", 0, 10};
  const auto f = extremal_density_1010(0.5, 2000);
  const double rho = density_of_measure(W("1010"), f);
  const double target = 3.0 / (4.0 * std::exp(2.0));
  const double res = euler_lagrange_residual(W("1010"), analytic_aux_1010(2000));
  // The quoted decimal 0.101499 and 3/(4e^2) = 0.1015014 are both within 1e-4.
  r.pass = std::abs(rho - target) < 1e-4 && std::abs(rho - 0.101499) < 1e-4 && res < 1e-3;
  r.detail = "rho_1010 " + fmt(rho, 9) + " vs " + fmt(target, 9) + ", EL residual " + fmt(res, 3);
  return r;
}

// -- 6 ------------------------------------------------------------------------

ExpPolynomial random_exponent(std::mt19937_64& rng) {
  const int k = 1 + static_cast<int>(uniform_index(rng, 4));
  ExpPolynomial p;
  p.coeffs.resize(k + 1);
  p.coeffs[0] = -3.0 + 2.8 * uniform01(rng);
  for (int i = 1; i <= k; ++i) p.coeffs[i] = -2.0 + 4.0 * uniform01(rng);
  return p;
}

CriterionResult round_trip(std::uint64_t seed) {
  CriterionResult r{6, "limit-shape round trip, Jacobian, det sign", false, false, "", 0, 120};
  std::mt19937_64 rng(seed);
  double worst = 0.0, worst_jac = 0.0;
  int positive = 0, negative = 0, errors = 0;
  for (int n = 0; n < 100; ++n) {
    const ExpPolynomial p = random_exponent(rng);
    try {
      const PhiResult phi = phi_forward(p);
      DensityTargets t;
      t.rho1 = phi.rho1;
      for (std::size_t i = 1; i < phi.densities.size(); ++i) t.ones_then_zero[static_cast<int>(i)] = phi.densities[i];
      const LimitShape s = solve_limit_shape(t);
      if (s.p.coeffs.size() != p.coeffs.size()) {
        ++errors;
        continue;
      }
      for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
        worst = std::max(worst, std::abs(s.p.coeffs[i] - p.coeffs[i]) / std::max(1.0, std::abs(p.coeffs[i])));
      }
    } catch (const std::exception&) {
      ++errors;
      continue;
    }
    if (n % 5 != 0) continue;
    // Jacobian against five-point differences on every fifth exponent.
    const Eigen::MatrixXd jac = phi_jacobian(p);
    const int k = static_cast<int>(p.degree());
    const double h = 1e-3;
    for (int j = 0; j <= k; ++j) {
      auto at = [&](double d) {
        ExpPolynomial q = p;
        q.coeffs[j] += d;
        return phi_forward(q).densities;
      };
      const auto a = at(2 * h), b = at(h), c = at(-h), d = at(-2 * h);
      for (int i = 0; i <= k; ++i) {
        const double fd = (-a[i] + 8 * b[i] - 8 * c[i] + d[i]) / (12 * h);
        worst_jac = std::max(worst_jac, std::abs(fd - jac(i, j)) / std::abs(jac(i, j)));
      }
    }
    (jac.determinant() > 0 ? positive : negative) += 1;
  }
  r.pass = errors == 0 && worst <= 1e-6 && worst_jac <= 1e-6 && (positive == 0 || negative == 0);
  r.detail = "max coefficient error " + fmt(worst, 3) + " over 100 (" + std::to_string(errors) +
             " solver errors); Jacobian rel error " + fmt(worst_jac, 3) + "; det signs +" + std::to_string(positive) +
             "/-" + std::to_string(negative);
  return r;
}

// -- 7 ------------------------------------------------------------------------

CriterionResult figure_shape(std::uint64_t) {
  CriterionResult r{7, "shape for (rho_1, rho_110) = (1/2, 1/3)", false, false, "", 0, 30};
  DensityTargets t;
  t.rho1 = 0.5;
  t.ones_then_zero[2] = 1.0 / 3.0;
  const LimitShape s = solve_limit_shape(t);
  const double a = -s.p.coeffs[0], b = s.p.coeffs.size() > 2 ? s.p.coeffs[2] : 0.0;
  const double e1 = std::abs(density_of_measure(W("1"), s.f) - 0.5);
  const double e110 = std::abs(density_of_measure(W("110"), s.f) - 1.0 / 3.0);
  const bool a_ok = std::abs(a - 3.10795) < 1e-2;
  const bool b_ok = std::abs(b - 12.42) < 1e-2;
  const bool targets_ok = e1 < 1e-6 && e110 < 1e-6;
  r.pass = a_ok && b_ok && targets_ok;
  r.known_failure = !r.pass && a_ok && targets_ok;
  r.detail = "p = -" + fmt(a, 7) + " + " + fmt(b, 7) + " y^2 (quoted 3.10795, 12.42); target errors " + fmt(e1, 3) +
             ", " + fmt(e110, 3);
  if (r.known_failure) {
    r.detail += " (the quoted coefficients give rho_110 = 0.33324, not 1/3; b is insensitive along rho_1 = 1/2)";
  }
  return r;
}

// -- 8 ------------------------------------------------------------------------

CriterionResult brbr_numbers(std::uint64_t seed) {
  CriterionResult r{8, "BRBR numbers", false, false, "", 0, 300};
  const auto deck = new_deck_order();
  const BigInt c = count_pattern(W("1010"), deck);
  const bool exact = c == 28561 && binomial(std::uint64_t{52}, 4) == 270725;

  DeckProblem p{52, 26, W("1010"), DeckMode::anneal, deck};
  const auto best = optimize_deck(p, seed);
  const auto ex20 = optimize_deck({20, 10, W("1010"), DeckMode::exhaustive, std::nullopt}, seed);
  const auto an20 = optimize_deck({20, 10, W("1010"), DeckMode::anneal, std::nullopt}, seed);
  AnnealOptions quick;
  quick.restarts = 4;
  const auto rep = asymptotic_gap_report(W("1010"), {100, 1000}, seed, quick);

  r.pass = exact && best.density >= 0.1139 && ex20.exact_count == an20.exact_count && rep.dominates && rep.shrinking;
  r.detail = "new deck " + c.str() + "/270725 = " + fmt(c.convert_to<double>() / 270725.0) + "; 52-card best " +
             best.exact_count.str() + "/270725 = " + fmt(best.density) + " (conjecturally optimal); n=20 exhaustive " +
             ex20.exact_count.str() + " vs anneal " + an20.exact_count.str() + "; trend";
  for (const auto& row : rep.rows) r.detail += " n=" + std::to_string(row.n) + ":" + fmt(row.optimum);
  r.detail += " -> " + fmt(rep.asymptote);
  return r;
}

// -- 9 ------------------------------------------------------------------------

CriterionResult heisenberg(std::uint64_t seed) {
  CriterionResult r{9, "Heisenberg matrices", false, false, "", 0, 30};
  const auto m = matrix_of_word(GeneratorSpec::from_mask(W("01")), W("01101"));
  UnitriangularMatrix shown(3);
  shown.set(0, 1, 2);
  shown.set(0, 2, 4);
  shown.set(1, 2, 3);
  const bool display = m == shown;

  std::mt19937_64 rng(seed);
  long rows = 0, row_fail = 0;
  for (std::size_t len = 1; len <= 4; ++len) {
    for (unsigned bits = 0; bits < (1u << len); ++bits) {
      const auto spec = GeneratorSpec::from_mask(mask_word(len, bits));
      for (int i = 0; i < 100; ++i) {
        ++rows;
        if (!first_row_equals_counts(spec, random_word(rng, uniform_index(rng, 41))).match) ++row_fail;
      }
    }
  }
  long negative = 0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t len = 1 + uniform_index(rng, 4);
    const auto spec = GeneratorSpec::from_mask(mask_word(len, static_cast<unsigned>(rng())));
    const auto prod = matrix_of_word(spec, random_word(rng, uniform_index(rng, 31)));
    for (std::size_t k = 1; k <= spec.d; ++k) {
      if (min_minor(prod, k).value < 0) ++negative;
    }
  }
  r.pass = display && row_fail == 0 && negative == 0;
  r.detail = std::string("M_01101 ") + (display ? "matches" : "differs") + "; first row " +
             std::to_string(rows - row_fail) + "/" + std::to_string(rows) + "; negative minors " + std::to_string(negative) +
             " in 500 products";
  return r;
}

// -- 10 -----------------------------------------------------------------------

CriterionResult sampler(std::uint64_t seed) {
  CriterionResult r{10, "sampler shape at n = 2000 and detailed balance", false, false, "", 0, 600};
  DensityTargets t;
  t.rho1 = 0.5;
  t.ones_then_zero[2] = 1.0 / 3.0;
  const LimitShape shape = solve_limit_shape(t);
  CalibrationOptions co;
  co.seed = seed;
  const auto cal = calibrate_multipliers({{W("1"), 0.5}, {W("110"), 1.0 / 3.0}}, 2000, co);
  GibbsSpec spec;
  spec.n = 2000;
  spec.patterns = cal.patterns;
  spec.multipliers = cal.multipliers;
  spec.seed = sub_seed(seed, 1);
  spec.sweeps = 300;
  spec.reference = shape.f;
  const auto run = mcmc_sample(spec);
  const double dw = wasserstein(run.stats.empirical_measure(), shape.f);

  // Exact law on all 2^10 words against 1e7 chain steps.
  GibbsSpec small;
  small.n = 10;
  small.patterns = {W("1"), W("110")};
  small.multipliers = {-0.7, 2.0};
  small.seed = sub_seed(seed, 2);
  const auto words = all_words(10);
  std::vector<double> exact(words.size());
  double z = 0.0;
  for (std::size_t s = 0; s < words.size(); ++s) {
    double e = 0.0;
    for (std::size_t i = 0; i < 2; ++i) e += 10.0 * small.multipliers[i] * density(small.patterns[i], words[s]);
    z += exact[s] = std::exp(e);
  }
  GibbsChain chain(small);
  for (int i = 0; i < 100000; ++i) chain.step();
  std::vector<double> hist(words.size(), 0.0);
  const long steps = 10000000;
  for (long i = 0; i < steps; ++i) {
    chain.step();
    std::size_t s = 0;
    for (std::size_t k = 0; k < 10; ++k) s = 2 * s + chain.symbol(k);
    hist[s] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t s = 0; s < words.size(); ++s) tv += std::abs(hist[s] / steps - exact[s] / z);
  tv *= 0.5;

  r.pass = dw < 0.02 && tv < 0.02;
  r.detail = "calibrated a = (" + fmt(cal.multipliers[0], 4) + ", " + fmt(cal.multipliers[1], 4) + "), mean rho (" +
             fmt(run.stats.mean_densities[0], 4) + ", " + fmt(run.stats.mean_densities[1], 4) + "), d_W " + fmt(dw, 3) +
             "; TV at n=10 " + fmt(tv, 3);
  return r;
}

using Check = CriterionResult (*)(std::uint64_t);

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& report) {
  const std::vector<Check> checks = {counting_oracle, identity_suite, independence, c_values, brbr_limit,
                                     round_trip,      figure_shape,   brbr_numbers, heisenberg, sampler};
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = checks[i](sub_seed(options.seed, i));
    } catch (const std::exception& e) {
      r.id = id;
      r.title = "criterion " + std::to_string(id);
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.budget_seconds > 0 && r.seconds > r.budget_seconds) {
      r.detail += "; over the time budget";
      r.pass = false;
      r.known_failure = false;
    }
    if (r.pass) r.known_failure = false;
    if (report) report(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.pass ? "[PASS] " : r.known_failure ? "[FAIL known] " : "[FAIL] ") << r.id << "  " << r.title << ": "
    << r.detail << " (" << fmt(r.seconds, 3) << " s / " << fmt(r.budget_seconds, 3) << " s)";
  return s.str();
}

bool acceptable(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass || r.known_failure; });
}

}  // namespace binpat::verify
