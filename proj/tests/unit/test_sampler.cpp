#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "binpat/error.hpp"
#include "binpat/limitshape.hpp"
#include "binpat/patterns.hpp"
#include "binpat/sampler.hpp"

using namespace binpat;

namespace {

BinaryWord W(const char* s) { return BinaryWord::parse(s); }

// Exact law of the tilted measure on all 2^n words, from count_pattern.
std::vector<double> exact_law(std::size_t n, const std::vector<BinaryWord>& pats, const std::vector<double>& a) {
  const auto words = all_words(n);
  std::vector<double> logw(words.size());
  double top = -1e300;
  for (std::size_t s = 0; s < words.size(); ++s) {
    double e = 0.0;
    for (std::size_t i = 0; i < pats.size(); ++i) e += static_cast<double>(n) * a[i] * density(pats[i], words[s]);
    logw[s] = e;
    top = std::max(top, e);
  }
  std::vector<double> p(words.size());
  double z = 0.0;
  for (std::size_t s = 0; s < words.size(); ++s) z += p[s] = std::exp(logw[s] - top);
  for (auto& x : p) x /= z;
  return p;
}

std::size_t index_of(const GibbsChain& c, std::size_t n) {
  // all_words orders words as binary numbers with the first symbol most significant.
  std::size_t s = 0;
  for (std::size_t t = 0; t < n; ++t) s = 2 * s + c.symbol(t);
  return s;
}

}  // namespace

TEST_CASE("spec validation") {
  GibbsSpec s;
  s.n = 7;
  CHECK_THROWS_AS(mcmc_sample(s), InvalidArgument);
  s.n = 20;
  s.patterns = {W("1"), W("10"), W("11"), W("101"), W("110")};
  s.multipliers.assign(5, 0.0);
  CHECK_THROWS_AS(mcmc_sample(s), InvalidArgument);
  s.patterns = {W("101010")};
  s.multipliers = {0.0};
  CHECK_THROWS_AS(mcmc_sample(s), InvalidArgument);
  s.patterns = {W("10")};
  s.multipliers = {};
  CHECK_THROWS_AS(mcmc_sample(s), InvalidArgument);
  s.multipliers = {1.0};
  s.initial = W("0101");
  CHECK_THROWS_AS(mcmc_sample(s), InvalidArgument);
}

TEST_CASE("all_words order matches the state index used below") {
  const auto ws = all_words(3);
  CHECK(ws[1] == W("001"));
  CHECK(ws[6] == W("110"));
}

TEST_CASE("unconstrained chain samples uniformly") {
  GibbsSpec s;
  s.n = 64;
  s.patterns = {W("1")};
  s.multipliers = {0.0};
  s.sweeps = 4000;
  s.seed = 11;
  const auto r = mcmc_sample(s);
  // sd of one sample is 1/(2 sqrt n); allow 3 sd for sweeps that are
  // correlated over about two samples.
  const double sd = 0.5 / std::sqrt(64.0 * 4000.0) * std::sqrt(2.0);
  CHECK(std::abs(r.stats.mean_densities[0] - 0.5) < 3 * sd);
  CHECK(r.stats.acceptance_rate > 0.0);
  CHECK(r.stats.acceptance_rate <= 1.0);
  for (std::size_t i = 1; i < r.stats.distribution.size(); ++i) {
    CHECK(r.stats.distribution[i] >= r.stats.distribution[i - 1]);
  }
}

TEST_CASE("stationary law matches the exact tilted weights at n = 8") {
  const std::size_t n = 8;
  GibbsSpec s;
  s.n = n;
  s.patterns = {W("1"), W("110")};
  s.multipliers = {-0.7, 2.0};
  s.seed = 3;
  const auto exact = exact_law(n, s.patterns, s.multipliers);
  GibbsChain chain(s);
  for (int i = 0; i < 10000; ++i) chain.step();
  std::vector<double> hist(exact.size(), 0.0);
  const int steps = 2000000;
  for (int i = 0; i < steps; ++i) {
    chain.step();
    hist[index_of(chain, n)] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < hist.size(); ++i) tv += std::abs(hist[i] / steps - exact[i]);
  tv *= 0.5;
  MESSAGE("TV = " << tv);
  CHECK(tv < 0.02);
  chain.check_drift();
}

TEST_CASE("transpositions alone keep the number of ones") {
  GibbsSpec s;
  s.n = 30;
  s.patterns = {W("10")};
  s.multipliers = {1.5};
  s.flip_fraction = 1e-9;
  GibbsChain chain(s);
  const auto k = chain.ones();
  for (int i = 0; i < 5000; ++i) chain.step();
  CHECK(chain.ones() == k);
  CHECK(chain.word().ones() == k);
}

TEST_CASE("seeded runs are identical") {
  GibbsSpec s;
  s.n = 100;
  s.patterns = {W("1"), W("1010")};
  s.multipliers = {0.3, 1.0};
  s.sweeps = 50;
  s.burn_in_sweeps = 10;
  s.seed = 42;
  const auto a = mcmc_sample(s), b = mcmc_sample(s);
  CHECK(a.final_word == b.final_word);
  CHECK(a.stats.mean_densities == b.stats.mean_densities);
  CHECK(a.stats.distribution == b.stats.distribution);
  CHECK(a.stats.acceptance_rate == b.stats.acceptance_rate);
  s.seed = 43;
  CHECK(mcmc_sample(s).final_word != a.final_word);

  std::ostringstream csv;
  write_chain_csv(csv, s, a.stats);
  CHECK(csv.str().rfind("step,rho_1,rho_1010,dW_to_reference\n", 0) == 0);

  const auto m1 = mcmc_sample_chains(s, 3);
  const auto m2 = mcmc_sample_chains(s, 3);
  CHECK(m1.mean_densities == m2.mean_densities);
  CHECK(m1.samples == 150);
}

TEST_CASE("solver multipliers reproduce the limit shape at n = 2000") {
  DensityTargets t;
  t.rho1 = 0.5;
  t.ones_then_zero[2] = 1.0 / 3.0;
  const auto shape = solve_limit_shape(t);
  const auto lm = lagrange_multipliers(shape.p, {2});
  GibbsSpec s;
  s.n = 2000;
  s.patterns = {lm[0].first, lm[1].first};
  s.multipliers = {lm[0].second, lm[1].second};
  s.sweeps = 200;
  s.seed = 5;
  s.reference = shape.f;
  const auto r = mcmc_sample(s);
  CHECK(std::abs(r.stats.mean_densities[0] - 0.5) < 5e-3);
  CHECK(std::abs(r.stats.mean_densities[1] - 1.0 / 3.0) < 5e-3);
  CHECK(wasserstein(r.stats.empirical_measure(), shape.f) < 0.02);
  CHECK(r.stats.trace.back().wasserstein < 0.02);
}

TEST_CASE("single 10 constraint gives the logistic shape matched by moments") {
  GibbsSpec s;
  s.n = 2000;
  s.patterns = {W("10")};
  s.multipliers = {3.0};
  s.sweeps = 300;
  s.seed = 9;
  const auto r = mcmc_sample(s);
  DensityTargets t;
  t.rho1 = r.stats.distribution.back();
  t.ones_then_zero[1] = r.stats.mean_densities[0];
  const auto shape = solve_limit_shape(t);
  CHECK(shape.p.degree() == 1);
  const double dw = wasserstein(r.stats.empirical_measure(), shape.f);
  MESSAGE("rho1 " << t.rho1 << " rho10 " << t.ones_then_zero[1] << " dW " << dw);
  CHECK(dw < 0.02);
  // The fitted shape's multipliers recover the weight: ~0 on rho_1, ~3 on rho_10.
  const auto lm = lagrange_multipliers(shape.p, {1});
  CHECK(std::abs(lm[0].second) < 0.15);
  CHECK(std::abs(lm[1].second - 3.0) < 0.15);
}

TEST_CASE("calibration") {
  SUBCASE("rho_1 = 1/2 alone gives a multiplier near 0") {
    const auto r = calibrate_multipliers({{W("1"), 0.5}}, 2000);
    CHECK(std::abs(r.multipliers[0]) < 0.02);
  }
  SUBCASE("cold start reaches the (1/2, 1/3) targets") {
    CalibrationOptions o;
    o.warm_start = false;
    o.seed = 2;
    const auto r = calibrate_multipliers({{W("1"), 0.5}, {W("110"), 1.0 / 3.0}}, 2000, o);
    CHECK_FALSE(r.warm_started);
    CHECK(std::abs(r.mean_densities[0] - 0.5) < 2e-2);
    CHECK(std::abs(r.mean_densities[1] - 1.0 / 3.0) < 2e-2);
    // Close to the limit-shape multipliers.
    DensityTargets t;
    t.rho1 = 0.5;
    t.ones_then_zero[2] = 1.0 / 3.0;
    const auto lm = lagrange_multipliers(solve_limit_shape(t).p, {2});
    CHECK(std::abs(r.multipliers[0] - lm[0].second) < 0.1);
    CHECK(std::abs(r.multipliers[1] - lm[1].second) < 0.2);
  }
  SUBCASE("1010 raised above its uniform value") {
    const auto r = calibrate_multipliers({{W("1"), 0.5}, {W("1010"), 0.09}}, 500);
    CHECK(r.mean_densities[1] > 1.0 / 16.0);
    CHECK(r.multipliers[1] > 0.0);
  }
  SUBCASE("boundary target diverges") {
    bool thrown = false;
    try {
      calibrate_multipliers({{W("1"), 0.5}, {W("10"), 0.5}}, 2000);
    } catch (const CalibrationError& e) {
      thrown = true;
      CHECK(std::abs(e.trace().back().multipliers[1]) > 50.0);
    }
    CHECK(thrown);
  }
  SUBCASE("bad targets") {
    CHECK_THROWS_AS(calibrate_multipliers({}, 2000), InvalidArgument);
    CHECK_THROWS_AS(calibrate_multipliers({{W("1"), 1.0}}, 2000), InvalidArgument);
  }
}
