#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "binpat/deckopt.hpp"
#include "binpat/error.hpp"
#include "binpat/patterns.hpp"
#include "helpers.hpp"

using namespace binpat;

namespace {

BinaryWord W(const char* s) { return BinaryWord::parse(s); }

// Best N_w over all words of length n with `ones` ones, by bitmask
// enumeration and the BigInt counter (n <= 16).
BigInt oracle_max(const BinaryWord& w, std::size_t n, std::size_t ones) {
  BigInt best = -1;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != ones) continue;
    BinaryWord x;
    for (std::size_t t = 0; t < n; ++t) x.push_back(static_cast<std::uint8_t>((mask >> t) & 1u));
    const BigInt c = count_pattern(w, x);
    if (c > best) best = c;
  }
  return best;
}

AnnealOptions quick() {
  AnnealOptions o;
  o.steps = 200000;
  return o;
}

}  // namespace

TEST_CASE("new deck order") {
  const auto w = new_deck_order();
  CHECK(w.size() == 52);
  CHECK(w.ones() == 26);
  // 13^4 = 28561 from one card per block, out of binomial(52, 4) = 270725.
  CHECK(count_pattern(W("1010"), w) == 28561);
  CHECK(std::abs(density(W("1010"), w) - 28561.0 / 270725.0) < 1e-15);
}

TEST_CASE("mode names") {
  CHECK(parse_deck_mode("anneal") == DeckMode::anneal);
  CHECK(to_string(DeckMode::exhaustive) == "exhaustive");
  CHECK_THROWS_AS(parse_deck_mode("greedy"), InvalidArgument);
}

TEST_CASE("problem validation") {
  DeckProblem p{10, 11, W("10"), DeckMode::exhaustive, std::nullopt};
  CHECK_THROWS_AS(optimize_deck(p, 1), InvalidArgument);
  p.ones = 5;
  p.start = W("1111100");
  CHECK_THROWS_AS(optimize_deck(p, 1), InvalidArgument);
  DeckProblem big{52, 26, W("1010"), DeckMode::exhaustive, std::nullopt};
  CHECK_THROWS_AS(optimize_deck(big, 1), InvalidArgument);
}

TEST_CASE("exhaustive 10 at n = 8 is the step word") {
  const auto r = optimize_deck({8, 4, W("10"), DeckMode::exhaustive, std::nullopt}, 1);
  CHECK(r.best == W("11110000"));
  CHECK(r.exact_count == 16);
  CHECK(r.method == "exhaustive");
}

TEST_CASE("exhaustive agrees with a bitmask oracle") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 25; ++it) {
    const auto w = testing::random_word(rng, 2 + rng() % 3);
    const std::size_t n = 4 + rng() % 9;
    const std::size_t ones = rng() % (n + 1);
    const auto r = optimize_deck({n, ones, w, DeckMode::exhaustive, std::nullopt}, 0);
    CHECK(r.exact_count == oracle_max(w, n, ones));
    CHECK(r.best.ones() == ones);
  }
}

TEST_CASE("complement-reversal symmetry of the optimum") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 20; ++it) {
    const auto w = testing::random_word(rng, 2 + rng() % 3);
    const std::size_t n = 6 + rng() % 9;
    const std::size_t ones = rng() % (n + 1);
    const auto a = optimize_deck({n, ones, w, DeckMode::exhaustive, std::nullopt}, 0);
    const auto b = optimize_deck({n, n - ones, w.complement().reversed(), DeckMode::exhaustive, std::nullopt}, 0);
    CHECK(a.exact_count == b.exact_count);
    CHECK(count_pattern(w.complement().reversed(), a.best.complement().reversed()) == a.exact_count);
  }
}

TEST_CASE("ascent reaches a local optimum and never loses") {
  std::mt19937_64 rng(29);
  for (int it = 0; it < 30; ++it) {
    const auto w = testing::random_word(rng, 2 + rng() % 4);
    const auto x = testing::random_word(rng, 6 + rng() % 40);
    const auto y = adjacent_ascent(w, x);
    CHECK(y.ones() == x.ones());
    const BigInt c = count_pattern(w, y);
    CHECK(c >= count_pattern(w, x));
    for (std::size_t t = 0; t + 1 < y.size(); ++t) {
      BinaryWord z = y;
      z.set(t, y[t + 1]);
      z.set(t + 1, y[t]);
      CHECK(count_pattern(w, z) <= c);
    }
  }
}

TEST_CASE("anneal >= ascent >= input") {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 6; ++it) {
    const std::size_t n = 20 + rng() % 30;
    std::vector<std::uint8_t> bits(n, 0);
    for (std::size_t i = 0; i < n / 2; ++i) bits[i] = 1;
    std::shuffle(bits.begin(), bits.end(), rng);
    const BinaryWord start(bits);
    DeckProblem p{n, n / 2, W("1010"), DeckMode::ascent, start};
    AnnealOptions o = quick();
    o.restarts = 4;
    const auto asc = optimize_deck(p, 5, o);
    p.mode = DeckMode::anneal;
    const auto ann = optimize_deck(p, 5, o);
    const double input = density(W("1010"), start);
    CHECK(asc.start_density == input);
    CHECK(asc.density >= input);
    CHECK(ann.density >= asc.density);
  }
}

TEST_CASE("anneal finds the exhaustive optimum for n <= 22") {
  for (std::size_t n = 4; n <= 22; n += 2) {
    const auto ex = optimize_deck({n, n / 2, W("1010"), DeckMode::exhaustive, std::nullopt}, 0);
    const auto an = optimize_deck({n, n / 2, W("1010"), DeckMode::anneal, std::nullopt}, 11, quick());
    CHECK_MESSAGE(an.exact_count == ex.exact_count, "n = " << n);
  }
}

TEST_CASE("seeded anneal is reproducible and thread-independent") {
  DeckProblem p{30, 15, W("1010"), DeckMode::anneal, std::nullopt};
  AnnealOptions o = quick();
  o.restarts = 3;
  const auto a = optimize_deck(p, 8, o);
  const auto b = optimize_deck(p, 8, o);
  CHECK(a.best == b.best);
  CHECK(a.trace.size() == b.trace.size());
  CHECK(a.trace.size() == 3 * o.steps / o.trace_every);
}

TEST_CASE("52-card deck beats new deck order") {
  DeckProblem p{52, 26, W("1010"), DeckMode::anneal, new_deck_order()};
  AnnealOptions o = quick();
  o.restarts = 4;
  const auto r = optimize_deck(p, 3, o);
  CHECK(r.start_density == doctest::Approx(28561.0 / 270725.0));
  MESSAGE("best " << r.best.str() << " count " << r.exact_count.str() << " density " << r.density);
  CHECK(r.density >= 0.1139);
  CHECK(r.density > r.start_density);
}

TEST_CASE("gap report on small sizes") {
  AnnealOptions o = quick();
  o.restarts = 2;
  const auto rep = asymptotic_gap_report(W("1010"), {20, 52, 100}, 4, o);
  CHECK(rep.asymptote == doctest::Approx(0.101499).epsilon(1e-5));
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].method == "exhaustive");
  CHECK(rep.dominates);
  CHECK(rep.shrinking);
  CHECK_THROWS_AS(asymptotic_gap_report(W("1001"), {20}, 1), InvalidArgument);
  CHECK_THROWS_AS(asymptotic_gap_report(W("1010"), {21}, 1), InvalidArgument);
}

TEST_CASE("lattice svg") {
  std::ostringstream out;
  write_lattice_svg(out, W("1100"));
  const auto s = out.str();
  CHECK(s.find("<svg") == 0);
  CHECK(s.find("10,30 10,20 10,10 20,10 30,10") != std::string::npos);
}
