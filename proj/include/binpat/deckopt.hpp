#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "binpat/bigint.hpp"
#include "binpat/word.hpp"

namespace binpat {

enum class DeckMode { exhaustive, anneal, ascent };

DeckMode parse_deck_mode(const std::string& s);
std::string to_string(DeckMode m);

/// Arrange `ones` 1-symbols among n positions to maximize N_pattern.
struct DeckProblem {
  std::size_t n = 52;
  std::size_t ones = 26;
  BinaryWord pattern = BinaryWord::parse("1010");
  DeckMode mode = DeckMode::anneal;
  /// Starting arrangement for ascent and for the first anneal restart;
  /// random otherwise.
  std::optional<BinaryWord> start;

  void validate() const;
};

/// Exhaustive search refuses more arrangements than this.
inline constexpr double kExhaustiveBudget = 1e7;

struct AnnealOptions {
  std::uint64_t steps = 1000000;
  std::size_t restarts = 20;
  /// T_k = T_0 * cooling^k, k advancing every `stage_length` steps.
  double cooling = 0.999;
  std::uint64_t stage_length = 100;
  /// T_0 is set so that this fraction of worsening moves is accepted at first.
  double initial_acceptance = 0.8;
  /// Best-so-far is logged every this many steps.
  std::uint64_t trace_every = 10000;
};

struct DeckTracePoint {
  std::size_t restart = 0;
  std::uint64_t step = 0;
  double temperature = 0.0;
  std::int64_t current = 0;
  std::int64_t best = 0;
};

struct DeckResult {
  BinaryWord best;
  BigInt exact_count;
  double density = 0.0;
  std::string method;
  /// Density of the starting arrangement (first restart for anneal).
  double start_density = 0.0;
  std::vector<DeckTracePoint> trace;
};

/// exhaustive: the lexicographically smallest argmax over all arrangements.
/// ascent: steepest ascent over adjacent transpositions from `start`.
/// anneal: simulated annealing restarts, each polished by ascent; restarts
/// run on BINPAT_THREADS threads and the result does not depend on it.
DeckResult optimize_deck(const DeckProblem& problem, std::uint64_t seed, const AnnealOptions& options = {});

/// Steepest ascent from `start` over adjacent transpositions; returns a word
/// where no adjacent exchange increases N_pattern.
BinaryWord adjacent_ascent(const BinaryWord& pattern, BinaryWord start);

/// 1^13 0^13 1^13 0^13.
BinaryWord new_deck_order();

struct GapRow {
  std::size_t n = 0;
  double optimum = 0.0;       // best found (exhaustive when affordable)
  std::string method;
  double discretized = 0.0;   // density of the rounded extremal shape
  double gap = 0.0;           // optimum - asymptote
};

struct GapReport {
  double asymptote = 0.0;     // 3 / (4 e^2)
  std::vector<GapRow> rows;
  /// Every optimum is at least its discretized shape density.
  bool dominates = false;
  /// Gaps are positive and shrink as n grows.
  bool shrinking = false;
};

/// pattern must be 1010 and every n even. The anneal for each n starts from
/// the extremal 1010 shape rounded to an n-word.
GapReport asymptotic_gap_report(const BinaryWord& pattern, const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                const AnnealOptions& options = {});

/// North step for 1, east step for 0, starting at the origin.
void write_lattice_svg(std::ostream& out, const BinaryWord& word);

}  // namespace binpat
