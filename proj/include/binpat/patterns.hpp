#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "binpat/bigint.hpp"
#include "binpat/word.hpp"

namespace binpat {

/// Longest pattern accepted anywhere in the toolkit.
inline constexpr std::size_t kMaxPatternLength = 8;

/// Number of (not necessarily consecutive) occurrences of `pattern` in `host`.
/// Exact; throws InvalidArgument for an empty pattern.
BigInt count_pattern(const BinaryWord& pattern, const BinaryWord& host);

/// Same count in 64-bit arithmetic for hot loops. The caller guarantees
/// binomial(n, m) < 2^63.
std::int64_t count_pattern_i64(const BinaryWord& pattern, const BinaryWord& host);

/// N_pattern(host) / binomial(n, m), rounded once at the end.
double density(const BinaryWord& pattern, const BinaryWord& host);

using PatternCountVector = std::map<BinaryWord, BigInt>;

/// Counts of every pattern of length 1..max_len (1 <= max_len <= 8).
PatternCountVector count_all(const BinaryWord& host, int max_len);

// -- algebraic relations ----------------------------------------------------

struct RelationCheck {
  std::string relation;
  BigInt lhs;
  BigInt rhs;
  bool pass;
};

/// Evaluates the known polynomial identities among N_tau for |tau| <= 4 on a
/// single host (length >= 4). Every entry passes for every host.
std::vector<RelationCheck> check_relations(const BinaryWord& host);

// -- block sequences --------------------------------------------------------

/// X = 1^{a_1} 0^{a_2} 1^{a_3} ...; lengths may be real.
struct BlockSequence {
  std::vector<double> lengths;
};

/// N_pattern of a block sequence as a polynomial in the block lengths, with
/// binomial(a, c) extended to real a by the falling factorial.
double block_counts_polynomial(const BinaryWord& pattern, const BlockSequence& blocks);

/// Expands integer-valued blocks into the corresponding word.
BinaryWord expand_blocks(const BlockSequence& blocks);

struct RankOptions {
  double relative_step = 1e-5;
  double singular_threshold = 1e-8;
};

struct RankResult {
  int rank = 0;
  std::vector<double> singular_values;
  /// Set when the block point is not generic (nonpositive or repeated
  /// lengths), in which case the rank may be underestimated.
  bool degenerate_blocks = false;
};

/// Numeric rank of the Jacobian d N_tau / d a_i at the given block point.
RankResult independence_rank(std::span<const BinaryWord> patterns, const BlockSequence& blocks,
                             const RankOptions& options = {});

/// A(k) = sum_{j=1}^k binomial(j-1, floor((j-1)/2)): the conjectured number of
/// algebraically independent pattern counts of length <= k.
long conjectured_independent_count(int k);

}  // namespace binpat
