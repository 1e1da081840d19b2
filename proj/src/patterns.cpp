#include "binpat/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "binpat/error.hpp"

namespace binpat {

namespace {

template <typename Int>
Int count_dp(const BinaryWord& pattern, const BinaryWord& host) {
  const std::size_t m = pattern.size();
  // dp[j] = occurrences of pattern[0..j) in the host prefix seen so far.
  std::vector<Int> dp(m + 1, Int(0));
  dp[0] = 1;
  for (std::size_t i = 0; i < host.size(); ++i) {
    const auto x = host[i];
    for (std::size_t j = m; j >= 1; --j) {
      if (pattern[j - 1] == x) dp[j] += dp[j - 1];
    }
  }
  return dp[m];
}

void require_pattern(const BinaryWord& pattern) {
  if (pattern.empty()) throw InvalidArgument("pattern must be nonempty");
}

double falling_choose(double a, std::size_t c) {
  double r = 1.0;
  for (std::size_t t = 0; t < c; ++t) r *= (a - static_cast<double>(t)) / static_cast<double>(t + 1);
  return r;
}

}  // namespace

BigInt count_pattern(const BinaryWord& pattern, const BinaryWord& host) {
  require_pattern(pattern);
  return count_dp<BigInt>(pattern, host);
}

std::int64_t count_pattern_i64(const BinaryWord& pattern, const BinaryWord& host) {
  require_pattern(pattern);
  return count_dp<std::int64_t>(pattern, host);
}

double density(const BinaryWord& pattern, const BinaryWord& host) {
  require_pattern(pattern);
  if (pattern.size() > host.size()) {
    throw InvalidArgument("density: pattern longer than host");
  }
  return ratio_to_double(count_pattern(pattern, host),
                         binomial(static_cast<std::uint64_t>(host.size()), static_cast<long>(pattern.size())));
}

PatternCountVector count_all(const BinaryWord& host, int max_len) {
  if (max_len < 1 || max_len > static_cast<int>(kMaxPatternLength)) {
    throw InvalidArgument("count_all: max_len must be in [1, 8]");
  }
  PatternCountVector out;
  for (int len = 1; len <= max_len; ++len) {
    for (auto& w : all_words(static_cast<std::size_t>(len))) {
      auto c = count_dp<BigInt>(w, host);
      out.emplace(std::move(w), std::move(c));
    }
  }
  return out;
}

double block_counts_polynomial(const BinaryWord& pattern, const BlockSequence& blocks) {
  require_pattern(pattern);
  if (pattern.size() > kMaxPatternLength) throw InvalidArgument("pattern length exceeds 8");
  for (double a : blocks.lengths) {
    if (!(a >= 0.0)) throw InvalidArgument("block lengths must be nonnegative");
  }
  const std::size_t m = pattern.size();
  std::vector<double> dp(m + 1, 0.0), next(m + 1);
  dp[0] = 1.0;
  for (std::size_t b = 0; b < blocks.lengths.size(); ++b) {
    const std::uint8_t symbol = (b % 2 == 0) ? 1 : 0;
    const double a = blocks.lengths[b];
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t j = 0; j <= m; ++j) {
      if (dp[j] == 0.0) continue;
      next[j] += dp[j];
      // Letters j..j+c-1 placed inside this block must all match its symbol.
      for (std::size_t c = 1; j + c <= m && pattern[j + c - 1] == symbol; ++c) {
        next[j + c] += dp[j] * falling_choose(a, c);
      }
    }
    dp.swap(next);
  }
  return dp[m];
}

BinaryWord expand_blocks(const BlockSequence& blocks) {
  BinaryWord out;
  for (std::size_t b = 0; b < blocks.lengths.size(); ++b) {
    const double a = blocks.lengths[b];
    if (a < 0 || a != std::floor(a)) throw InvalidArgument("expand_blocks: lengths must be nonnegative integers");
    const std::uint8_t symbol = (b % 2 == 0) ? 1 : 0;
    for (long i = 0; i < static_cast<long>(a); ++i) out.push_back(symbol);
  }
  return out;
}

RankResult independence_rank(std::span<const BinaryWord> patterns, const BlockSequence& blocks,
                             const RankOptions& options) {
  if (patterns.empty()) throw InvalidArgument("independence_rank: no patterns");
  const auto& a = blocks.lengths;
  const Eigen::Index rows = static_cast<Eigen::Index>(patterns.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(a.size());
  if (cols == 0) throw InvalidArgument("independence_rank: no blocks");

  RankResult result;
  std::set<double> distinct(a.begin(), a.end());
  result.degenerate_blocks =
      distinct.size() != a.size() || std::any_of(a.begin(), a.end(), [](double v) { return v <= 0.0; });

  Eigen::MatrixXd jac(rows, cols);
  BlockSequence probe = blocks;
  for (Eigen::Index i = 0; i < cols; ++i) {
    const double base = a[static_cast<std::size_t>(i)];
    const double h = options.relative_step * (base != 0.0 ? std::abs(base) : 1.0);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto& w = patterns[static_cast<std::size_t>(r)];
      probe.lengths[static_cast<std::size_t>(i)] = base + h;
      const double up = block_counts_polynomial(w, probe);
      probe.lengths[static_cast<std::size_t>(i)] = std::max(0.0, base - h);
      const double down = block_counts_polynomial(w, probe);
      jac(r, i) = (up - down) / (base + h - std::max(0.0, base - h));
    }
    probe.lengths[static_cast<std::size_t>(i)] = base;
  }
  // Rows have very different polynomial degrees; equilibrate before the SVD
  // so the relative threshold compares like with like. Rank is unchanged.
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double norm = jac.row(r).norm();
    if (norm > 0) jac.row(r) /= norm;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  const auto& sv = svd.singularValues();
  result.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double cutoff = sv.size() > 0 ? options.singular_threshold * sv(0) : 0.0;
  result.rank = static_cast<int>(std::count_if(result.singular_values.begin(), result.singular_values.end(),
                                               [&](double s) { return s > cutoff; }));
  return result;
}

long conjectured_independent_count(int k) {
  long total = 0;
  for (int j = 1; j <= k; ++j) {
    total += binomial(static_cast<std::uint64_t>(j - 1), (j - 1) / 2).convert_to<long>();
  }
  return total;
}

}  // namespace binpat
