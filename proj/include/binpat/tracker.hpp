#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "binpat/word.hpp"

namespace binpat {

/// Keeps N_w(X) current while single positions of X change.
///
/// Position t contributes the (m+1) x (m+1) transfer matrix I + sum of
/// E_{k,k+1} over pattern slots k with w[k] = X[t]; N_w is entry (0, m) of
/// their ordered product. A segment tree stores the partial products, so a
/// symbol change costs O(m^3 log n) and the effect of a proposed change can
/// be read off prefix/suffix count vectors in O(m^2 log n).
class CountTracker {
 public:
  /// Requires binomial(n, m) < 2^62 so every node entry fits in 64 bits.
  CountTracker(const BinaryWord& pattern, const BinaryWord& host);

  std::int64_t count() const noexcept { return count_; }
  std::size_t size() const noexcept { return n_; }
  std::uint8_t symbol(std::size_t t) const noexcept { return host_[t]; }
  const BinaryWord& pattern() const noexcept { return pattern_; }
  /// Current host, materialized.
  BinaryWord host() const;

  /// N_{w[0..k)}(X[0..t)) for k = 0..m.
  std::vector<std::int64_t> prefix_counts(std::size_t t) const;
  /// N_{w[k..m)}(X[t..n)) for k = 0..m.
  std::vector<std::int64_t> suffix_counts(std::size_t t) const;

  /// Change of N_w if X[t] were complemented.
  std::int64_t flip_delta(std::size_t t) const;
  /// Change of N_w if X[t] and X[t+1] were exchanged.
  std::int64_t adjacent_swap_delta(std::size_t t) const;

  void set(std::size_t t, std::uint8_t symbol);
  void flip(std::size_t t) { set(t, static_cast<std::uint8_t>(1 - host_[t])); }

 private:
  std::size_t n_ = 0, m_ = 0, d_ = 0, leaves_ = 1;
  BinaryWord pattern_;
  std::vector<std::uint8_t> host_;
  std::vector<std::int64_t> tree_;  // node-major, d_*d_ entries per node
  std::int64_t count_ = 0;

  std::int64_t* node(std::size_t i) { return tree_.data() + i * d_ * d_; }
  const std::int64_t* node(std::size_t i) const { return tree_.data() + i * d_ * d_; }
  void set_leaf(std::size_t t);
  void combine(std::size_t i);
};

}  // namespace binpat
