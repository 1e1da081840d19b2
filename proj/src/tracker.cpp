#include "binpat/tracker.hpp"

#include <cmath>

#include "binpat/error.hpp"
#include "binpat/patterns.hpp"

namespace binpat {

CountTracker::CountTracker(const BinaryWord& pattern, const BinaryWord& host)
    : n_(host.size()), m_(pattern.size()), d_(pattern.size() + 1), pattern_(pattern) {
  if (pattern.empty() || pattern.size() > kMaxPatternLength) {
    throw InvalidArgument("CountTracker: pattern length must be in [1, 8]");
  }
  // log binomial(n, m) < 62 log 2 keeps every partial count in range.
  if (n_ >= m_) {
    const double lb = std::lgamma(n_ + 1.0) - std::lgamma(m_ + 1.0) - std::lgamma(n_ - m_ + 1.0);
    if (lb > 62.0 * std::log(2.0) - 1e-9) throw InvalidArgument("CountTracker: host too long for 64-bit counts");
  }
  host_.assign(host.bits().begin(), host.bits().end());
  while (leaves_ < n_) leaves_ *= 2;
  tree_.assign(2 * leaves_ * d_ * d_, 0);
  for (std::size_t i = 1; i < 2 * leaves_; ++i) {
    for (std::size_t k = 0; k < d_; ++k) node(i)[k * d_ + k] = 1;
  }
  for (std::size_t t = 0; t < n_; ++t) set_leaf(t);
  for (std::size_t i = leaves_; i-- > 1;) combine(i);
  count_ = node(1)[m_];
}

BinaryWord CountTracker::host() const { return BinaryWord(host_); }

void CountTracker::set_leaf(std::size_t t) {
  std::int64_t* a = node(leaves_ + t);
  for (std::size_t k = 0; k < m_; ++k) a[k * d_ + k + 1] = pattern_[k] == host_[t] ? 1 : 0;
}

void CountTracker::combine(std::size_t i) {
  std::int64_t* c = node(i);
  const std::int64_t* a = node(2 * i);
  const std::int64_t* b = node(2 * i + 1);
  for (std::size_t r = 0; r < d_; ++r) {
    for (std::size_t j = r + 1; j < d_; ++j) {
      std::int64_t s = 0;
      for (std::size_t k = r; k <= j; ++k) s += a[r * d_ + k] * b[k * d_ + j];
      c[r * d_ + j] = s;
    }
  }
}

void CountTracker::set(std::size_t t, std::uint8_t symbol) {
  if (t >= n_) throw InvalidArgument("CountTracker: position out of range");
  if (host_[t] == symbol) return;
  host_[t] = symbol;
  set_leaf(t);
  for (std::size_t i = (leaves_ + t) / 2; i >= 1; i /= 2) combine(i);
  count_ = node(1)[m_];
}

std::vector<std::int64_t> CountTracker::prefix_counts(std::size_t t) const {
  std::vector<std::int64_t> v(d_, 0), w(d_);
  v[0] = 1;
  std::vector<std::size_t> left, right;
  for (std::size_t l = leaves_, r = leaves_ + t; l < r; l /= 2, r /= 2) {
    if (l & 1) left.push_back(l++);
    if (r & 1) right.push_back(--r);
  }
  left.insert(left.end(), right.rbegin(), right.rend());
  for (std::size_t i : left) {
    const std::int64_t* a = node(i);
    for (std::size_t j = 0; j < d_; ++j) {
      std::int64_t s = 0;
      for (std::size_t k = 0; k <= j; ++k) s += v[k] * a[k * d_ + j];
      w[j] = s;
    }
    v.swap(w);
  }
  return v;
}

std::vector<std::int64_t> CountTracker::suffix_counts(std::size_t t) const {
  std::vector<std::int64_t> u(d_, 0), w(d_);
  u[m_] = 1;
  std::vector<std::size_t> left, right;
  for (std::size_t l = leaves_ + t, r = leaves_ + n_; l < r; l /= 2, r /= 2) {
    if (l & 1) left.push_back(l++);
    if (r & 1) right.push_back(--r);
  }
  // Apply right to left.
  left.insert(left.end(), right.rbegin(), right.rend());
  for (auto it = left.rbegin(); it != left.rend(); ++it) {
    const std::int64_t* a = node(*it);
    for (std::size_t i = 0; i < d_; ++i) {
      std::int64_t s = 0;
      for (std::size_t k = i; k < d_; ++k) s += a[i * d_ + k] * u[k];
      w[i] = s;
    }
    u.swap(w);
  }
  return u;
}

std::int64_t CountTracker::flip_delta(std::size_t t) const {
  if (t >= n_) throw InvalidArgument("CountTracker: position out of range");
  const auto pre = prefix_counts(t);
  const auto suf = suffix_counts(t + 1);
  std::int64_t d = 0;
  for (std::size_t k = 0; k < m_; ++k) {
    const std::int64_t occ = pre[k] * suf[k + 1];
    d += pattern_[k] == host_[t] ? -occ : occ;
  }
  return d;
}

std::int64_t CountTracker::adjacent_swap_delta(std::size_t t) const {
  if (t + 1 >= n_) throw InvalidArgument("CountTracker: position out of range");
  const std::uint8_t a = host_[t], b = host_[t + 1];
  if (a == b || m_ < 2) return 0;
  // Occurrences touching only one of the two positions map onto each other;
  // only those using both as consecutive slots change.
  const auto pre = prefix_counts(t);
  const auto suf = suffix_counts(t + 2);
  std::int64_t d = 0;
  for (std::size_t k = 0; k + 1 < m_; ++k) {
    const std::int64_t occ = pre[k] * suf[k + 2];
    if (pattern_[k] == b && pattern_[k + 1] == a) d += occ;
    if (pattern_[k] == a && pattern_[k + 1] == b) d -= occ;
  }
  return d;
}

}  // namespace binpat
