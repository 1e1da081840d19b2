#include "binpat/word.hpp"

#include <algorithm>
#include <cmath>

#include "binpat/bigint.hpp"
#include "binpat/error.hpp"

namespace binpat {

BinaryWord::BinaryWord(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw InvalidArgument("BinaryWord: symbol outside {0,1}");
  }
}

BinaryWord BinaryWord::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1') {
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    } else {
      throw InvalidArgument("BinaryWord: expected only '0' and '1', got '" + std::string(1, c) + "'");
    }
  }
  BinaryWord w;
  w.bits_ = std::move(bits);
  return w;
}

BinaryWord BinaryWord::repeated(std::uint8_t symbol, std::size_t count) {
  return BinaryWord(std::vector<std::uint8_t>(count, symbol));
}

std::size_t BinaryWord::ones() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool BinaryWord::is_constant() const noexcept {
  return std::adjacent_find(bits_.begin(), bits_.end(), std::not_equal_to<>()) == bits_.end();
}

BinaryWord BinaryWord::complement() const {
  BinaryWord out = *this;
  for (auto& b : out.bits_) b ^= 1u;
  return out;
}

BinaryWord BinaryWord::reversed() const {
  BinaryWord out = *this;
  std::reverse(out.bits_.begin(), out.bits_.end());
  return out;
}

BinaryWord BinaryWord::stretched(std::size_t k) const {
  BinaryWord out;
  out.bits_.reserve(bits_.size() * k);
  for (auto b : bits_) out.bits_.insert(out.bits_.end(), k, b);
  return out;
}

std::string BinaryWord::str() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = static_cast<char>('0' + bits_[i]);
  return s;
}

BinaryWord BinaryWord::operator+(const BinaryWord& other) const {
  BinaryWord out = *this;
  out.bits_.insert(out.bits_.end(), other.bits_.begin(), other.bits_.end());
  return out;
}

void BinaryWord::push_back(std::uint8_t symbol) {
  if (symbol > 1) throw InvalidArgument("BinaryWord: symbol outside {0,1}");
  bits_.push_back(symbol);
}

std::strong_ordering operator<=>(const BinaryWord& a, const BinaryWord& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.bits_.begin(), a.bits_.end(), b.bits_.begin(),
                                                b.bits_.end());
}

std::vector<Run> runs(const BinaryWord& w) {
  std::vector<Run> out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (out.empty() || out.back().symbol != w[i]) {
      out.push_back({w[i], 1});
    } else {
      ++out.back().length;
    }
  }
  return out;
}

std::vector<BinaryWord> all_words(std::size_t len) {
  std::vector<BinaryWord> out;
  const std::size_t count = std::size_t{1} << len;
  out.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    std::vector<std::uint8_t> bits(len);
    for (std::size_t i = 0; i < len; ++i) bits[i] = static_cast<std::uint8_t>((code >> (len - 1 - i)) & 1u);
    out.emplace_back(std::move(bits));
  }
  return out;
}

// -- bigint helpers ---------------------------------------------------------

BigInt binomial(const BigInt& n, long k) {
  if (k < 0 || n < k) return 0;
  BigInt r = 1;
  for (long i = 0; i < k; ++i) {
    r *= (n - i);
    r /= (i + 1);
  }
  return r;
}

BigInt binomial(std::uint64_t n, long k) { return binomial(BigInt(n), k); }

double ratio_to_double(const BigInt& num, const BigInt& den) {
  if (den == 0) throw InvalidArgument("ratio_to_double: zero denominator");
  if (num == 0) return 0.0;
  const bool negative = (num < 0) != (den < 0);
  BigInt a = abs(num);
  BigInt b = abs(den);
  const long bits = static_cast<long>(msb(a)) - static_cast<long>(msb(b));
  // Keep ~62 significant bits in the integer quotient before the single rounding.
  const long shift = 62 - bits;
  BigInt q = shift >= 0 ? BigInt(a << shift) / b : a / BigInt(b << -shift);
  double v = std::ldexp(q.convert_to<double>(), static_cast<int>(-shift));
  return negative ? -v : v;
}

}  // namespace binpat
