#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace binpat {

/// A finite sequence over {0,1}. Used both for short patterns and for long
/// host sequences.
class BinaryWord {
 public:
  BinaryWord() = default;
  explicit BinaryWord(std::vector<std::uint8_t> bits);

  /// Parses a string of '0'/'1' characters. Throws InvalidArgument on any
  /// other character.
  static BinaryWord parse(std::string_view text);
  static BinaryWord repeated(std::uint8_t symbol, std::size_t count);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  std::size_t ones() const noexcept;
  std::size_t zeros() const noexcept { return size() - ones(); }
  bool is_constant() const noexcept;

  BinaryWord complement() const;
  BinaryWord reversed() const;
  /// Each symbol repeated `k` times in place ("0110" -> "00111100" for k=2).
  BinaryWord stretched(std::size_t k) const;

  std::string str() const;

  BinaryWord operator+(const BinaryWord& other) const;
  void push_back(std::uint8_t symbol);
  void set(std::size_t i, std::uint8_t symbol) { bits_[i] = symbol; }

  friend bool operator==(const BinaryWord&, const BinaryWord&) = default;
  /// Shorter words first, then lexicographic.
  friend std::strong_ordering operator<=>(const BinaryWord& a, const BinaryWord& b);

 private:
  std::vector<std::uint8_t> bits_;
};

/// Maximal runs of equal symbols, e.g. "11010" -> {(1,2),(0,1),(1,1),(0,1)}.
struct Run {
  std::uint8_t symbol;
  std::size_t length;
};
std::vector<Run> runs(const BinaryWord& w);

/// All words of length `len` in increasing binary order.
std::vector<BinaryWord> all_words(std::size_t len);

}  // namespace binpat
