#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "binpat/bigint.hpp"
#include "binpat/word.hpp"

namespace binpat {

/// Largest dimension accepted (minor scans enumerate all row/column subsets).
inline constexpr std::size_t kMaxHeisenbergDim = 8;

/// d x d upper unitriangular integer matrix.
class UnitriangularMatrix {
 public:
  explicit UnitriangularMatrix(std::size_t d);

  std::size_t dim() const noexcept { return d_; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return a_[i * d_ + j]; }
  /// Only entries with i < j may be set.
  void set(std::size_t i, std::size_t j, BigInt v);

  UnitriangularMatrix operator*(const UnitriangularMatrix& o) const;
  friend bool operator==(const UnitriangularMatrix&, const UnitriangularMatrix&) = default;

  /// Determinant of the submatrix on the given (sorted, distinct) rows and
  /// columns, by fraction-free Bareiss elimination.
  BigInt minor(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const;

 private:
  std::size_t d_;
  std::vector<BigInt> a_;
};

/// Generator assignment: superdiagonal slot (i, i+1) belongs to M_{mask[i]}.
struct GeneratorSpec {
  std::size_t d = 2;
  BinaryWord mask;

  /// Validates d in [2, 8] and mask length d - 1.
  static GeneratorSpec from_mask(const BinaryWord& mask);
};

/// M_b = I + sum of E_{i,i+1} over slots with mask[i] = b.
UnitriangularMatrix generator(const GeneratorSpec& spec, std::uint8_t symbol);

/// M_{x_1} M_{x_2} ... M_{x_n}; entry (i, j) is N_{mask[i..j-1]}(host).
UnitriangularMatrix matrix_of_word(const GeneratorSpec& spec, const BinaryWord& host);

struct FirstRowReport {
  std::vector<BigInt> row;
  /// 1, N_{a_1}, N_{a_1 a_2}, ... from count_pattern.
  std::vector<BigInt> counts;
  bool match = false;
};

FirstRowReport first_row_equals_counts(const GeneratorSpec& spec, const BinaryWord& host);

struct MinorResult {
  BigInt value;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};

/// Minimum over all order x order minors, with the first subsets attaining it.
MinorResult min_minor(const UnitriangularMatrix& m, std::size_t order);

}  // namespace binpat
