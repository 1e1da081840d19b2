#include "binpat/heisenberg.hpp"

#include <string>

#include "binpat/error.hpp"
#include "binpat/patterns.hpp"

namespace binpat {

UnitriangularMatrix::UnitriangularMatrix(std::size_t d) : d_(d), a_(d * d) {
  if (d == 0) throw InvalidArgument("UnitriangularMatrix: dimension must be positive");
  for (std::size_t i = 0; i < d; ++i) a_[i * d + i] = 1;
}

void UnitriangularMatrix::set(std::size_t i, std::size_t j, BigInt v) {
  if (i >= d_ || j >= d_ || i >= j) throw InvalidArgument("UnitriangularMatrix: only strictly upper entries may be set");
  a_[i * d_ + j] = std::move(v);
}

UnitriangularMatrix UnitriangularMatrix::operator*(const UnitriangularMatrix& o) const {
  if (o.d_ != d_) throw InvalidArgument("UnitriangularMatrix: dimension mismatch");
  UnitriangularMatrix r(d_);
  for (std::size_t i = 0; i < d_; ++i) {
    for (std::size_t j = i + 1; j < d_; ++j) {
      BigInt s = 0;
      for (std::size_t k = i; k <= j; ++k) s += (*this)(i, k) * o(k, j);
      r.a_[i * d_ + j] = std::move(s);
    }
  }
  return r;
}

BigInt UnitriangularMatrix::minor(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const {
  const std::size_t n = rows.size();
  if (n == 0 || cols.size() != n) throw InvalidArgument("minor: need equally many rows and columns");
  for (std::size_t k = 0; k < n; ++k) {
    if (rows[k] >= d_ || cols[k] >= d_) throw InvalidArgument("minor: index out of range");
    if (k > 0 && (rows[k] <= rows[k - 1] || cols[k] <= cols[k - 1])) {
      throw InvalidArgument("minor: indices must be strictly increasing");
    }
  }
  std::vector<BigInt> m(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m[r * n + c] = (*this)(rows[r], cols[c]);
  }
  // Bareiss: every division is exact.
  int sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k * n + k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p * n + k] == 0) ++p;
      if (p == n) return 0;
      for (std::size_t c = 0; c < n; ++c) std::swap(m[k * n + c], m[p * n + c]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i * n + j] = (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
      }
    }
    prev = m[k * n + k];
  }
  return sign * m[n * n - 1];
}

GeneratorSpec GeneratorSpec::from_mask(const BinaryWord& mask) {
  if (mask.empty() || mask.size() + 1 > kMaxHeisenbergDim) {
    throw InvalidArgument("GeneratorSpec: mask length must be in [1, " + std::to_string(kMaxHeisenbergDim - 1) + "]");
  }
  return GeneratorSpec{mask.size() + 1, mask};
}

namespace {

void require_spec(const GeneratorSpec& spec) {
  if (spec.d < 2 || spec.d > kMaxHeisenbergDim) throw InvalidArgument("GeneratorSpec: d must be in [2, 8]");
  if (spec.mask.size() != spec.d - 1) throw InvalidArgument("GeneratorSpec: mask length must be d - 1");
}

}  // namespace

UnitriangularMatrix generator(const GeneratorSpec& spec, std::uint8_t symbol) {
  require_spec(spec);
  UnitriangularMatrix m(spec.d);
  for (std::size_t i = 0; i + 1 < spec.d; ++i) {
    if (spec.mask[i] == symbol) m.set(i, i + 1, 1);
  }
  return m;
}

UnitriangularMatrix matrix_of_word(const GeneratorSpec& spec, const BinaryWord& host) {
  require_spec(spec);
  const std::size_t d = spec.d;
  // Rows of the running product; right-multiplying by M_b adds column k-1
  // into column k wherever mask[k-1] = b.
  std::vector<BigInt> a(d * d);
  for (std::size_t i = 0; i < d; ++i) a[i * d + i] = 1;
  for (std::size_t t = 0; t < host.size(); ++t) {
    const std::uint8_t b = host[t];
    for (std::size_t k = d - 1; k >= 1; --k) {
      if (spec.mask[k - 1] != b) continue;
      for (std::size_t i = 0; i < k; ++i) a[i * d + k] += a[i * d + k - 1];
    }
  }
  UnitriangularMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) m.set(i, j, std::move(a[i * d + j]));
  }
  return m;
}

FirstRowReport first_row_equals_counts(const GeneratorSpec& spec, const BinaryWord& host) {
  const UnitriangularMatrix m = matrix_of_word(spec, host);
  FirstRowReport r;
  r.row.push_back(m(0, 0));
  r.counts.push_back(1);
  BinaryWord prefix;
  for (std::size_t j = 1; j < spec.d; ++j) {
    prefix.push_back(spec.mask[j - 1]);
    r.row.push_back(m(0, j));
    r.counts.push_back(count_pattern(prefix, host));
  }
  r.match = r.row == r.counts;
  return r;
}

namespace {

bool next_subset(std::vector<std::size_t>& s, std::size_t n) {
  const std::size_t k = s.size();
  for (std::size_t i = k; i-- > 0;) {
    if (s[i] < n - k + i) {
      ++s[i];
      for (std::size_t j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

MinorResult min_minor(const UnitriangularMatrix& m, std::size_t order) {
  const std::size_t d = m.dim();
  if (order < 1 || order > d) throw InvalidArgument("min_minor: order must be in [1, d]");
  if (d > kMaxHeisenbergDim) throw InvalidArgument("min_minor: dimension above 8");
  std::vector<std::size_t> rows(order);
  for (std::size_t i = 0; i < order; ++i) rows[i] = i;
  MinorResult best;
  bool first = true;
  do {
    std::vector<std::size_t> cols(order);
    for (std::size_t i = 0; i < order; ++i) cols[i] = i;
    do {
      BigInt v = m.minor(rows, cols);
      if (first || v < best.value) {
        best = {std::move(v), rows, cols};
        first = false;
      }
    } while (next_subset(cols, d));
  } while (next_subset(rows, d));
  return best;
}

}  // namespace binpat
