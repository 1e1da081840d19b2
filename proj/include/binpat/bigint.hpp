#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace binpat {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// binomial(n, k) for a nonnegative integer n; zero when k > n or k < 0.
BigInt binomial(const BigInt& n, long k);
BigInt binomial(std::uint64_t n, long k);

/// Nearest double to num/den, rounding only once at the end.
double ratio_to_double(const BigInt& num, const BigInt& den);

inline std::string to_decimal(const BigInt& v) { return v.str(); }

}  // namespace binpat
