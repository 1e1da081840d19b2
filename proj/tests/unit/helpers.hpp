#pragma once

#include <random>
#include <vector>

#include "binpat/measures.hpp"
#include "binpat/random.hpp"
#include "binpat/word.hpp"

namespace testing {

inline binpat::BinaryWord random_word(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
  return binpat::BinaryWord(std::move(bits));
}

/// Random sublebesgue step density on `cells` cells of random widths.
inline binpat::StepMeasure random_step(std::mt19937_64& rng, int cells) {
  std::vector<double> w(cells);
  double total = 0.0;
  for (auto& x : w) {
    x = 0.05 + binpat::uniform01(rng);
    total += x;
  }
  std::vector<binpat::Cell> out;
  for (int i = 0; i < cells; ++i) out.push_back({w[i] / total, binpat::uniform01(rng)});
  return binpat::StepMeasure(std::move(out));
}

}  // namespace testing
