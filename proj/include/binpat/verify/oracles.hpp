#pragma once

// Slow, independent reference implementations used by the test suites and
// by `binpat verify-all`.

#include <cstddef>
#include <vector>

#include "binpat/bigint.hpp"
#include "binpat/measures.hpp"
#include "binpat/word.hpp"

namespace binpat::verify {

/// Enumerates every m-subset of positions of the host (n <= 24).
BigInt brute_force_count(const BinaryWord& pattern, const BinaryWord& host);

/// k! times the iterated integral over x_1 < ... < x_k, by nested
/// Gauss-Kronrod on each piece between breakpoints. k <= 3.
double quadrature_density(const BinaryWord& pattern, const StepMeasure& mu);

/// Midpoint rule for the integral of |F1 - F2| on `samples` points.
double riemann_wasserstein(const StepMeasure& mu1, const StepMeasure& mu2, int samples);

/// Laplace expansion along the first row.
BigInt cofactor_determinant(const std::vector<std::vector<BigInt>>& m);

/// Families of vertex-disjoint lattice paths in the planar network of `host`:
/// vertex (level, t) for t = 0..n, a horizontal edge per column and a climb
/// level k -> k+1 in column t when host[t-1] == mask[k]. Path r runs from
/// (sources[r], 0) to (sinks[r], n). Enumerates everything (n <= 16).
BigInt nonintersecting_path_families(const BinaryWord& mask, const BinaryWord& host,
                                     const std::vector<std::size_t>& sources,
                                     const std::vector<std::size_t>& sinks);

/// The closed-form maximizer of the 1010 auxiliary problem: density
/// c/x^2 on [1/e, 1] with c = 1/e plus an atom 1/e at x = 1, averaged exactly
/// over n equal cells.
StepMeasure analytic_aux_1010(int n);

/// The 10101 maximizer: c / (x^2 (1-x)^2) on [b, 1-b] with b = xi/(1+xi),
/// normalized, averaged over n equal cells.
StepMeasure analytic_aux_10101(int n);

}  // namespace binpat::verify
