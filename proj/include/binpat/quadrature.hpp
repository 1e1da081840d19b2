#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace binpat {

struct QuadratureOptions {
  double abs_tol = 1e-15;
  double rel_tol = 1e-13;
  /// Cap on the number of subintervals.
  int max_intervals = 500;
};

namespace detail {

struct Piece {
  double a, b, value, err;
  bool operator<(const Piece& o) const { return err < o.err; }
};

template <class F>
Piece gk_piece(F& f, double a, double b) {
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0.0, &err);
  // Boost 1.74 reports the Kronrod-Gauss difference on the reference interval
  // [-1, 1]; rescale it to [a, b].
  return {a, b, value, err * 0.5 * (b - a)};
}

}  // namespace detail

/// Globally adaptive 61-point Gauss-Kronrod: repeatedly bisects the piece
/// with the largest error estimate until the total is below
/// max(abs_tol, rel_tol * |integral|) or nothing more can be gained.
template <class F>
double integrate(F f, double a, double b, const QuadratureOptions& opt = {}, double* error = nullptr) {
  if (a == b) {
    if (error) *error = 0.0;
    return 0.0;
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::priority_queue<detail::Piece> heap;
  heap.push(detail::gk_piece(f, a, b));
  double value = heap.top().value, err = heap.top().err;
  double done_value = 0.0, done_err = 0.0;
  int count = 1;
  while (count < opt.max_intervals && !heap.empty()) {
    if (err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) break;
    const detail::Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    // Roundoff floor: a piece this small cannot be refined further.
    if (!(mid > worst.a && mid < worst.b) || worst.err <= 50.0 * eps * std::abs(worst.value)) break;
    heap.pop();
    const auto left = detail::gk_piece(f, worst.a, mid);
    const auto right = detail::gk_piece(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    ++count;
    // Tiny pieces whose estimate does not shrink under bisection are at the
    // noise level of f itself (e.g. cancellation next to a near-singularity).
    if (left.err + right.err >= worst.err && worst.b - worst.a < 1e-6 * std::abs(b - a)) {
      done_value += left.value + right.value;
      done_err += left.err + right.err;
      continue;
    }
    heap.push(left);
    heap.push(right);
  }
  // Resum to drop the drift of the running updates.
  double total = done_value, total_err = done_err;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().err;
    heap.pop();
  }
  if (error) *error = total_err;
  return total;
}

}  // namespace binpat
