#include "binpat/verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "binpat/error.hpp"
#include "binpat/feasibility.hpp"

namespace binpat::verify {

BigInt brute_force_count(const BinaryWord& pattern, const BinaryWord& host) {
  const std::size_t m = pattern.size();
  const std::size_t n = host.size();
  if (m == 0) throw InvalidArgument("brute_force_count: empty pattern");
  if (n > 24) throw InvalidArgument("brute_force_count: host too long");
  if (m > n) return 0;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(m), true);
  BigInt total = 0;
  do {
    std::size_t j = 0;
    bool match = true;
    for (std::size_t i = 0; i < n && match; ++i) {
      if (!pick[i]) continue;
      match = host[i] == pattern[j++];
    }
    if (match) total += 1;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return total;
}

double quadrature_density(const BinaryWord& pattern, const StepMeasure& mu) {
  const std::size_t k = pattern.size();
  if (k == 0 || k > 3) throw InvalidArgument("quadrature_density: pattern length must be 1..3");
  const std::vector<double> bps = mu.breakpoints();
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

  // inner(level, x) = int_x^1 g_level(y) inner(level + 1, y) dy
  std::function<double(std::size_t, double)> inner = [&](std::size_t level, double x) -> double {
    if (level == k) return 1.0;
    const auto letter = [&](double y) {
      const double f = mu.value_at(y);
      return pattern[level] ? f : 1.0 - f;
    };
    double total = 0.0;
    double lo = x;
    auto it = std::upper_bound(bps.begin(), bps.end(), x);
    while (lo < 1.0) {
      const double hi = it == bps.end() ? 1.0 : std::min(*it, 1.0);
      if (hi > lo) {
        // Polynomial of degree < k on each piece, so one 15-point rule is
        // exact; adaptive refinement only chases boost's absolute error floor.
        total += GK::integrate([&](double y) { return letter(y) * inner(level + 1, y); }, lo, hi, 0);
      }
      lo = hi;
      if (it != bps.end()) ++it;
    }
    return total;
  };
  double fact = 1.0;
  for (std::size_t i = 2; i <= k; ++i) fact *= static_cast<double>(i);
  return fact * inner(0, 0.0);
}

double riemann_wasserstein(const StepMeasure& mu1, const StepMeasure& mu2, int samples) {
  if (samples < 1) throw InvalidArgument("riemann_wasserstein: samples must be positive");
  const DistributionFunction f1(mu1);
  const DistributionFunction f2(mu2);
  double total = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = (i + 0.5) / samples;
    total += std::abs(f1(x) - f2(x));
  }
  return total / samples;
}

BigInt cofactor_determinant(const std::vector<std::vector<BigInt>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  BigInt total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c] == 0) continue;
    std::vector<std::vector<BigInt>> sub;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<BigInt> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != c) row.push_back(m[r][k]);
      }
      sub.push_back(std::move(row));
    }
    const BigInt term = m[0][c] * cofactor_determinant(sub);
    total += c % 2 == 0 ? term : BigInt(-term);
  }
  return total;
}

namespace {

// Every path from level `from` to level `to` as the set of vertices it visits,
// encoded as level * (n + 1) + t.
void paths_between(const BinaryWord& mask, const BinaryWord& host, std::size_t from, std::size_t to,
                   std::vector<std::vector<std::size_t>>& out) {
  const std::size_t n = host.size();
  std::vector<std::size_t> verts;
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t level, std::size_t t) {
    verts.push_back(level * (n + 1) + t);
    if (t == n) {
      if (level == to) out.push_back(verts);
    } else {
      walk(level, t + 1);
      if (level < to && host[t] == mask[level]) walk(level + 1, t + 1);
    }
    verts.pop_back();
  };
  walk(from, 0);
}

}  // namespace

BigInt nonintersecting_path_families(const BinaryWord& mask, const BinaryWord& host,
                                     const std::vector<std::size_t>& sources,
                                     const std::vector<std::size_t>& sinks) {
  if (host.size() > 16) throw InvalidArgument("nonintersecting_path_families: host too long");
  if (sources.size() != sinks.size()) throw InvalidArgument("nonintersecting_path_families: size mismatch");
  const std::size_t levels = mask.size() + 1;
  std::vector<std::vector<std::vector<std::size_t>>> options(sources.size());
  for (std::size_t r = 0; r < sources.size(); ++r) {
    if (sources[r] >= levels || sinks[r] >= levels) throw InvalidArgument("nonintersecting_path_families: bad level");
    if (sources[r] <= sinks[r]) paths_between(mask, host, sources[r], sinks[r], options[r]);
  }
  BigInt total = 0;
  std::vector<std::size_t> used;
  std::function<void(std::size_t)> pick = [&](std::size_t r) {
    if (r == sources.size()) {
      total += 1;
      return;
    }
    for (const auto& path : options[r]) {
      bool clash = false;
      for (std::size_t v : path) {
        if (std::find(used.begin(), used.end(), v) != used.end()) {
          clash = true;
          break;
        }
      }
      if (clash) continue;
      used.insert(used.end(), path.begin(), path.end());
      pick(r + 1);
      used.resize(used.size() - path.size());
    }
  };
  pick(0);
  return total;
}

StepMeasure analytic_aux_1010(int n) {
  if (n < 1) throw InvalidArgument("analytic_aux_1010: n must be positive");
  const double b = std::exp(-1.0), c = std::exp(-1.0);
  std::vector<Cell> cells;
  for (int i = 0; i < n; ++i) {
    const double l = static_cast<double>(i) / n;
    const double r = static_cast<double>(i + 1) / n;
    const double lo = std::max(l, b);
    const double mass = r > b ? c * (1.0 / lo - 1.0 / r) : 0.0;
    cells.push_back({1.0 / n, mass * n});
  }
  return StepMeasure(std::move(cells), {{1.0, c}});
}

StepMeasure analytic_aux_10101(int n) {
  if (n < 1) throw InvalidArgument("analytic_aux_10101: n must be positive");
  const double xi = xi_root();
  const double b = xi / (1.0 + xi);
  // antiderivative of 1 / (x^2 (1-x)^2)
  const auto G = [](double x) { return -1.0 / x + 2.0 * std::log(x) - 2.0 * std::log(1.0 - x) + 1.0 / (1.0 - x); };
  const double c = 1.0 / (G(1.0 - b) - G(b));
  std::vector<Cell> cells;
  for (int i = 0; i < n; ++i) {
    const double l = std::max(static_cast<double>(i) / n, b);
    const double r = std::min(static_cast<double>(i + 1) / n, 1.0 - b);
    cells.push_back({1.0 / n, r > l ? c * (G(r) - G(l)) * n : 0.0});
  }
  return StepMeasure(std::move(cells));
}

}  // namespace binpat::verify
