#include "binpat/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "binpat/bigint.hpp"
#include "binpat/error.hpp"

namespace binpat {

namespace {

constexpr double kE = std::numbers::e;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void require_nonconstant(const BinaryWord& tau, const char* where) {
  if (tau.size() == 0) throw InvalidArgument(std::string(where) + ": empty pattern");
  if (tau.is_constant()) {
    throw InvalidArgument(std::string(where) + ": constant pattern " + tau.str() + " has a forced density");
  }
}

// A piece of the auxiliary measure: Lebesgue width `width` carrying g-mass
// `mass`. Atoms have zero width.
struct Segment {
  double width;
  double mass;
};

// Transfer structure of the functional k! I_tau(g) for a fixed tau. A block of
// c consecutive letters (o ones, z zeros) placed inside one segment
// contributes width^o mass^z / c!; inside an atom only zero blocks survive,
// with weight mass^z / z!.
class AuxFunctional {
 public:
  explicit AuxFunctional(const BinaryWord& tau) : k_(static_cast<int>(tau.size())) {
    ones_prefix_.assign(k_ + 1, 0);
    for (int i = 0; i < k_; ++i) ones_prefix_[i + 1] = ones_prefix_[i] + (tau[i] ? 1 : 0);
    kfact_ = factorial(k_);
    inv_fact_.resize(k_ + 1);
    for (int c = 0; c <= k_; ++c) inv_fact_[c] = 1.0 / factorial(c);
  }

  int length() const { return k_; }

  // Value, and optionally d value / d mass for every segment.
  double evaluate(const std::vector<Segment>& segs, std::vector<double>* grad) const {
    const std::size_t S = segs.size();
    const int K = k_;
    alpha_.assign((S + 1) * (K + 1), 0.0);
    alpha_[0] = 1.0;
    std::vector<double> pw_h(K + 1), pw_w(K + 1);
    for (std::size_t s = 0; s < S; ++s) {
      powers(segs[s], pw_h, pw_w);
      const double* a = &alpha_[s * (K + 1)];
      double* b = &alpha_[(s + 1) * (K + 1)];
      for (int i = 0; i <= K; ++i) {
        if (a[i] == 0.0) continue;
        for (int c = 0; i + c <= K; ++c) {
          const double t = weight(segs[s], i, c, pw_h, pw_w);
          if (t != 0.0) b[i + c] += a[i] * t;
        }
      }
    }
    const double value = alpha_[S * (K + 1) + K] * kfact_;
    if (!grad) return value;

    grad->assign(S, 0.0);
    std::vector<double> beta(K + 1, 0.0), next(K + 1);
    beta[K] = 1.0;
    for (std::size_t s = S; s-- > 0;) {
      powers(segs[s], pw_h, pw_w);
      const double* a = &alpha_[s * (K + 1)];
      double g = 0.0;
      std::fill(next.begin(), next.end(), 0.0);
      for (int i = 0; i <= K; ++i) {
        for (int c = 0; i + c <= K; ++c) {
          const double t = weight(segs[s], i, c, pw_h, pw_w);
          if (t != 0.0) next[i] += t * beta[i + c];
          const int z = c - (ones_prefix_[i + c] - ones_prefix_[i]);
          if (z > 0 && a[i] != 0.0 && segs[s].mass > 0.0) {
            g += a[i] * z * t / segs[s].mass * beta[i + c];
          }
        }
      }
      (*grad)[s] = g * kfact_;
      beta.swap(next);
    }
    return value;
  }

 private:
  int k_;
  std::vector<int> ones_prefix_;
  std::vector<double> inv_fact_;
  double kfact_;
  mutable std::vector<double> alpha_;

  void powers(const Segment& sg, std::vector<double>& ph, std::vector<double>& pw) const {
    ph[0] = pw[0] = 1.0;
    for (int i = 1; i <= k_; ++i) {
      ph[i] = ph[i - 1] * sg.width;
      pw[i] = pw[i - 1] * sg.mass;
    }
  }

  double weight(const Segment& sg, int i, int c, const std::vector<double>& ph, const std::vector<double>& pw) const {
    if (c == 0) return 1.0;
    const int o = ones_prefix_[i + c] - ones_prefix_[i];
    const int z = c - o;
    if (sg.width == 0.0) return o == 0 ? pw[z] * inv_fact_[z] : 0.0;
    return ph[o] * pw[z] * inv_fact_[c];
  }
};

// Segments of a StepMeasure in positional order, atoms splitting cells.
std::vector<Segment> segments_of(const StepMeasure& g) {
  std::vector<Segment> out;
  const auto& atoms = g.atoms();
  std::size_t ai = 0;
  double left = 0.0;
  for (const auto& cell : g.cells()) {
    const double right = left + cell.width;
    double cur = left;
    while (ai < atoms.size() && atoms[ai].position <= right &&
           (atoms[ai].position < right || &cell == &g.cells().back())) {
      const double p = std::max(atoms[ai].position, cur);
      if (p > cur) out.push_back({p - cur, cell.value * (p - cur)});
      out.push_back({0.0, atoms[ai].mass});
      cur = p;
      ++ai;
    }
    if (right > cur) out.push_back({right - cur, cell.value * (right - cur)});
    left = right;
  }
  for (; ai < atoms.size(); ++ai) out.push_back({0.0, atoms[ai].mass});
  return out;
}

// Parameterization used by the optimizer: cell masses on a uniform grid,
// atoms at 0 and 1, and an optional interior atom at `atom_pos`.
struct AuxState {
  int n = 0;
  std::vector<double> mass;  // [atom0, cell_0..cell_{n-1}, atom1, (interior)]
  bool interior = false;
  double atom_pos = 0.0;

  std::size_t size() const { return mass.size(); }
  int interior_cell() const { return std::clamp(static_cast<int>(atom_pos * n), 0, n - 1); }

  std::vector<Segment> segments() const {
    const double h = 1.0 / n;
    std::vector<Segment> s;
    s.reserve(n + 4);
    s.push_back({0.0, mass[0]});
    const int q = interior ? interior_cell() : -1;
    for (int i = 0; i < n; ++i) {
      const double m = mass[1 + i];
      if (i != q) {
        s.push_back({h, m});
        continue;
      }
      const double hl = atom_pos - static_cast<double>(i) * h;
      const double hr = h - hl;
      s.push_back({hl, m * hl / h});
      s.push_back({0.0, mass[n + 2]});
      s.push_back({hr, m * hr / h});
    }
    s.push_back({0.0, mass[n + 1]});
    return s;
  }

  // Chain rule from segment gradients to parameter gradients.
  void pull_back(const std::vector<double>& seg_grad, std::vector<double>& out) const {
    out.assign(size(), 0.0);
    const double h = 1.0 / n;
    out[0] = seg_grad[0];
    const int q = interior ? interior_cell() : -1;
    std::size_t s = 1;
    for (int i = 0; i < n; ++i) {
      if (i != q) {
        out[1 + i] = seg_grad[s++];
        continue;
      }
      const double hl = atom_pos - static_cast<double>(i) * h;
      const double hr = h - hl;
      out[1 + i] = (seg_grad[s] * hl + seg_grad[s + 2] * hr) / h;
      out[n + 2] = seg_grad[s + 1];
      s += 3;
    }
    out[n + 1] = seg_grad[s];
  }

  StepMeasure measure() const {
    const double h = 1.0 / n;
    std::vector<Cell> cells;
    cells.reserve(n);
    for (int i = 0; i < n; ++i) cells.push_back({h, mass[1 + i] / h});
    std::vector<Atom> atoms;
    if (mass[0] > 0.0) atoms.push_back({0.0, mass[0]});
    if (interior && mass[n + 2] > 0.0) atoms.push_back({atom_pos, mass[n + 2]});
    if (mass[n + 1] > 0.0) atoms.push_back({1.0, mass[n + 1]});
    return StepMeasure(std::move(cells), std::move(atoms));
  }
};

struct AscentOutcome {
  double value;
  int iterations;
  bool converged;
};

// Exponentiated-gradient ascent on the simplex with backtracking.
AscentOutcome ascend(const AuxFunctional& fn, AuxState& st, const CNumericOptions& opt, int max_iters) {
  std::vector<double> seg_grad, grad, trial(st.size());
  double value = fn.evaluate(st.segments(), &seg_grad);
  st.pull_back(seg_grad, grad);
  double eta = 1.0;
  int stall = 0;
  int it = 0;
  for (; it < max_iters; ++it) {
    // The functional is homogeneous, so sum m_i grad_i is a natural scale.
    double scale = 0.0;
    double gmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < st.size(); ++i) {
      scale += st.mass[i] * grad[i];
      gmax = std::max(gmax, grad[i]);
    }
    if (!(scale > 0.0)) return {value, it, false};

    bool accepted = false;
    AuxState cand = st;
    double cand_value = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      double total = 0.0;
      for (std::size_t i = 0; i < st.size(); ++i) {
        trial[i] = st.mass[i] * std::exp(eta * (grad[i] - gmax) / scale);
        total += trial[i];
      }
      for (std::size_t i = 0; i < st.size(); ++i) cand.mass[i] = trial[i] / total;
      cand_value = fn.evaluate(cand.segments(), nullptr);
      if (cand_value >= value) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) return {value, it, true};

    const double gain = (cand_value - value) / value;
    st = std::move(cand);
    value = fn.evaluate(st.segments(), &seg_grad);
    st.pull_back(seg_grad, grad);
    eta = std::min(eta * 2.0, 1e6);
    stall = gain < opt.rel_tol ? stall + 1 : 0;
    if (stall >= opt.stall_iters) return {value, it + 1, true};
  }
  return {value, it, false};
}

}  // namespace

double xi_root() {
  const double target = std::exp(-1.0);
  double lo = 0.1;
  double hi = 0.5;
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (mid * std::exp(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::optional<double> c_closed_form(const BinaryWord& tau) {
  require_nonconstant(tau, "c_closed_form");
  const BinaryWord orbit[4] = {tau, tau.reversed(), tau.complement(), tau.complement().reversed()};
  for (const auto& w : orbit) {
    const auto r = runs(w);
    if (w[0] != 1) continue;
    if (r.size() == 2) {
      const long k = static_cast<long>(r[0].length);
      const long l = static_cast<long>(r[1].length);
      return ratio_to_double(binomial(BigInt(k + l), k), BigInt(1));
    }
    if (r.size() == 3) {
      const double k = static_cast<double>(r[0].length);
      const double l = static_cast<double>(r[1].length);
      const double m = static_cast<double>(r[2].length);
      const double log_multi = std::lgamma(k + l + m + 1) - std::lgamma(k + 1) - std::lgamma(l + 1) - std::lgamma(m + 1);
      return std::exp(log_multi + k * std::log(k) + m * std::log(m) - (k + m) * std::log(k + m));
    }
    const std::string s = w.str();
    if (s == "1010") return 12.0 / (kE * kE);
    if (s == "11010") return 30.0 * std::exp(-std::numbers::pi / std::sqrt(3.0));
    if (s == "10110") return 20.0 / 9.0;
    if (s == "10101") {
      const double xi = xi_root();
      return 30.0 * xi * xi / ((1.0 + xi) * (1.0 + xi));
    }
  }
  return std::nullopt;
}

double aux_functional(const BinaryWord& tau, const StepMeasure& g) {
  require_nonconstant(tau, "aux_functional");
  return AuxFunctional(tau).evaluate(segments_of(g), nullptr);
}

namespace {

struct LevelResult {
  AuxState state;
  double value;
};

// Each cell split into two halves of equal density; the value is unchanged.
AuxState prolong(const AuxState& coarse) {
  AuxState fine;
  fine.n = 2 * coarse.n;
  fine.interior = coarse.interior;
  fine.atom_pos = coarse.atom_pos;
  fine.mass.reserve(coarse.mass.size() + coarse.n);
  fine.mass.push_back(coarse.mass[0]);
  for (int i = 0; i < coarse.n; ++i) {
    fine.mass.push_back(0.5 * coarse.mass[1 + i]);
    fine.mass.push_back(0.5 * coarse.mass[1 + i]);
  }
  fine.mass.push_back(coarse.mass[coarse.n + 1]);
  if (coarse.interior) fine.mass.push_back(coarse.mass[coarse.n + 2]);
  return fine;
}

class CSolver {
 public:
  CSolver(const BinaryWord& tau, const CNumericOptions& options) : fn_(tau), tau_(tau), opt_(options) {}

  int iterations() const { return iterations_; }

  // Even grids start from the solution on the half grid, so the value never
  // decreases along a dyadic refinement chain.
  LevelResult solve(int n) {
    if (n % 2 == 0 && n / 2 >= 50) {
      const LevelResult coarse = solve(n / 2);
      AuxState st = prolong(coarse.state);
      if (st.interior) return refine_atom(st, coarse.value, 2.0 / n);
      return search(std::move(st));
    }
    AuxState st;
    st.n = n;
    st.mass.assign(static_cast<std::size_t>(n) + 2, 1.0 / (n + 2));
    return search(std::move(st));
  }

 private:
  AuxFunctional fn_;
  BinaryWord tau_;
  CNumericOptions opt_;
  int iterations_ = 0;

  [[noreturn]] void fail(double best) const {
    throw ConvergenceError("c_numeric: no convergence for " + tau_.str(), best);
  }

  AscentOutcome run(AuxState& st, int budget) {
    const AscentOutcome out = ascend(fn_, st, opt_, std::max(budget, 0));
    iterations_ += out.iterations;
    return out;
  }

  // A cell carrying a large share of the mass is a smeared interior atom.
  int find_peak(const AuxState& st) const {
    const double h = 1.0 / st.n;
    int peak = -1;
    double peak_density = opt_.atom_density_threshold;
    for (int i = 1; i + 1 < st.n; ++i) {
      const double d = st.mass[1 + i] / h;
      if (d > peak_density) {
        peak_density = d;
        peak = i;
      }
    }
    return peak;
  }

  LevelResult search(AuxState st) {
    AscentOutcome first = run(st, std::min(opt_.probe_iters, opt_.max_iters));
    int peak = find_peak(st);
    if (peak < 0 && !first.converged) {
      first = run(st, opt_.max_iters - first.iterations);
      peak = find_peak(st);
      if (peak < 0 && !first.converged) fail(first.value);
    }
    if (peak < 0) return {std::move(st), first.value};

    const int n = st.n;
    const double h = 1.0 / n;
    AuxState base = st;
    base.interior = true;
    base.mass.push_back(0.0);
    // Fold the whole bump around the peak into the atom, leaving a sliver so
    // multiplicative updates can restore it.
    int bump_lo = peak;
    int bump_hi = peak;
    while (bump_lo > 1 && st.mass[bump_lo] / h > 1.0) --bump_lo;
    while (bump_hi + 2 < n && st.mass[bump_hi + 2] / h > 1.0) ++bump_hi;
    for (int i = bump_lo; i <= bump_hi; ++i) {
      base.mass.back() += 0.99 * base.mass[1 + i];
      base.mass[1 + i] *= 0.01;
    }
    base.atom_pos = (peak + 0.5) * h;
    LevelResult out = refine_atom_bracket(base, bump_lo * h, (bump_hi + 1) * h);
    if (first.value > out.value) return {std::move(st), first.value};
    return out;
  }

  // Keeps the inherited atom position as a candidate so the result is never
  // worse than `floor`.
  LevelResult refine_atom(const AuxState& st, double floor, double radius) {
    LevelResult best{st, floor};
    LevelResult out = refine_atom_bracket(st, std::max(st.atom_pos - radius, 0.0), std::min(st.atom_pos + radius, 1.0));
    AuxState kept = st;
    const AscentOutcome stay = run(kept, opt_.max_iters);
    if (stay.value >= best.value) best = {std::move(kept), stay.value};
    if (out.value > best.value) best = std::move(out);
    return best;
  }

  // Golden-section search on the interior atom position with short ascents,
  // then a full ascent at the chosen position.
  LevelResult refine_atom_bracket(const AuxState& base, double lo, double hi) {
    const double edge = 1e-9;
    lo = std::max(lo, edge);
    hi = std::min(hi, 1.0 - edge);
    auto trial_at = [&](double z) {
      AuxState trial = base;
      trial.atom_pos = z;
      return run(trial, opt_.golden_inner_iters).value;
    };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = trial_at(x1);
    double f2 = trial_at(x2);
    for (int it = 0; it < opt_.golden_iters; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = trial_at(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = trial_at(x1);
      }
    }
    AuxState st = base;
    st.atom_pos = 0.5 * (lo + hi);
    const AscentOutcome out = run(st, opt_.max_iters);
    if (!out.converged) fail(out.value);
    return {std::move(st), out.value};
  }
};

}  // namespace

CNumericResult c_numeric(const BinaryWord& tau, int grid_n, const CNumericOptions& options) {
  require_nonconstant(tau, "c_numeric");
  if (tau.size() > 6) throw InvalidArgument("c_numeric: pattern length must be <= 6");
  if (grid_n < 50 || grid_n > 5000) throw InvalidArgument("c_numeric: grid_n must lie in [50, 5000]");
  CSolver solver(tau, options);
  LevelResult r = solver.solve(grid_n);
  return {r.value, r.state.measure(), solver.iterations()};
}

StepMeasure sublebesgue_from_aux(const StepMeasure& g, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("sublebesgue_from_aux: rho must lie in (0,1)");
  if (std::abs(g.total_mass() - 1.0) > 1e-10) {
    throw InvalidArgument("sublebesgue_from_aux: g must be a probability measure");
  }
  std::vector<Cell> cells;
  for (const auto& s : segments_of(g)) {
    const double ones = rho * s.width;
    const double width = ones + (1.0 - rho) * s.mass;
    if (width <= 0.0) continue;
    cells.push_back({width, std::clamp(ones / width, 0.0, 1.0)});
  }
  return StepMeasure(std::move(cells));
}

double extremal_1010_value(double rho1, double x) {
  if (!(rho1 > 0.0 && rho1 < 1.0)) throw InvalidArgument("extremal_1010_value: rho1 must lie in (0,1)");
  if (x < rho1 / kE) return 1.0;
  if (x > 1.0 - (1.0 - rho1) / kE) return 0.0;
  const double s = x + rho1 - 1.0;
  return 0.5 * (1.0 + std::sqrt(kE) * s / std::sqrt(4.0 * rho1 * (1.0 - rho1) + kE * s * s));
}

StepMeasure extremal_density_1010(double rho1, int grid_n) {
  if (!(rho1 > 0.0 && rho1 < 1.0)) throw InvalidArgument("extremal_density_1010: rho1 must lie in (0,1)");
  if (grid_n < 1) throw InvalidArgument("extremal_density_1010: grid_n must be positive");
  const double x1 = rho1 / kE;
  const double x2 = 1.0 - (1.0 - rho1) / kE;
  const double a = 4.0 * rho1 * (1.0 - rho1);
  const auto middle = [&](double x) {
    const double s = x + rho1 - 1.0;
    return 0.5 * x + 0.5 * std::exp(-0.5) * std::sqrt(a + kE * s * s);
  };
  // Antiderivative of f.
  const auto P = [&](double x) {
    if (x <= x1) return x;
    if (x <= x2) return x1 + middle(x) - middle(x1);
    return x1 + middle(x2) - middle(x1);
  };
  std::vector<double> values(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    const double l = static_cast<double>(i) / grid_n;
    const double r = static_cast<double>(i + 1) / grid_n;
    values[i] = std::clamp((P(r) - P(l)) * grid_n, 0.0, 1.0);
  }
  return StepMeasure::uniform_grid(values);
}

FeasibilityInterval feasible_interval(const BinaryWord& tau, double rho1, int grid_n) {
  require_nonconstant(tau, "feasible_interval");
  if (!(rho1 >= 0.0 && rho1 <= 1.0)) throw InvalidArgument("feasible_interval: rho1 must lie in [0,1]");
  FeasibilityInterval out;
  out.tau = tau;
  out.rho1 = rho1;
  out.ones = tau.ones();
  out.zeros = tau.zeros();
  if (auto c = c_closed_form(tau)) {
    out.c_value = *c;
    out.closed_form = true;
  } else {
    out.c_value = c_numeric(tau, grid_n).value;
  }
  out.upper = out.c_value * std::pow(rho1, static_cast<double>(out.ones)) *
              std::pow(1.0 - rho1, static_cast<double>(out.zeros));
  return out;
}

void write_boundary_csv(std::ostream& out, const BinaryWord& tau, double c_value, int points) {
  if (points < 1) throw InvalidArgument("write_boundary_csv: points must be positive");
  const double m = static_cast<double>(tau.ones());
  const double n = static_cast<double>(tau.zeros());
  out << "rho,upper\n";
  char buf[64];
  for (int i = 0; i <= points; ++i) {
    const double rho = static_cast<double>(i) / points;
    const double upper = c_value * std::pow(rho, m) * std::pow(1.0 - rho, n);
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", rho, upper);
    out << buf;
  }
}

namespace {

struct GridView {
  std::vector<double> left, width, value;
  // Positive cells away from the support edges: cells that straddle an edge
  // hold averages of a discontinuous density and are skipped.
  std::vector<bool> interior;
};

GridView grid_view(const StepMeasure& g) {
  GridView v;
  double x = 0.0;
  for (const auto& c : g.cells()) {
    v.left.push_back(x);
    v.width.push_back(c.width);
    v.value.push_back(c.value);
    x += c.width;
  }
  const std::size_t n = v.value.size();
  v.interior.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    v.interior[i] = v.value[i] > 0.0 && (i == 0 || v.value[i - 1] > 0.0) && (i + 1 == n || v.value[i + 1] > 0.0);
  }
  return v;
}

// Max |L(g)(a)| over midpoints of interior cells whose four neighbours are
// interior with the same width, using five-point differences.
template <class Residual>
double ode_residual(const StepMeasure& g, Residual residual) {
  const GridView v = grid_view(g);
  double worst = 0.0;
  bool any = false;
  for (std::size_t i = 2; i + 2 < v.value.size(); ++i) {
    bool ok = true;
    for (std::size_t j = i - 2; j <= i + 2; ++j) {
      if (!v.interior[j] || std::abs(v.width[j] - v.width[i]) > 1e-9 * v.width[i]) ok = false;
    }
    if (!ok) continue;
    const double h = v.width[i];
    const double* y = &v.value[i - 2];
    const double d1 = (-y[4] + 8.0 * y[3] - 8.0 * y[1] + y[0]) / (12.0 * h);
    const double d2 = (-y[4] + 16.0 * y[3] - 30.0 * y[2] + 16.0 * y[1] - y[0]) / (12.0 * h * h);
    const double a = v.left[i] + 0.5 * h;
    worst = std::max(worst, std::abs(residual(a, y[2], d1, d2)));
    any = true;
  }
  if (!any) throw InvalidArgument("euler_lagrange_residual: density part has no interior support");
  return worst;
}

}  // namespace

double euler_lagrange_residual(const BinaryWord& tau, const StepMeasure& g) {
  const std::string s = tau.str();
  if (s == "1010") {
    // On the support, G(a) = G(1) - c/a with c = (1/2) int x dg.
    double first_moment = 0.0;
    for (const auto& atom : g.atoms()) first_moment += atom.position * atom.mass;
    const GridView v = grid_view(g);
    for (std::size_t i = 0; i < v.value.size(); ++i) {
      const double l = v.left[i];
      const double r = l + v.width[i];
      first_moment += v.value[i] * 0.5 * (r * r - l * l);
    }
    const double c = 0.5 * first_moment;
    const double total = g.total_mass();
    const DistributionFunction G(g);
    double worst = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < v.value.size(); ++i) {
      if (!v.interior[i]) continue;
      for (double frac : {0.0, 0.25, 0.5, 0.75}) {
        const double a = v.left[i] + frac * v.width[i];
        if (a <= 0.0) continue;
        worst = std::max(worst, std::abs(G(a) - total + c / a));
        any = true;
      }
    }
    if (!any) throw InvalidArgument("euler_lagrange_residual: density part has no interior support");
    return worst;
  }
  if (s == "11010") {
    return ode_residual(g, [](double a, double y, double d1, double d2) {
      return 2.0 * a * a * d2 + 12.0 * a * d1 + 14.0 * y;
    });
  }
  if (s == "10101") {
    return ode_residual(g, [](double a, double y, double d1, double) {
      return 2.0 * a * (1.0 - a) * d1 + (4.0 - 8.0 * a) * y;
    });
  }
  if (s == "10110") {
    double density_mass = 0.0;
    for (const auto& c : g.cells()) density_mass += c.width * c.value;
    return density_mass;
  }
  throw InvalidArgument("euler_lagrange_residual: unsupported pattern " + s);
}

}  // namespace binpat
