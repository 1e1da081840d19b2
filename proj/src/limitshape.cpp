#include "binpat/limitshape.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "binpat/error.hpp"
#include "binpat/quadrature.hpp"

namespace binpat {

namespace {

QuadratureOptions quad_options(const LimitShapeOptions& o) {
  QuadratureOptions q;
  q.rel_tol = o.quad_rel_tol;
  q.abs_tol = 1e-16;
  return q;
}

// H' - 1 = e^p / (1 - e^p)
double excess(double p) { return std::exp(p) / -std::expm1(p); }

// e^p / (1 - e^p)^2, the derivative of H' in p.
double excess_slope(double p) {
  const double d = std::expm1(p);
  return std::exp(p) / (d * d);
}

double ipow(double y, int i) {
  double r = 1.0;
  for (int k = 0; k < i; ++k) r *= y;
  return r;
}

void require_valid(const ExpPolynomial& p) {
  if (p.coeffs.empty()) throw InvalidArgument("ExpPolynomial: no coefficients");
  for (double a : p.coeffs) {
    if (!std::isfinite(a)) throw InvalidArgument("ExpPolynomial: non-finite coefficient");
  }
  if (!(p.coeffs[0] < 0.0)) throw InfeasibleExponent("ExpPolynomial: constant coefficient must be negative");
}

// First y in (0, 1] with p(y) >= level, or 1 if there is none.
double first_crossing(const ExpPolynomial& p, double level) {
  constexpr int kScan = 4096;
  double prev = 0.0;
  for (int j = 1; j <= kScan; ++j) {
    const double y = static_cast<double>(j) / kScan;
    if (p(y) >= level) {
      double lo = prev, hi = y;
      for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        (p(mid) >= level ? hi : lo) = mid;
      }
      return hi;
    }
    prev = y;
  }
  return 1.0;
}

// rho_1: the root of I(r) = r + int_0^r (H'-1) = 1. The search is confined to
// where 1 - e^p stays above the boundary gap; a root beyond that point is
// reported as infeasible.
double solve_rho(const ExpPolynomial& p, const LimitShapeOptions& o) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const auto q = quad_options(o);
  auto h = [&p](double y) { return excess(p(y)); };
  double hi = first_crossing(p, std::log1p(-o.boundary_gap));
  double ihi = std::numeric_limits<double>::infinity();
  if (hi < 1.0) {
    ihi = hi + integrate(h, 0.0, hi, q);
    if (!(ihi > 1.0)) throw InfeasibleExponent("phi_forward: 1 - e^p vanishes at rho_1 (boundary shape)");
  }
  double lo = 0.0, ilo = 0.0;
  int overshoots = 0;
  for (int it = 0; it < 200; ++it) {
    // Newton from below, then secant, then bisection.
    double r = lo + (1.0 - ilo) / (1.0 + h(lo));
    if (r - lo <= 2.0 * eps * std::max(r, 1e-300)) return r;
    if (!(r < hi)) r = std::isfinite(ihi) ? lo + (hi - lo) * (1.0 - ilo) / (ihi - ilo) : 0.5 * (lo + hi);
    if (!(r > lo && r < hi) || overshoots >= 2) r = 0.5 * (lo + hi);
    const double ir = ilo + (r - lo) + integrate(h, lo, r, q);
    if (std::abs(ir - 1.0) <= 4.0 * eps) return r;
    if (ir > 1.0) {
      hi = r;
      ihi = ir;
      ++overshoots;
    } else {
      lo = r;
      ilo = ir;
      overshoots = 0;
    }
    if (hi - lo <= 2.0 * eps * hi) return lo;
  }
  return lo;
}

}  // namespace

double ExpPolynomial::operator()(double y) const noexcept {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * y + *it;
  return v;
}

DensityTargets DensityTargets::parse(std::string_view text) {
  DensityTargets t;
  bool have_rho1 = false;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidArgument("targets: expected name=value, got " + std::string(item));
    std::string_view name = item.substr(0, eq);
    std::string_view num = item.substr(eq + 1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    while (!num.empty() && num.front() == ' ') num.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(num.data(), num.data() + num.size(), value);
    if (res.ec != std::errc{} || res.ptr != num.data() + num.size()) {
      throw InvalidArgument("targets: bad number " + std::string(num));
    }
    if (name.substr(0, 3) != "rho") throw InvalidArgument("targets: unknown name " + std::string(name));
    const std::string_view word = name.substr(3);
    if (word == "1") {
      t.rho1 = value;
      have_rho1 = true;
    } else if (word == "0") {
      t.rho1 = 1.0 - value;
      have_rho1 = true;
    } else {
      const auto ones = word.find_first_not_of('1');
      if (word.size() < 2 || ones != word.size() - 1 || word.back() != '0') {
        throw InvalidArgument("targets: only rho1, rho0 and rho1..10 are supported, got " + std::string(name));
      }
      t.ones_then_zero[static_cast<int>(ones)] = value;
    }
  }
  if (!have_rho1) throw InvalidArgument("targets: rho1 (or rho0) is required");
  return t;
}

double shannon(double p) noexcept {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

double entropy(const StepMeasure& mu) {
  mu.require_sublebesgue("entropy");
  double s = 0.0;
  for (const auto& c : mu.cells()) s += c.width * shannon(c.value);
  return s;
}

PhiResult phi_forward(const ExpPolynomial& p, const LimitShapeOptions& options) {
  require_valid(p);
  const double rho = solve_rho(p, options);
  const double gap = -std::expm1(p(rho));
  if (!(gap > options.boundary_gap)) {
    throw InfeasibleExponent("phi_forward: 1 - e^p vanishes at rho_1 (boundary shape)");
  }
  const auto q = quad_options(options);
  PhiResult out;
  out.rho1 = rho;
  out.boundary_gap = gap;
  const int k = static_cast<int>(p.degree());
  out.densities.assign(k + 1, 0.0);
  out.densities[0] = 1.0 - rho;
  for (int i = 1; i <= k; ++i) {
    out.densities[i] = (i + 1) * integrate([&](double y) { return ipow(y, i) * excess(p(y)); }, 0.0, rho, q);
  }
  return out;
}

Eigen::MatrixXd phi_jacobian(const ExpPolynomial& p, const LimitShapeOptions& options) {
  const PhiResult phi = phi_forward(p, options);
  const double rho = phi.rho1;
  const double c = 1.0 - phi.boundary_gap;  // e^{p(rho)}
  const auto q = quad_options(options);
  const int k = static_cast<int>(p.degree());
  Eigen::MatrixXd jac(k + 1, k + 1);
  for (int i = 0; i <= k; ++i) {
    const double rho_i = ipow(rho, i);
    for (int j = 0; j <= k; ++j) {
      jac(i, j) = (i + 1) * integrate(
                                [&](double y) { return ipow(y, j) * excess_slope(p(y)) * (ipow(y, i) - rho_i * c); },
                                0.0, rho, q);
    }
  }
  return jac;
}

StepMeasure reconstruct_density(const ExpPolynomial& p, const LimitShapeOptions& options) {
  if (options.grid < 1) throw InvalidArgument("reconstruct_density: grid must be positive");
  const PhiResult phi = phi_forward(p, options);
  const auto q = quad_options(options);
  const double max_width = 1.0 / options.grid;
  auto h = [&p](double y) { return excess(p(y)); };

  std::vector<Cell> cells;
  cells.reserve(2 * options.grid);
  // Each y-cell maps to an x-cell of width dy + int h with average f = dy / width.
  auto emit = [&](auto&& self, double y0, double y1, int depth) -> void {
    const double dy = y1 - y0;
    const double w = dy + integrate(h, y0, y1, q);
    if (w > max_width * (1.0 + 1e-12) && depth < 30) {
      const int parts = std::max(2, static_cast<int>(std::ceil(w / max_width)));
      for (int j = 0; j < parts; ++j) {
        self(self, y0 + dy * j / parts, j + 1 == parts ? y1 : y0 + dy * (j + 1) / parts, depth + 1);
      }
      return;
    }
    cells.push_back({w, dy / w});
  };
  const int n = options.grid;
  for (int j = 0; j < n; ++j) {
    emit(emit, phi.rho1 * j / n, j + 1 == n ? phi.rho1 : phi.rho1 * (j + 1) / n, 0);
  }
  double total = 0.0;
  for (const auto& c : cells) total += c.width;
  // int_0^rho H' = 1 up to quadrature error; absorb it so the cells tile [0,1].
  for (auto& c : cells) {
    c.width /= total;
    c.value = std::min(1.0, c.value * total);
  }
  return StepMeasure(std::move(cells));
}

double shape_entropy(const ExpPolynomial& p, const LimitShapeOptions& options) {
  const PhiResult phi = phi_forward(p, options);
  // S(f) dx with f = 1/H', dx = H' dy is log H' - p (H'-1).
  auto integrand = [&p](double y) {
    const double v = p(y);
    return -std::log(-std::expm1(v)) - v * excess(v);
  };
  return integrate(integrand, 0.0, phi.rho1, quad_options(options));
}

BinaryWord ones_then_zero(int i) {
  if (i < 0) throw InvalidArgument("ones_then_zero: negative exponent");
  BinaryWord w = BinaryWord::repeated(1, static_cast<std::size_t>(i));
  w.push_back(0);
  return w;
}

std::vector<std::pair<BinaryWord, double>> lagrange_multipliers(const ExpPolynomial& p,
                                                               const std::vector<int>& indices,
                                                               const LimitShapeOptions& options) {
  const PhiResult phi = phi_forward(p, options);
  std::vector<std::pair<BinaryWord, double>> out;
  out.emplace_back(BinaryWord::parse("1"), std::log(phi.boundary_gap) - p.coeffs[0]);
  for (int i : indices) {
    if (i < 1) throw InvalidArgument("lagrange_multipliers: indices must be >= 1");
    const double a = static_cast<std::size_t>(i) < p.coeffs.size() ? p.coeffs[i] : 0.0;
    out.emplace_back(ones_then_zero(i), a / (i + 1));
  }
  return out;
}

namespace {

constexpr int kIterationBudget = 5000;

struct Stage {
  bool converged = false;
  bool hit_cap = false;
  int iterations = 0;
  // Some damped step left the region where 1 - e^p > near_boundary_gap.
  bool blocked = false;
};

class Solver {
 public:
  Solver(const DensityTargets& t, const LimitShapeOptions& o) : opt_(o), inner_(o) {
    inner_.boundary_gap = std::max(o.boundary_gap, o.near_boundary_gap);
    if (!(t.rho1 > 0.0 && t.rho1 < 1.0)) throw InvalidArgument("solve_limit_shape: rho1 must lie in (0,1)");
    free_.push_back(0);
    target_.push_back(1.0 - t.rho1);
    for (const auto& [i, v] : t.ones_then_zero) {
      if (i < 1) throw InvalidArgument("solve_limit_shape: pattern index must be >= 1");
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("solve_limit_shape: targets must lie in [0,1]");
      free_.push_back(i);
      target_.push_back(v);
    }
    degree_ = free_.back();
  }

  LimitShape run() {
    ExpPolynomial p;
    p.coeffs.assign(degree_ + 1, 0.0);
    p.coeffs[0] = std::log(1.0 - (1.0 - target_[0]));
    const Eigen::VectorXd start = restrict(phi_forward(p, opt_));
    const Eigen::VectorXd goal = Eigen::Map<const Eigen::VectorXd>(target_.data(), target_.size());

    double s = 0.0, ds = 1.0;
    int total_iters = 0;
    while (s < 1.0) {
      const double s_try = std::min(1.0, s + ds);
      const Eigen::VectorXd t = start + s_try * (goal - start);
      ExpPolynomial trial = p;
      const Stage st = newton(trial, t, s_try == 1.0 ? opt_.newton_tol : opt_.stage_tol);
      total_iters += st.iterations;
      if (st.converged) {
        p = std::move(trial);
        s = s_try;
        ds = std::min(1.0, 2.0 * ds);
        continue;
      }
      ds = 0.5 * (s_try - s);
      if (total_iters > kIterationBudget) {
        throw ConvergenceError("solve_limit_shape: Newton iteration budget exhausted", s);
      }
      // Newton keeps pushing into the boundary layer even after the homotopy
      // step has been refined ten times: the targets are not interior.
      const bool near = st.blocked && ds < 1.0 / 1024;
      if (st.hit_cap || ds < opt_.min_homotopy_step || near) boundary(p, s);
    }

    LimitShape out;
    const PhiResult phi = phi_forward(p, opt_);
    out.rho1 = phi.rho1;
    out.densities = phi.densities;
    out.f = reconstruct_density(p, opt_);
    out.entropy = shape_entropy(p, opt_);
    out.newton_iterations = total_iters;
    double resid = std::abs(density_of_measure(BinaryWord::parse("1"), out.f) - (1.0 - target_[0]));
    for (std::size_t j = 1; j < free_.size(); ++j) {
      resid = std::max(resid, std::abs(density_of_measure(ones_then_zero(free_[j]), out.f) - target_[j]));
    }
    out.reconstruction_residual = resid;
    out.p = std::move(p);
    return out;
  }

 private:
  LimitShapeOptions opt_;
  // Same options with the boundary gap raised to near_boundary_gap.
  LimitShapeOptions inner_;
  std::vector<int> free_;
  std::vector<double> target_;
  int degree_ = 0;

  Eigen::VectorXd restrict(const PhiResult& phi) const {
    Eigen::VectorXd v(free_.size());
    for (std::size_t j = 0; j < free_.size(); ++j) v[j] = phi.densities[free_[j]];
    return v;
  }

  void set_free(ExpPolynomial& p, const Eigen::VectorXd& a) const {
    for (std::size_t j = 0; j < free_.size(); ++j) p.coeffs[free_[j]] = a[j];
  }

  Eigen::VectorXd get_free(const ExpPolynomial& p) const {
    Eigen::VectorXd a(free_.size());
    for (std::size_t j = 0; j < free_.size(); ++j) a[j] = p.coeffs[free_[j]];
    return a;
  }

  Stage newton(ExpPolynomial& p, const Eigen::VectorXd& t, double tol) const {
    Stage st;
    PhiResult phi = phi_forward(p, inner_);
    Eigen::VectorXd r = restrict(phi) - t;
    // Targets are resolved only to about eps / gap.
    auto floor_of = [tol](const PhiResult& f) {
      return std::max(tol, std::numeric_limits<double>::epsilon() / f.boundary_gap);
    };
    double reachable = floor_of(phi);
    // Residual three iterations ago; a stage that cannot halve it is abandoned.
    std::vector<double> history;
    for (; st.iterations < opt_.max_newton; ++st.iterations) {
      const double rn = r.lpNorm<Eigen::Infinity>();
      if (rn <= reachable) {
        st.converged = true;
        return st;
      }
      history.push_back(rn);
      if (history.size() > 3 && rn > 0.5 * history[history.size() - 4] && rn > opt_.stage_tol) return st;
      const Eigen::MatrixXd full = phi_jacobian(p, inner_);
      Eigen::MatrixXd jac(free_.size(), free_.size());
      for (std::size_t i = 0; i < free_.size(); ++i) {
        for (std::size_t j = 0; j < free_.size(); ++j) jac(i, j) = full(free_[i], free_[j]);
      }
      const Eigen::VectorXd delta = jac.fullPivLu().solve(r);
      const Eigen::VectorXd a = get_free(p);
      double lambda = 1.0;
      bool accepted = false;
      const double step_floor = 1e-14 * std::max(1.0, a.lpNorm<Eigen::Infinity>());
      for (int h = 0; h <= opt_.max_halvings && lambda * delta.lpNorm<Eigen::Infinity>() > step_floor;
           ++h, lambda *= 0.5) {
        const Eigen::VectorXd a_new = a - lambda * delta;
        if (a_new.lpNorm<Eigen::Infinity>() > opt_.coeff_cap) {
          st.hit_cap = true;
          continue;
        }
        ExpPolynomial trial = p;
        set_free(trial, a_new);
        PhiResult phi_new;
        try {
          phi_new = phi_forward(trial, inner_);
        } catch (const InfeasibleExponent&) {
          st.blocked = true;
          continue;
        }
        Eigen::VectorXd r_new = restrict(phi_new) - t;
        if (r_new.norm() < r.norm()) {
          p = std::move(trial);
          r = std::move(r_new);
          reachable = floor_of(phi_new);
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        // No decrease along the Newton direction: the residual is at the
        // quadrature noise floor, which grows like eps / gap near the boundary.
        st.converged = r.lpNorm<Eigen::Infinity>() <= std::max(100.0 * tol, opt_.stage_tol);
        return st;
      }
      st.hit_cap = false;
    }
    st.converged = r.lpNorm<Eigen::Infinity>() <= reachable;
    return st;
  }

  [[noreturn]] void boundary(const ExpPolynomial& p, double progress) const {
    BoundaryShape shape;
    shape.last = p;
    shape.progress = progress;
    LimitShapeOptions coarse = opt_;
    coarse.grid = 400;
    try {
      const StepMeasure f = reconstruct_density(p, coarse);
      for (const auto& c : f.cells()) {
        const double v = c.value >= 0.5 ? 1.0 : 0.0;
        if (!shape.steps.empty() && shape.steps.back().value == v) {
          shape.steps.back().width += c.width;
        } else {
          shape.steps.push_back({c.width, v});
          if (v == 0.0) ++shape.zero_intervals;
        }
      }
    } catch (const std::exception&) {
      // Leave the step description empty if even the last iterate is degenerate.
    }
    throw BoundaryReached("solve_limit_shape: targets reach the boundary of the feasible region", std::move(shape));
  }
};

}  // namespace

LimitShape solve_limit_shape(const DensityTargets& targets, const LimitShapeOptions& options) {
  Solver solver(targets, options);
  return solver.run();
}

}  // namespace binpat
