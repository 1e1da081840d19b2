#include "binpat/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "binpat/error.hpp"
#include "binpat/patterns.hpp"
#include "binpat/random.hpp"

namespace binpat {

namespace {

constexpr double kMergeTol = 1e-12;
constexpr double kWidthTol = 1e-9;

double abs_linear_integral(double d0, double slope, double len) {
  const double d1 = d0 + slope * len;
  if (d0 * d1 >= 0.0) return 0.5 * len * (std::abs(d0) + std::abs(d1));
  const double t = -d0 / slope;
  return 0.5 * t * std::abs(d0) + 0.5 * (len - t) * std::abs(d1);
}

}  // namespace

StepMeasure::StepMeasure(std::vector<Cell> cells, std::vector<Atom> atoms) {
  double total = 0.0;
  for (const auto& c : cells) {
    if (!(c.width >= 0.0) || !std::isfinite(c.width)) throw InvalidArgument("StepMeasure: negative cell width");
    if (!(c.value >= 0.0) || !std::isfinite(c.value)) throw InvalidArgument("StepMeasure: negative cell value");
    total += c.width;
  }
  if (std::abs(total - 1.0) > kWidthTol) throw InvalidArgument("StepMeasure: cell widths must sum to 1");

  for (const auto& c : cells) {
    if (c.width == 0.0) continue;
    if (!cells_.empty() && std::abs(cells_.back().value - c.value) <= kMergeTol) {
      auto& last = cells_.back();
      const double w = last.width + c.width;
      last.value = (last.value * last.width + c.value * c.width) / w;
      last.width = w;
    } else {
      cells_.push_back(c);
    }
  }
  if (cells_.empty()) throw InvalidArgument("StepMeasure: no cells");
  // Absorb rounding in the total width into the last cell.
  const double sum = std::accumulate(cells_.begin(), cells_.end(), 0.0,
                                     [](double s, const Cell& c) { return s + c.width; });
  cells_.back().width += 1.0 - sum;

  edges_.resize(cells_.size() + 1);
  edges_[0] = 0.0;
  for (std::size_t i = 0; i < cells_.size(); ++i) edges_[i + 1] = edges_[i] + cells_[i].width;
  edges_.back() = 1.0;

  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.position < b.position; });
  for (const auto& a : atoms) {
    if (!(a.position >= 0.0 && a.position <= 1.0)) throw InvalidArgument("StepMeasure: atom outside [0,1]");
    if (!(a.mass >= 0.0)) throw InvalidArgument("StepMeasure: negative atom mass");
    if (a.mass == 0.0) continue;
    if (!atoms_.empty() && atoms_.back().position == a.position) {
      atoms_.back().mass += a.mass;
    } else {
      atoms_.push_back(a);
    }
  }
}

StepMeasure StepMeasure::uniform_grid(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("uniform_grid: no values");
  std::vector<Cell> cells;
  cells.reserve(values.size());
  const double h = 1.0 / static_cast<double>(values.size());
  for (double v : values) cells.push_back({h, v});
  return StepMeasure(std::move(cells));
}

StepMeasure StepMeasure::constant(double value) { return StepMeasure({{1.0, value}}); }

bool StepMeasure::is_sublebesgue() const noexcept {
  if (has_atoms()) return false;
  return std::all_of(cells_.begin(), cells_.end(), [](const Cell& c) { return c.value <= 1.0 + kMergeTol; });
}

void StepMeasure::require_sublebesgue(const char* where) const {
  if (has_atoms()) throw InvalidArgument(std::string(where) + ": measure has atoms");
  if (!is_sublebesgue()) throw InvalidArgument(std::string(where) + ": density exceeds 1");
}

double StepMeasure::total_mass() const noexcept {
  double s = 0.0;
  for (const auto& c : cells_) s += c.width * c.value;
  for (const auto& a : atoms_) s += a.mass;
  return s;
}

double StepMeasure::value_at(double x) const noexcept {
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  std::size_t idx = it == edges_.begin() ? 0 : static_cast<std::size_t>(it - edges_.begin()) - 1;
  return cells_[std::min(idx, cells_.size() - 1)].value;
}

std::vector<double> StepMeasure::breakpoints() const {
  std::vector<double> pts = edges_;
  for (const auto& a : atoms_) pts.push_back(a.position);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

StepMeasure StepMeasure::complement_reflected() const {
  require_sublebesgue("complement_reflected");
  std::vector<Cell> out(cells_.rbegin(), cells_.rend());
  for (auto& c : out) c.value = std::clamp(1.0 - c.value, 0.0, 1.0);
  return StepMeasure(std::move(out));
}

// -- distribution function ---------------------------------------------------

DistributionFunction::DistributionFunction(const StepMeasure& mu) {
  knots_ = mu.breakpoints();
  const auto& atoms = mu.atoms();
  values_.resize(knots_.size());
  slopes_.resize(knots_.size());
  std::size_t atom_idx = 0;
  double f = 0.0;
  for (std::size_t k = 0; k < knots_.size(); ++k) {
    if (k > 0) f += slopes_[k - 1] * (knots_[k] - knots_[k - 1]);
    while (atom_idx < atoms.size() && atoms[atom_idx].position <= knots_[k]) f += atoms[atom_idx++].mass;
    values_[k] = f;
    slopes_[k] = k + 1 < knots_.size() ? mu.value_at(0.5 * (knots_[k] + knots_[k + 1])) : 0.0;
  }
}

std::size_t DistributionFunction::interval(double x) const noexcept {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  return it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
}

double DistributionFunction::operator()(double x) const noexcept {
  if (x < 0.0) return 0.0;
  if (x >= 1.0) return values_.back();
  const std::size_t k = interval(x);
  return values_[k] + slopes_[k] * (x - knots_[k]);
}

double DistributionFunction::slope_at(double x) const noexcept {
  return slopes_[std::min(interval(x), slopes_.size() - 1)];
}

double DistributionFunction::inverse(double y) const noexcept {
  if (y <= values_.front()) return 0.0;
  if (y >= values_.back()) {
    // First knot reaching the total.
    auto it = std::lower_bound(values_.begin(), values_.end(), values_.back());
    const std::size_t k = static_cast<std::size_t>(it - values_.begin());
    if (k > 0 && slopes_[k - 1] > 0.0) {
      const double left_limit = values_[k - 1] + slopes_[k - 1] * (knots_[k] - knots_[k - 1]);
      if (left_limit >= y) return knots_[k - 1] + (y - values_[k - 1]) / slopes_[k - 1];
    }
    return knots_[k];
  }
  auto it = std::lower_bound(values_.begin(), values_.end(), y);
  const std::size_t k = static_cast<std::size_t>(it - values_.begin());
  const double left_limit = values_[k - 1] + slopes_[k - 1] * (knots_[k] - knots_[k - 1]);
  if (slopes_[k - 1] > 0.0 && left_limit >= y) {
    return std::min(knots_[k], knots_[k - 1] + (y - values_[k - 1]) / slopes_[k - 1]);
  }
  return knots_[k];
}

// -- operations ---------------------------------------------------------------

StepMeasure measure_of_word(const BinaryWord& host) {
  if (host.empty()) throw InvalidArgument("measure_of_word: empty word");
  std::vector<double> values(host.size());
  for (std::size_t i = 0; i < host.size(); ++i) values[i] = host[i];
  return StepMeasure::uniform_grid(values);
}

double wasserstein(const StepMeasure& mu1, const StepMeasure& mu2) {
  const DistributionFunction F1(mu1), F2(mu2);
  std::vector<double> grid = F1.knots();
  grid.insert(grid.end(), F2.knots().begin(), F2.knots().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double a = grid[k], b = grid[k + 1];
    if (b <= a) continue;
    const double mid = 0.5 * (a + b);
    const double d0 = F1(a) - F2(a);
    const double slope = F1.slope_at(mid) - F2.slope_at(mid);
    total += abs_linear_integral(d0, slope, b - a);
  }
  return total;
}

double density_of_measure(const BinaryWord& pattern, const StepMeasure& mu) {
  if (pattern.empty()) throw InvalidArgument("density_of_measure: empty pattern");
  if (pattern.size() > kMaxPatternLength) throw InvalidArgument("density_of_measure: pattern length exceeds 8");
  mu.require_sublebesgue("density_of_measure");
  const std::size_t k = pattern.size();
  // alpha[j] = measure of ordered placements of the first j letters so far.
  std::vector<double> alpha(k + 1, 0.0), next(k + 1);
  alpha[0] = 1.0;
  for (const auto& cell : mu.cells()) {
    const double h = cell.width;
    const double v = std::min(cell.value, 1.0);
    next = alpha;
    for (std::size_t j = 0; j < k; ++j) {
      if (alpha[j] == 0.0) continue;
      // A run of c letters inside one cell: volume h^c / c! times letter weights.
      double weight = 1.0;
      for (std::size_t c = 1; j + c <= k; ++c) {
        weight *= h / static_cast<double>(c) * (pattern[j + c - 1] ? v : 1.0 - v);
        next[j + c] += alpha[j] * weight;
      }
    }
    alpha.swap(next);
  }
  double factorial = 1.0;
  for (std::size_t i = 2; i <= k; ++i) factorial *= static_cast<double>(i);
  return factorial * alpha[k];
}

double moment(const StepMeasure& mu, int n) {
  double s = 0.0, a = 0.0;
  for (const auto& c : mu.cells()) {
    const double b = a + c.width;
    s += c.value * (std::pow(b, n + 1) - std::pow(a, n + 1)) / (n + 1);
    a = b;
  }
  for (const auto& atom : mu.atoms()) s += atom.mass * std::pow(atom.position, n);
  return s;
}

std::vector<MomentCheck> moments_identity_check(const StepMeasure& mu, int n_max, double tol) {
  if (n_max < 0 || n_max > 6) throw InvalidArgument("moments_identity_check: n_max must be in [0, 6]");
  std::vector<MomentCheck> out;
  const auto one = BinaryWord::parse("1");
  for (int n = 0; n <= n_max; ++n) {
    double sum = 0.0;
    for (const auto& w : all_words(static_cast<std::size_t>(n))) sum += density_of_measure(w + one, mu);
    const double via = sum / (n + 1);
    const double direct = moment(mu, n);
    out.push_back({n, direct, via, std::abs(direct - via) <= tol});
  }
  return out;
}

ConvergenceReport word_convergence_check(std::span<const BinaryWord> hosts, const StepMeasure& mu,
                                         std::span<const BinaryWord> patterns, double tolerance) {
  ConvergenceReport report;
  std::vector<double> limits;
  for (const auto& w : patterns) limits.push_back(density_of_measure(w, mu));
  for (const auto& x : hosts) {
    ConvergenceRow row{x.size(), wasserstein(measure_of_word(x), mu), {}};
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      row.density_errors.push_back(std::abs(density(patterns[i], x) - limits[i]));
    }
    report.rows.push_back(std::move(row));
  }
  auto decreasing = [&](auto get) {
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
      if (get(report.rows[i]) > get(report.rows[i - 1]) + tolerance) return false;
    }
    return report.rows.empty() || get(report.rows.back()) <= get(report.rows.front()) + tolerance;
  };
  bool ok = decreasing([](const ConvergenceRow& r) { return r.wasserstein; });
  for (std::size_t p = 0; p < patterns.size() && ok; ++p) {
    ok = decreasing([p](const ConvergenceRow& r) { return r.density_errors[p]; });
  }
  report.jointly_decreasing = ok;
  return report;
}

BinaryWord round_word(const StepMeasure& mu, std::size_t n) {
  mu.require_sublebesgue("round_word");
  if (n == 0) throw InvalidArgument("round_word: n must be positive");
  const DistributionFunction F(mu);
  BinaryWord out;
  const double dn = static_cast<double>(n);
  long prev = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    const long cur = std::lround(dn * F(static_cast<double>(i) / dn));
    const std::uint8_t symbol = cur > prev ? 1 : 0;
    out.push_back(symbol);
    prev += symbol;
  }
  return out;
}

BinaryWord sample_word(const StepMeasure& mu, std::size_t n, std::mt19937_64& rng) {
  mu.require_sublebesgue("sample_word");
  BinaryWord out;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = mu.value_at((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    out.push_back(uniform01(rng) < p ? 1 : 0);
  }
  return out;
}

nlohmann::json to_json(const StepMeasure& mu) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : mu.cells()) cells.push_back({{"w", c.width}, {"v", c.value}});
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({{"x", a.position}, {"m", a.mass}});
  return {{"cells", std::move(cells)}, {"atoms", std::move(atoms)}};
}

StepMeasure measure_from_json(const nlohmann::json& j) {
  try {
    std::vector<Cell> cells;
    for (const auto& c : j.at("cells")) cells.push_back({c.at("w").get<double>(), c.at("v").get<double>()});
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
      for (const auto& a : j.at("atoms")) atoms.push_back({a.at("x").get<double>(), a.at("m").get<double>()});
    }
    return StepMeasure(std::move(cells), std::move(atoms));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("measure JSON: ") + e.what());
  }
}

void write_curve_csv(std::ostream& out, const StepMeasure& mu, int grid_n) {
  if (grid_n < 1) throw InvalidArgument("write_curve_csv: grid must be positive");
  const DistributionFunction F(mu);
  char buf[96];
  out << "x,F,f\n";
  for (int i = 0; i <= grid_n; ++i) {
    const double x = static_cast<double>(i) / grid_n;
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", x, F(x), mu.value_at(x));
    out << buf;
  }
}

}  // namespace binpat
