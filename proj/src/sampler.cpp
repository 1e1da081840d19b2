#include "binpat/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>

#include "binpat/limitshape.hpp"
#include "binpat/parallel.hpp"
#include "binpat/patterns.hpp"
#include "binpat/random.hpp"

namespace binpat {

namespace {

constexpr std::uint64_t kDriftInterval = 10000;
constexpr std::size_t kMaxGibbsPatterns = 4;
constexpr std::size_t kMaxGibbsPatternLength = 5;

double binomial_double(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 0; i < k; ++i) r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return r;
}

BinaryWord random_word(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  return BinaryWord(std::move(bits));
}

}  // namespace

void GibbsSpec::validate() const {
  if (n < 8) throw InvalidArgument("GibbsSpec: n must be at least 8");
  if (patterns.size() > kMaxGibbsPatterns) throw InvalidArgument("GibbsSpec: at most 4 patterns");
  if (multipliers.size() != patterns.size()) throw InvalidArgument("GibbsSpec: one multiplier per pattern");
  for (const auto& w : patterns) {
    if (w.empty() || w.size() > kMaxGibbsPatternLength) throw InvalidArgument("GibbsSpec: pattern length must be in [1, 5]");
  }
  for (double a : multipliers) {
    if (!std::isfinite(a)) throw InvalidArgument("GibbsSpec: multipliers must be finite");
  }
  if (sweeps == 0 || record_every == 0) throw InvalidArgument("GibbsSpec: sweeps and record_every must be positive");
  if (!(flip_fraction > 0.0 && flip_fraction <= 1.0)) throw InvalidArgument("GibbsSpec: flip_fraction must be in (0, 1]");
  if (initial && initial->size() != n) throw InvalidArgument("GibbsSpec: initial word has the wrong length");
  if (reference) reference->require_sublebesgue("GibbsSpec reference");
}

GibbsChain::GibbsChain(const GibbsSpec& spec) : n_(spec.n), flip_fraction_(spec.flip_fraction), rng_(spec.seed) {
  spec.validate();
  const BinaryWord start = spec.initial ? *spec.initial : random_word(rng_, n_);
  // A chain with no constraint still needs the host; track "1" with weight 0.
  if (spec.patterns.empty()) {
    trackers_.emplace_back(BinaryWord::parse("1"), start);
  }
  for (const auto& w : spec.patterns) trackers_.emplace_back(w, start);
  binom_.resize(trackers_.size());
  for (std::size_t i = 0; i < trackers_.size(); ++i) binom_[i] = binomial_double(n_, trackers_[i].pattern().size());
  set_multipliers(spec.multipliers);
  slot_.resize(n_);
  for (std::size_t t = 0; t < n_; ++t) {
    auto& list = start[t] ? ones_ : zeros_;
    slot_[t] = list.size();
    list.push_back(t);
  }
}

void GibbsChain::set_multipliers(const std::vector<double>& a) {
  scale_.assign(trackers_.size(), 0.0);
  if (a.empty()) return;
  if (a.size() != trackers_.size()) throw InvalidArgument("GibbsChain: one multiplier per pattern");
  for (std::size_t i = 0; i < a.size(); ++i) scale_[i] = static_cast<double>(n_) * a[i] / binom_[i];
}

std::vector<double> GibbsChain::densities() const {
  std::vector<double> r(trackers_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<double>(trackers_[i].count()) / binom_[i];
  return r;
}

void GibbsChain::check_drift() const {
  const BinaryWord host = word();
  for (const auto& tr : trackers_) {
    if (tr.count() != count_pattern_i64(tr.pattern(), host)) {
      throw std::logic_error("GibbsChain: incremental count of " + tr.pattern().str() + " drifted");
    }
  }
}

void GibbsChain::apply(std::size_t t) {
  const std::uint8_t from = trackers_.front().symbol(t);
  for (auto& tr : trackers_) tr.flip(t);
  auto& src = from ? ones_ : zeros_;
  auto& dst = from ? zeros_ : ones_;
  const std::size_t back = src.back();
  src[slot_[t]] = back;
  slot_[back] = slot_[t];
  src.pop_back();
  slot_[t] = dst.size();
  dst.push_back(t);
}

bool GibbsChain::metropolis(double log_ratio) {
  return log_ratio >= 0.0 || uniform01(rng_) < std::exp(log_ratio);
}

bool GibbsChain::step() {
  bool accepted = false;
  if (flip_fraction_ >= 1.0 || uniform01(rng_) < flip_fraction_) {
    const std::size_t t = uniform_index(rng_, n_);
    double lr = 0.0;
    for (std::size_t i = 0; i < trackers_.size(); ++i) {
      if (scale_[i] != 0.0) lr += scale_[i] * static_cast<double>(trackers_[i].flip_delta(t));
    }
    if (metropolis(lr)) {
      apply(t);
      accepted = true;
    }
  } else if (!ones_.empty() && !zeros_.empty()) {
    // Exchange a uniformly chosen 1 with a uniformly chosen 0; the reverse
    // move has the same probability since the counts of 1s and 0s are kept.
    const std::size_t i = ones_[uniform_index(rng_, ones_.size())];
    const std::size_t j = zeros_[uniform_index(rng_, zeros_.size())];
    double lr = 0.0;
    for (std::size_t k = 0; k < trackers_.size(); ++k) {
      if (scale_[k] == 0.0) continue;
      auto& tr = trackers_[k];
      const std::int64_t before = tr.count();
      tr.flip(i);
      const std::int64_t d = tr.count() - before + tr.flip_delta(j);
      tr.flip(i);
      lr += scale_[k] * static_cast<double>(d);
    }
    if (metropolis(lr)) {
      apply(i);
      apply(j);
      accepted = true;
    }
  }
  ++steps_;
  if (accepted) ++accepted_;
  if (steps_ % kDriftInterval == 0) check_drift();
  return accepted;
}

StepMeasure ChainStats::empirical_measure() const {
  const std::size_t n = distribution.size() - 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::clamp((distribution[i + 1] - distribution[i]) * static_cast<double>(n), 0.0, 1.0);
  }
  return StepMeasure::uniform_grid(v);
}

SampleResult mcmc_sample(const GibbsSpec& spec) {
  GibbsChain chain(spec);
  const std::size_t n = spec.n;
  const std::uint64_t burn = static_cast<std::uint64_t>(spec.burn_in()) * n;
  for (std::uint64_t s = 0; s < burn; ++s) chain.step();

  const std::size_t k = spec.patterns.size();
  ChainStats st;
  st.mean_densities.assign(k, 0.0);
  std::vector<double> occupancy(n, 0.0);
  const std::uint64_t acc0 = chain.accepted();
  for (std::size_t sweep = 1; sweep <= spec.sweeps; ++sweep) {
    for (std::size_t s = 0; s < n; ++s) chain.step();
    if (sweep % spec.record_every != 0) continue;
    TraceRow row;
    row.step = chain.steps();
    row.densities = chain.densities();
    row.densities.resize(k);
    const BinaryWord w = chain.word();
    row.wasserstein = spec.reference ? wasserstein(measure_of_word(w), *spec.reference)
                                     : std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < k; ++i) st.mean_densities[i] += row.densities[i];
    for (std::size_t t = 0; t < n; ++t) occupancy[t] += w[t];
    st.trace.push_back(std::move(row));
    ++st.samples;
  }
  const double ns = static_cast<double>(st.samples);
  for (auto& m : st.mean_densities) m /= ns;
  st.distribution.assign(n + 1, 0.0);
  for (std::size_t t = 0; t < n; ++t) st.distribution[t + 1] = st.distribution[t] + occupancy[t] / ns / static_cast<double>(n);
  st.steps = chain.steps();
  const std::uint64_t sampled = st.steps - burn;
  st.acceptance_rate = static_cast<double>(chain.accepted() - acc0) / static_cast<double>(sampled);
  return {chain.word(), std::move(st)};
}

ChainStats mcmc_sample_chains(const GibbsSpec& spec, std::size_t chains) {
  if (chains == 0) throw InvalidArgument("mcmc_sample_chains: need at least one chain");
  spec.validate();
  std::vector<ChainStats> parts(chains);
  parallel_for(chains, [&](std::size_t i) {
    GibbsSpec s = spec;
    s.seed = sub_seed(spec.seed, i);
    parts[i] = mcmc_sample(s).stats;
  });
  // Equal-weight average in index order.
  ChainStats out = parts.front();
  const double c = static_cast<double>(chains);
  for (std::size_t i = 1; i < chains; ++i) {
    for (std::size_t j = 0; j < out.mean_densities.size(); ++j) out.mean_densities[j] += parts[i].mean_densities[j];
    for (std::size_t j = 0; j < out.distribution.size(); ++j) out.distribution[j] += parts[i].distribution[j];
    out.acceptance_rate += parts[i].acceptance_rate;
    out.steps += parts[i].steps;
    out.samples += parts[i].samples;
  }
  for (auto& m : out.mean_densities) m /= c;
  for (auto& v : out.distribution) v /= c;
  out.acceptance_rate /= c;
  return out;
}

void write_chain_csv(std::ostream& out, const GibbsSpec& spec, const ChainStats& stats) {
  out << "step";
  for (const auto& w : spec.patterns) out << ",rho_" << w.str();
  out << ",dW_to_reference\n";
  const auto old = out.precision(12);
  for (const auto& row : stats.trace) {
    out << row.step;
    for (double d : row.densities) out << ',' << d;
    out << ',';
    if (!std::isnan(row.wasserstein)) out << row.wasserstein;
    out << '\n';
  }
  out.precision(old);
}

// -- calibration ------------------------------------------------------------

namespace {

// Limit-shape multipliers when the targets are rho_1 plus some rho_{1^i 0}.
std::optional<std::vector<double>> limit_shape_start(const std::vector<std::pair<BinaryWord, double>>& targets) {
  DensityTargets dt;
  bool have_one = false;
  std::vector<int> indices;
  for (const auto& [w, v] : targets) {
    if (w == BinaryWord::parse("1")) {
      dt.rho1 = v;
      have_one = true;
      continue;
    }
    const int i = static_cast<int>(w.size()) - 1;
    if (i < 1 || w != ones_then_zero(i)) return std::nullopt;
    dt.ones_then_zero[i] = v;
    indices.push_back(i);
  }
  if (!have_one) return std::nullopt;
  try {
    const auto shape = solve_limit_shape(dt);
    const auto lm = lagrange_multipliers(shape.p, indices);
    std::vector<double> a;
    for (const auto& [w, v] : targets) {
      for (const auto& [lw, lv] : lm) {
        if (lw == w) a.push_back(lv);
      }
    }
    return a;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

CalibrationResult calibrate_multipliers(const std::vector<std::pair<BinaryWord, double>>& targets, std::size_t n,
                                        const CalibrationOptions& opt) {
  if (targets.empty()) throw InvalidArgument("calibrate_multipliers: no targets");
  if (!(opt.cap > 0.0 && opt.tolerance > 0.0 && opt.gain > 0.0) || opt.rounds == 0 || opt.sweeps_per_round == 0 ||
      opt.check_sweeps == 0) {
    throw InvalidArgument("calibrate_multipliers: options must be positive");
  }
  CalibrationResult res;
  std::vector<double> target;
  for (const auto& [w, v] : targets) {
    if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("calibrate_multipliers: targets must lie in (0, 1)");
    res.patterns.push_back(w);
    target.push_back(v);
  }
  const std::size_t k = target.size();
  std::vector<double> a(k, 0.0);
  if (opt.warm_start) {
    if (auto start = limit_shape_start(targets)) {
      a = *start;
      res.warm_started = true;
    }
  }

  GibbsSpec spec;
  spec.n = n;
  spec.patterns = res.patterns;
  spec.multipliers = a;
  spec.seed = opt.seed;
  GibbsChain chain(spec);
  // Per-sweep density samples; their covariance times n is d E[rho] / d a
  // for the tilted family, which preconditions the update.
  auto run_sweeps = [&](std::size_t sweeps, std::vector<std::vector<double>>* samples) {
    for (std::size_t s = 0; s < sweeps; ++s) {
      for (std::size_t t = 0; t < n; ++t) chain.step();
      if (samples) samples->push_back(chain.densities());
    }
  };
  auto mean_of = [&](const std::vector<std::vector<double>>& xs) {
    std::vector<double> m(k, 0.0);
    for (const auto& x : xs) {
      for (std::size_t i = 0; i < k; ++i) m[i] += x[i] / static_cast<double>(xs.size());
    }
    return m;
  };
  auto worst = [&](const std::vector<double>& m) {
    double r = 0.0;
    for (std::size_t i = 0; i < k; ++i) r = std::max(r, std::abs(m[i] - target[i]));
    return r;
  };

  run_sweeps(opt.burn_in_sweeps, nullptr);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  bool have_cov = false;
  std::vector<double> avg(k, 0.0), mean;
  std::size_t averaged = 0;
  for (std::size_t round = 0; round < opt.rounds; ++round) {
    std::vector<std::vector<double>> xs;
    run_sweeps(opt.sweeps_per_round, &xs);
    mean = mean_of(xs);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k);
    for (const auto& x : xs) {
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) c(i, j) += (x[i] - mean[i]) * (x[j] - mean[j]);
      }
    }
    c /= static_cast<double>(std::max<std::size_t>(1, xs.size() - 1));
    cov = have_cov ? Eigen::MatrixXd(0.8 * cov + 0.2 * c) : c;
    have_cov = true;
    Eigen::MatrixXd h = static_cast<double>(n) * cov;
    h.diagonal().array() += 1e-3 * std::max(1e-12, h.diagonal().maxCoeff()) + 1e-12;
    Eigen::VectorXd r(k);
    for (std::size_t i = 0; i < k; ++i) r(i) = target[i] - mean[i];
    Eigen::VectorXd step = h.ldlt().solve(r);
    const double gamma = opt.gain / std::pow(1.0 + static_cast<double>(round), 0.6);
    step *= gamma;
    if (step.norm() > opt.max_step) step *= opt.max_step / step.norm();
    for (std::size_t i = 0; i < k; ++i) a[i] += step(i);
    res.trace.push_back({a, mean});
    for (double x : a) {
      if (!(std::abs(x) <= opt.cap)) {
        throw CalibrationError("calibrate_multipliers: multipliers exceeded the cap (target on or outside the boundary?)",
                               worst(mean), res.trace);
      }
    }
    chain.set_multipliers(a);
    if (2 * round >= opt.rounds) {
      for (std::size_t i = 0; i < k; ++i) avg[i] += a[i];
      ++averaged;
    }
  }
  for (auto& x : avg) x /= static_cast<double>(averaged);
  chain.set_multipliers(avg);
  run_sweeps(opt.sweeps_per_round, nullptr);
  std::vector<std::vector<double>> xs;
  run_sweeps(opt.check_sweeps, &xs);
  mean = mean_of(xs);
  res.multipliers = avg;
  res.mean_densities = mean;
  if (worst(mean) >= opt.tolerance) {
    throw CalibrationError("calibrate_multipliers: mean densities missed the targets", worst(mean), res.trace);
  }
  return res;
}

}  // namespace binpat
