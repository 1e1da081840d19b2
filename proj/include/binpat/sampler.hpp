#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "binpat/error.hpp"
#include "binpat/measures.hpp"
#include "binpat/tracker.hpp"
#include "binpat/word.hpp"

namespace binpat {

/// Gibbs measure on {0,1}^n with weight exp(n * sum a_i rho_{w_i}(X)).
struct GibbsSpec {
  std::size_t n = 2000;
  std::vector<BinaryWord> patterns;
  std::vector<double> multipliers;
  std::uint64_t seed = 1;
  /// Sampling sweeps after burn-in; a sweep is n proposals.
  std::size_t sweeps = 1000;
  /// Default 100 sweeps (100 n proposals).
  std::optional<std::size_t> burn_in_sweeps;
  /// Sweeps between recorded samples (trace rows and F-hat accumulation).
  std::size_t record_every = 1;
  /// Fraction of proposals that are flips; the rest are 1 <-> 0 transpositions.
  double flip_fraction = 0.8;
  /// Target of the d_W trace, when given.
  std::optional<StepMeasure> reference;
  /// Starting word; uniformly random from the seed otherwise.
  std::optional<BinaryWord> initial;

  /// n >= 8, at most 4 patterns of length 1..5, one multiplier each.
  void validate() const;
  std::size_t burn_in() const { return burn_in_sweeps.value_or(100); }
};

struct TraceRow {
  std::uint64_t step = 0;
  std::vector<double> densities;
  /// NaN without a reference.
  double wasserstein = 0.0;
};

struct ChainStats {
  std::vector<double> mean_densities;
  /// F-hat(i/n), i = 0..n, averaged over recorded samples.
  std::vector<double> distribution;
  double acceptance_rate = 0.0;
  std::vector<TraceRow> trace;
  std::uint64_t steps = 0;
  std::uint64_t samples = 0;

  /// Step density whose distribution function is F-hat.
  StepMeasure empirical_measure() const;
};

/// One Metropolis chain. Exposed for the detailed-balance check, which needs
/// every visited state.
class GibbsChain {
 public:
  explicit GibbsChain(const GibbsSpec& spec);

  /// One proposal. Returns true when it was accepted.
  bool step();
  /// Recounts every pattern from scratch and throws std::logic_error if an
  /// incremental count drifted.
  void check_drift() const;

  BinaryWord word() const { return trackers_.front().host(); }
  std::uint8_t symbol(std::size_t t) const { return trackers_.front().symbol(t); }
  std::vector<double> densities() const;
  std::uint64_t steps() const noexcept { return steps_; }
  std::uint64_t accepted() const noexcept { return accepted_; }
  std::size_t ones() const noexcept { return ones_.size(); }
  void set_multipliers(const std::vector<double>& a);

 private:
  std::size_t n_;
  double flip_fraction_;
  std::vector<CountTracker> trackers_;
  std::vector<double> scale_;   // n * a_i / binomial(n, m_i)
  std::vector<double> binom_;   // binomial(n, m_i)
  std::vector<std::size_t> ones_, zeros_, slot_;
  std::mt19937_64 rng_;
  std::uint64_t steps_ = 0, accepted_ = 0;

  void apply(std::size_t t);
  bool metropolis(double log_ratio);
};

struct SampleResult {
  BinaryWord final_word;
  ChainStats stats;
};

/// Burn-in, then `sweeps` sweeps of sampling. Deterministic given the spec.
SampleResult mcmc_sample(const GibbsSpec& spec);

/// Independent chains with seeds sub_seed(spec.seed, i), run on up to
/// BINPAT_THREADS threads and merged with equal weight. The merge does not
/// depend on the thread count.
ChainStats mcmc_sample_chains(const GibbsSpec& spec, std::size_t chains);

/// Columns step, rho_<w>..., dW_to_reference.
void write_chain_csv(std::ostream& out, const GibbsSpec& spec, const ChainStats& stats);

// -- calibration ------------------------------------------------------------

struct CalibrationOptions {
  std::uint64_t seed = 1;
  std::size_t burn_in_sweeps = 100;
  std::size_t rounds = 150;
  std::size_t sweeps_per_round = 10;
  /// Gain gamma_k = gain / (1 + k)^0.6 on the covariance-preconditioned step.
  double gain = 1.0;
  /// Largest change of the multiplier vector in one round.
  double max_step = 1.0;
  /// |a_i| above this is reported as divergence.
  double cap = 50.0;
  double tolerance = 2e-2;
  /// Sweeps averaged for the final density check.
  std::size_t check_sweeps = 200;
  /// Start from the limit-shape multipliers when the targets are rho_1 plus
  /// rho_{1^i 0} densities.
  bool warm_start = true;
};

struct CalibrationRound {
  std::vector<double> multipliers;
  std::vector<double> densities;
};

struct CalibrationResult {
  std::vector<BinaryWord> patterns;
  std::vector<double> multipliers;
  std::vector<double> mean_densities;
  std::vector<CalibrationRound> trace;
  bool warm_started = false;
};

/// Thrown when the multipliers leave [-cap, cap] or the final check misses
/// the tolerance.
class CalibrationError : public ConvergenceError {
 public:
  CalibrationError(const std::string& what, double residual, std::vector<CalibrationRound> trace)
      : ConvergenceError(what, residual), trace_(std::move(trace)) {}
  const std::vector<CalibrationRound>& trace() const noexcept { return trace_; }

 private:
  std::vector<CalibrationRound> trace_;
};

/// Robbins-Monro on a_i toward the target mean densities, with Polyak
/// averaging over the second half of the rounds.
CalibrationResult calibrate_multipliers(const std::vector<std::pair<BinaryWord, double>>& targets, std::size_t n,
                                        const CalibrationOptions& options = {});

}  // namespace binpat
