#include "binpat/deckopt.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "binpat/error.hpp"
#include "binpat/feasibility.hpp"
#include "binpat/measures.hpp"
#include "binpat/parallel.hpp"
#include "binpat/patterns.hpp"
#include "binpat/random.hpp"
#include "binpat/tracker.hpp"

namespace binpat {

DeckMode parse_deck_mode(const std::string& s) {
  if (s == "exhaustive") return DeckMode::exhaustive;
  if (s == "anneal") return DeckMode::anneal;
  if (s == "ascent") return DeckMode::ascent;
  throw InvalidArgument("unknown mode '" + s + "' (expected exhaustive, anneal or ascent)");
}

std::string to_string(DeckMode m) {
  switch (m) {
    case DeckMode::exhaustive: return "exhaustive";
    case DeckMode::anneal: return "anneal";
    case DeckMode::ascent: return "ascent";
  }
  return "?";
}

namespace {

double binomial_double(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 0; i < k; ++i) r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return r;
}

std::int64_t count_raw(const BinaryWord& w, const std::vector<std::uint8_t>& x) {
  const std::size_t m = w.size();
  std::int64_t c[kMaxPatternLength + 1] = {1};
  for (std::uint8_t s : x) {
    for (std::size_t k = m; k-- > 0;) {
      if (w[k] == s) c[k + 1] += c[k];
    }
  }
  return c[m];
}

std::vector<std::uint8_t> random_arrangement(std::size_t n, std::size_t ones, std::mt19937_64& rng) {
  std::vector<std::uint8_t> x(n, 0);
  std::fill(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(ones), 1);
  for (std::size_t i = n; i > 1; --i) std::swap(x[i - 1], x[uniform_index(rng, i)]);
  return x;
}

struct Candidate {
  BinaryWord word;
  std::int64_t count = 0;
  std::vector<DeckTracePoint> trace;
};

bool better(const Candidate& a, const Candidate& b) {
  return a.count != b.count ? a.count > b.count : a.word < b.word;
}

DeckResult finish(const DeckProblem& p, BinaryWord best, std::string method, double start_density,
                  std::vector<DeckTracePoint> trace) {
  DeckResult r;
  r.exact_count = count_pattern(p.pattern, best);
  r.density = density(p.pattern, best);
  r.best = std::move(best);
  r.method = std::move(method);
  r.start_density = start_density;
  r.trace = std::move(trace);
  return r;
}

DeckResult exhaustive(const DeckProblem& p) {
  if (binomial_double(p.n, p.ones) > kExhaustiveBudget) {
    throw InvalidArgument("exhaustive search over binomial(" + std::to_string(p.n) + ", " + std::to_string(p.ones) +
                          ") arrangements exceeds the 1e7 budget; use mode anneal");
  }
  // next_permutation walks the arrangements in increasing lexicographic order.
  std::vector<std::uint8_t> x(p.n, 0);
  std::fill(x.end() - static_cast<std::ptrdiff_t>(p.ones), x.end(), 1);
  const double first = density(p.pattern, p.start ? *p.start : BinaryWord(x));
  std::vector<std::uint8_t> best = x;
  std::int64_t best_count = count_raw(p.pattern, x);
  while (std::next_permutation(x.begin(), x.end())) {
    const std::int64_t c = count_raw(p.pattern, x);
    if (c > best_count) {
      best_count = c;
      best = x;
    }
  }
  return finish(p, BinaryWord(best), "exhaustive", first, {});
}

Candidate anneal_restart(const DeckProblem& p, std::size_t restart, std::uint64_t seed, const AnnealOptions& opt) {
  std::mt19937_64 rng(sub_seed(seed, restart));
  const BinaryWord start =
      restart == 0 && p.start ? *p.start : BinaryWord(random_arrangement(p.n, p.ones, rng));
  CountTracker tr(p.pattern, start);
  Candidate out{start, tr.count(), {}};
  const std::size_t n = p.n;

  // T_0 from the mean worsening of random adjacent exchanges at the start.
  double worse = 0.0;
  int nworse = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t t = uniform_index(rng, n - 1);
    const std::int64_t d = tr.adjacent_swap_delta(t);
    if (d < 0) {
      worse += static_cast<double>(-d);
      ++nworse;
    }
  }
  const double t0 = nworse > 0 ? (worse / nworse) / -std::log(opt.initial_acceptance) : 1.0;

  double temp = t0;
  for (std::uint64_t step = 1; step <= opt.steps; ++step) {
    const std::size_t t = uniform_index(rng, n - 1);
    if (tr.symbol(t) != tr.symbol(t + 1)) {
      const std::int64_t d = tr.adjacent_swap_delta(t);
      if (d >= 0 || uniform01(rng) < std::exp(static_cast<double>(d) / temp)) {
        const std::uint8_t a = tr.symbol(t);
        tr.set(t, tr.symbol(t + 1));
        tr.set(t + 1, a);
        if (tr.count() > out.count) {
          out.count = tr.count();
          out.word = tr.host();
        }
      }
    }
    if (step % opt.stage_length == 0) temp *= opt.cooling;
    if (step % opt.trace_every == 0) out.trace.push_back({restart, step, temp, tr.count(), out.count});
  }
  out.word = adjacent_ascent(p.pattern, out.word);
  out.count = count_pattern_i64(p.pattern, out.word);
  if (restart == 0) {
    // Keep anneal >= ascent from the same start.
    const BinaryWord direct = adjacent_ascent(p.pattern, start);
    const std::int64_t c = count_pattern_i64(p.pattern, direct);
    if (c > out.count || (c == out.count && direct < out.word)) {
      out.word = direct;
      out.count = c;
    }
  }
  return out;
}

}  // namespace

void DeckProblem::validate() const {
  if (pattern.empty() || pattern.size() > kMaxPatternLength) throw InvalidArgument("DeckProblem: pattern length must be in [1, 8]");
  if (n == 0) throw InvalidArgument("DeckProblem: n must be positive");
  if (ones > n) throw InvalidArgument("DeckProblem: ones must be in [0, n]");
  if (start && (start->size() != n || start->ones() != ones)) {
    throw InvalidArgument("DeckProblem: start must have length n and exactly `ones` ones");
  }
}

BinaryWord adjacent_ascent(const BinaryWord& pattern, BinaryWord start) {
  const std::size_t n = start.size(), m = pattern.size(), d = m + 1;
  if (pattern.empty() || m > kMaxPatternLength) throw InvalidArgument("adjacent_ascent: pattern length must be in [1, 8]");
  if (n < 2 || m < 2) return start;
  std::vector<std::int64_t> pre((n + 1) * d), suf((n + 1) * d);
  for (;;) {
    // pre[t][k] = N_{w[0..k)}(X[0..t)), suf[t][k] = N_{w[k..m)}(X[t..n)).
    std::fill(pre.begin(), pre.end(), 0);
    std::fill(suf.begin(), suf.end(), 0);
    pre[0] = 1;
    for (std::size_t t = 0; t < n; ++t) {
      std::copy_n(&pre[t * d], d, &pre[(t + 1) * d]);
      for (std::size_t k = 0; k < m; ++k) {
        if (pattern[k] == start[t]) pre[(t + 1) * d + k + 1] += pre[t * d + k];
      }
    }
    suf[n * d + m] = 1;
    for (std::size_t t = n; t-- > 0;) {
      std::copy_n(&suf[(t + 1) * d], d, &suf[t * d]);
      for (std::size_t k = 0; k < m; ++k) {
        if (pattern[k] == start[t]) suf[t * d + k] += suf[(t + 1) * d + k + 1];
      }
    }
    std::int64_t best = 0;
    std::size_t at = n;
    for (std::size_t t = 0; t + 1 < n; ++t) {
      const std::uint8_t a = start[t], b = start[t + 1];
      if (a == b) continue;
      std::int64_t delta = 0;
      for (std::size_t k = 0; k + 1 < m; ++k) {
        const std::int64_t occ = pre[t * d + k] * suf[(t + 2) * d + k + 2];
        if (pattern[k] == b && pattern[k + 1] == a) delta += occ;
        if (pattern[k] == a && pattern[k + 1] == b) delta -= occ;
      }
      if (delta > best) {
        best = delta;
        at = t;
      }
    }
    if (at == n) return start;
    const std::uint8_t a = start[at];
    start.set(at, start[at + 1]);
    start.set(at + 1, a);
  }
}

DeckResult optimize_deck(const DeckProblem& p, std::uint64_t seed, const AnnealOptions& opt) {
  p.validate();
  if (p.mode == DeckMode::exhaustive) return exhaustive(p);
  if (!(opt.cooling > 0.0 && opt.cooling <= 1.0) || !(opt.initial_acceptance > 0.0 && opt.initial_acceptance < 1.0) ||
      opt.stage_length == 0 || opt.trace_every == 0 || opt.restarts == 0) {
    throw InvalidArgument("AnnealOptions: cooling in (0,1], acceptance in (0,1), positive counts required");
  }
  std::mt19937_64 rng(seed);
  if (p.mode == DeckMode::ascent) {
    const BinaryWord start = p.start ? *p.start : BinaryWord(random_arrangement(p.n, p.ones, rng));
    return finish(p, adjacent_ascent(p.pattern, start), "ascent", density(p.pattern, start), {});
  }
  const BinaryWord first = p.start ? *p.start : [&] {
    std::mt19937_64 r0(sub_seed(seed, 0));
    return BinaryWord(random_arrangement(p.n, p.ones, r0));
  }();
  if (p.ones == 0 || p.ones == p.n || p.n < 2) {
    return finish(p, first, "anneal", density(p.pattern, first), {});
  }
  std::vector<Candidate> parts(opt.restarts);
  parallel_for(opt.restarts, [&](std::size_t r) { parts[r] = anneal_restart(p, r, seed, opt); });
  std::size_t best = 0;
  for (std::size_t r = 1; r < parts.size(); ++r) {
    if (better(parts[r], parts[best])) best = r;
  }
  std::vector<DeckTracePoint> trace;
  for (auto& c : parts) trace.insert(trace.end(), c.trace.begin(), c.trace.end());
  return finish(p, parts[best].word, "anneal", density(p.pattern, first), std::move(trace));
}

BinaryWord new_deck_order() {
  BinaryWord w;
  for (int block = 0; block < 4; ++block) {
    for (int i = 0; i < 13; ++i) w.push_back(block % 2 == 0 ? 1 : 0);
  }
  return w;
}

GapReport asymptotic_gap_report(const BinaryWord& pattern, const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                const AnnealOptions& opt) {
  if (pattern != BinaryWord::parse("1010")) throw InvalidArgument("asymptotic_gap_report: pattern must be 1010");
  if (sizes.empty()) throw InvalidArgument("asymptotic_gap_report: no sizes");
  for (std::size_t n : sizes) {
    if (n < 4 || n % 2 != 0) throw InvalidArgument("asymptotic_gap_report: sizes must be even and at least 4");
  }
  GapReport rep;
  rep.asymptote = 3.0 / (4.0 * std::exp(2.0));
  const StepMeasure shape = extremal_density_1010(0.5);
  rep.dominates = true;
  for (std::size_t n : sizes) {
    GapRow row;
    row.n = n;
    BinaryWord disc = round_word(shape, n);
    row.discretized = density(pattern, disc);
    DeckProblem prob{n, n / 2, pattern, DeckMode::anneal, std::nullopt};
    if (disc.ones() == n / 2) prob.start = disc;
    if (binomial_double(n, n / 2) <= kExhaustiveBudget) prob.mode = DeckMode::exhaustive;
    const auto res = optimize_deck(prob, seed, opt);
    row.optimum = res.density;
    row.method = res.method;
    row.gap = row.optimum - rep.asymptote;
    rep.dominates = rep.dominates && row.optimum >= row.discretized;
    rep.rows.push_back(row);
  }
  auto sorted = rep.rows;
  std::sort(sorted.begin(), sorted.end(), [](const GapRow& a, const GapRow& b) { return a.n < b.n; });
  rep.shrinking = sorted.front().gap > 0.0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    rep.shrinking = rep.shrinking && sorted[i].gap > 0.0 && sorted[i].gap < sorted[i - 1].gap;
  }
  return rep;
}

void write_lattice_svg(std::ostream& out, const BinaryWord& word) {
  const double s = 10.0, pad = 10.0;
  const double w = static_cast<double>(word.zeros()) * s, h = static_cast<double>(word.ones()) * s;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w + 2 * pad << "\" height=\"" << h + 2 * pad << "\">\n";
  out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
  double x = 0.0, y = 0.0;
  out << pad + x << ',' << pad + h - y;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i]) {
      y += s;
    } else {
      x += s;
    }
    out << ' ' << pad + x << ',' << pad + h - y;
  }
  out << "\"/>\n</svg>\n";
}

}  // namespace binpat
