#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "binpat/deckopt.hpp"
#include "binpat/error.hpp"
#include "binpat/feasibility.hpp"
#include "binpat/heisenberg.hpp"
#include "binpat/limitshape.hpp"
#include "binpat/measures.hpp"
#include "binpat/patterns.hpp"
#include "binpat/sampler.hpp"
#include "binpat/verify/acceptance.hpp"
#include "binpat/verify/oracles.hpp"

using namespace binpat;
using Json = nlohmann::ordered_json;

namespace {

enum class Format { json, csv, svg };

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  Format format = Format::json;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Every float in the tree rounded to 12 significant digits, so dumps are
// short and identical across platforms.
void round_numbers(Json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    j = std::isfinite(v) ? Json(std::stod(num(v))) : Json(nullptr);
  } else if (j.is_structured()) {
    for (auto& child : j) round_numbers(child);
  }
}

Json measure_json(const StepMeasure& mu) { return Json::parse(to_json(mu).dump()); }

Json big(const BigInt& v) { return to_decimal(v); }

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InvalidArgument("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void emit_json(Json j, std::ostream& out) {
  round_numbers(j);
  out << j.dump(2) << "\n";
}

void emit_json(const Json& j, const std::string& path) {
  Output o(path);
  emit_json(j, o.stream());
}

void write_file(const std::string& path, const std::string& what, const std::function<void(std::ostream&)>& fn) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot open " + path + " for writing " + what);
  fn(f);
}

BinaryWord W(const std::string& s) { return BinaryWord::parse(s); }

std::vector<BinaryWord> words(const std::vector<std::string>& v) {
  std::vector<BinaryWord> out;
  for (const auto& s : v) out.push_back(W(s));
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

std::vector<double> doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) out.push_back(to_double(t));
  return out;
}

// word:0110 | const:v | values:v1,v2,... | step:r (1 on [0,r]) |
// extremal:r[:grid] | aux1010[:grid] | aux10101[:grid] | file:path | path
StepMeasure parse_measure(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  const auto grid_or = [&](int def) { return arg.empty() ? def : static_cast<int>(to_double(arg)); };
  if (kind == "word") return measure_of_word(W(arg));
  if (kind == "const") return StepMeasure::constant(to_double(arg));
  if (kind == "values") {
    const auto v = doubles(arg);
    return StepMeasure::uniform_grid(v);
  }
  if (kind == "step") {
    const double r = to_double(arg);
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("step: threshold must lie in [0,1]");
    return StepMeasure({{r, 1.0}, {1.0 - r, 0.0}});
  }
  if (kind == "extremal") {
    const auto parts = split(arg, ':');
    if (parts.empty()) throw InvalidArgument("extremal: expected extremal:rho[:grid]");
    return extremal_density_1010(to_double(parts[0]), parts.size() > 1 ? static_cast<int>(to_double(parts[1])) : 2000);
  }
  if (kind == "aux1010") return verify::analytic_aux_1010(grid_or(2000));
  if (kind == "aux10101") return verify::analytic_aux_10101(grid_or(2000));
  const std::string path = kind == "file" ? arg : spec;
  std::ifstream f(path);
  if (!f) throw InvalidArgument("unknown measure '" + spec + "'");
  try {
    return measure_from_json(nlohmann::json::parse(f));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

std::string sidecar_path(const std::string& csv) {
  std::filesystem::path p(csv);
  p.replace_extension(".json");
  return p.string();
}

// Polyline of f on [0,1] x [0, ymax].
void write_density_svg(std::ostream& out, const StepMeasure& mu, int points) {
  const double w = 400, h = 300, pad = 20;
  double ymax = 1.0;
  for (const auto& c : mu.cells()) ymax = std::max(ymax, c.value);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w + 2 * pad << "\" height=\"" << h + 2 * pad
      << "\">\n";
  out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"#999\"/>\n<polyline fill=\"none\" stroke=\"black\" points=\"";
  for (int i = 0; i <= points; ++i) {
    const double x = static_cast<double>(i) / points;
    out << num(pad + w * x) << "," << num(pad + h * (1.0 - mu.value_at(x) / ymax)) << (i < points ? " " : "");
  }
  out << "\"/>\n</svg>\n";
}

// -- subcommands --------------------------------------------------------------

struct CountArgs {
  std::string pattern, word, blocks;
  int all = 0;
};

void run_count(const CountArgs& a, const Globals& g) {
  if (a.all > 0) {
    if (a.word.empty()) throw InvalidArgument("count --all needs --word");
    const auto counts = count_all(W(a.word), a.all);
    Output o(g.out);
    if (g.format == Format::csv) {
      o.stream() << "pattern,count\n";
      for (const auto& [w, c] : counts) o.stream() << w.str() << "," << c << "\n";
    } else {
      Json j = Json::object();
      for (const auto& [w, c] : counts) j[w.str()] = big(c);
      emit_json(j, o.stream());
    }
    return;
  }
  if (a.pattern.empty()) throw InvalidArgument("count needs --pattern");
  const BinaryWord p = W(a.pattern);
  if (!a.blocks.empty()) {
    const BlockSequence blocks{doubles(a.blocks)};
    const double value = block_counts_polynomial(p, blocks);
    Json j{{"pattern", a.pattern}, {"blocks", blocks.lengths}, {"value", value}};
    const bool integral = std::all_of(blocks.lengths.begin(), blocks.lengths.end(),
                                      [](double x) { return x >= 0 && x == std::floor(x); });
    if (integral) {
      const BinaryWord x = expand_blocks(blocks);
      j["word"] = x.str();
      j["count"] = big(count_pattern(p, x));
    }
    if (g.format == Format::json) {
      emit_json(j, g.out);
    } else {
      Output o(g.out);
      o.stream() << num(value) << "\n";
    }
    return;
  }
  if (a.word.empty()) throw InvalidArgument("count needs --word or --blocks");
  const BinaryWord x = W(a.word);
  const BigInt c = count_pattern(p, x);
  Output o(g.out);
  o.stream() << c << "\n";
}

struct DensityArgs {
  std::string pattern, word, measure, converge;
  int moments = -1;
  bool sampled = false, show_measure = false;
  int curve = 0;
};

void run_density(const DensityArgs& a, const Globals& g) {
  if (a.word.empty() == a.measure.empty()) throw InvalidArgument("density needs exactly one of --word, --measure");
  if (!a.word.empty()) {
    if (a.pattern.empty()) throw InvalidArgument("density needs --pattern");
    const BinaryWord p = W(a.pattern), x = W(a.word);
    const double d = density(p, x);
    if (a.show_measure) {
      emit_json(Json{{"pattern", a.pattern}, {"word", a.word}, {"count", big(count_pattern(p, x))}, {"density", d},
                     {"measure", measure_json(measure_of_word(x))}},
                g.out);
    } else {
      Output o(g.out);
      o.stream() << num(d) << "\n";
    }
    return;
  }
  const StepMeasure mu = parse_measure(a.measure);
  if (a.curve > 0) {
    Output o(g.out);
    write_curve_csv(o.stream(), mu, a.curve);
    return;
  }
  if (a.moments >= 0) {
    Json rows = Json::array();
    bool all = true;
    for (const auto& m : moments_identity_check(mu, a.moments)) {
      rows.push_back({{"n", m.n}, {"direct", m.direct}, {"from_patterns", m.from_patterns}, {"pass", m.pass}});
      all = all && m.pass;
    }
    emit_json(Json{{"measure", a.measure}, {"rows", rows}, {"pass", all}}, g.out);
    return;
  }
  if (!a.converge.empty()) {
    const auto ps = words(split(a.pattern.empty() ? std::string("10") : a.pattern, ','));
    std::vector<BinaryWord> hosts;
    std::mt19937_64 rng(g.seed);
    for (double n : doubles(a.converge)) {
      if (n < 1 || n != std::floor(n)) throw InvalidArgument("--converge takes positive integer sizes");
      const auto len = static_cast<std::size_t>(n);
      hosts.push_back(a.sampled ? sample_word(mu, len, rng) : round_word(mu, len));
    }
    const auto report = word_convergence_check(hosts, mu, ps);
    Json rows = Json::array();
    for (const auto& r : report.rows)
      rows.push_back({{"n", r.n}, {"wasserstein", r.wasserstein}, {"density_errors", r.density_errors}});
    Json pats = Json::array();
    for (const auto& p : ps) pats.push_back(p.str());
    emit_json(Json{{"measure", a.measure}, {"hosts", a.sampled ? "sampled" : "rounded"}, {"patterns", pats},
                   {"rows", rows}, {"jointly_decreasing", report.jointly_decreasing}},
              g.out);
    return;
  }
  if (a.pattern.empty()) throw InvalidArgument("density needs --pattern");
  const double d = density_of_measure(W(a.pattern), mu);
  if (a.show_measure) {
    emit_json(Json{{"pattern", a.pattern}, {"density", d}, {"measure", measure_json(mu)}}, g.out);
  } else {
    Output o(g.out);
    o.stream() << num(d) << "\n";
  }
}

void run_relations(const std::string& word, const Globals& g) {
  const auto checks = check_relations(W(word));
  Output o(g.out);
  if (g.format == Format::csv) {
    o.stream() << "relation,lhs,rhs,pass\n";
    for (const auto& c : checks)
      o.stream() << "\"" << c.relation << "\"," << c.lhs << "," << c.rhs << "," << (c.pass ? "true" : "false") << "\n";
  } else {
    Json j = Json::array();
    for (const auto& c : checks) j.push_back({{"relation", c.relation}, {"lhs", big(c.lhs)}, {"rhs", big(c.rhs)}, {"pass", c.pass}});
    emit_json(j, o.stream());
  }
}

struct IndependenceArgs {
  std::string patterns, blocks;
  double threshold = 1e-8;
};

void run_independence(const IndependenceArgs& a, const Globals& g) {
  const auto ps = words(split(a.patterns, ','));
  RankOptions opt;
  opt.singular_threshold = a.threshold;
  const auto r = independence_rank(ps, BlockSequence{doubles(a.blocks)}, opt);
  emit_json(Json{{"patterns", split(a.patterns, ',')}, {"blocks", doubles(a.blocks)}, {"rank", r.rank},
                 {"singular_values", r.singular_values}, {"degenerate_blocks", r.degenerate_blocks}},
            g.out);
}

void run_wasserstein(const std::string& a, const std::string& b, const Globals& g) {
  Output o(g.out);
  o.stream() << num(wasserstein(parse_measure(a), parse_measure(b))) << "\n";
}

struct CvalueArgs {
  std::string tau, boundary, residual;
  int grid = 1000;
  int boundary_points = 100;
  bool closed = false;
};

void run_cvalue(const CvalueArgs& a, const Globals& g) {
  const BinaryWord tau = W(a.tau);
  const auto res = c_numeric(tau, a.grid);
  Json j{{"tau", a.tau}};
  if (a.closed) {
    const auto cf = c_closed_form(tau);
    j["C_closed"] = cf ? Json(*cf) : Json(nullptr);
    j["C_numeric"] = res.value;
    j["rel_err"] = cf ? Json(std::abs(res.value - *cf) / *cf) : Json(nullptr);
  } else {
    j["C_numeric"] = res.value;
  }
  j["iterations"] = res.iterations;
  if (!a.residual.empty()) {
    j["el_residual"] = euler_lagrange_residual(tau, parse_measure(a.residual));
  }
  j["argmax_measure"] = measure_json(res.argmax);
  if (!a.boundary.empty()) {
    const double c = a.closed && c_closed_form(tau) ? *c_closed_form(tau) : res.value;
    write_file(a.boundary, "the boundary", [&](std::ostream& f) { write_boundary_csv(f, tau, c, a.boundary_points); });
    j["boundary_file"] = a.boundary;
  }
  emit_json(j, g.out);
}

struct IntervalArgs {
  std::string tau, curve;
  double rho1 = 0.5;
  int grid = 1000;
  bool extremal = false;
};

void run_interval(const IntervalArgs& a, const Globals& g) {
  const BinaryWord tau = W(a.tau);
  const auto iv = feasible_interval(tau, a.rho1, a.grid);
  Json j{{"tau", a.tau}, {"rho1", a.rho1}, {"lower", 0.0}, {"upper", iv.upper}, {"C", iv.c_value},
         {"closed_form", iv.closed_form}};
  if (a.extremal) {
    if (a.tau != "1010") throw InvalidArgument("--extremal is only available for tau = 1010");
    const StepMeasure f = extremal_density_1010(a.rho1, a.grid);
    double one_until = 0.0;
    for (const auto& c : f.cells()) {
      if (std::abs(c.value - 1.0) > 1e-12) break;
      one_until += c.width;
    }
    j["extremal"] = {{"grid", a.grid},
                     {"rho1", density_of_measure(W("1"), f)},
                     {"rho1010", density_of_measure(tau, f)},
                     {"one_until", one_until},
                     {"rho1_over_e", a.rho1 / std::exp(1.0)}};
    if (!a.curve.empty()) {
      write_file(a.curve, "the extremal curve", [&](std::ostream& o) { write_curve_csv(o, f, a.grid); });
      j["curve_file"] = a.curve;
    }
  }
  emit_json(j, g.out);
}

struct LimitshapeArgs {
  std::string targets, coeffs, svg, entropy;
  int grid = 2000;
  bool jacobian = false;
};

Json coeff_json(const ExpPolynomial& p) { return Json(p.coeffs); }

void run_limitshape(const LimitshapeArgs& a, const Globals& g) {
  LimitShapeOptions opt;
  opt.grid = a.grid;
  if (!a.entropy.empty()) {
    Output o(g.out);
    o.stream() << num(entropy(parse_measure(a.entropy))) << "\n";
    return;
  }
  if (a.targets.empty() == a.coeffs.empty()) throw InvalidArgument("limitshape needs exactly one of --targets, --coeffs");
  Json j;
  StepMeasure f;
  if (!a.coeffs.empty()) {
    const ExpPolynomial p{doubles(a.coeffs)};
    const auto phi = phi_forward(p, opt);
    f = reconstruct_density(p, opt);
    j = {{"coeffs", coeff_json(p)}, {"rho1", phi.rho1}, {"densities", phi.densities},
         {"boundary_gap", phi.boundary_gap}, {"entropy", shape_entropy(p, opt)}};
    if (a.jacobian) {
      const Eigen::MatrixXd jac = phi_jacobian(p, opt);
      Json rows = Json::array();
      for (Eigen::Index r = 0; r < jac.rows(); ++r) {
        std::vector<double> row(jac.cols());
        for (Eigen::Index c = 0; c < jac.cols(); ++c) row[c] = jac(r, c);
        rows.push_back(row);
      }
      j["jacobian"] = rows;
      j["determinant"] = jac.determinant();
    }
  } else {
    const auto targets = DensityTargets::parse(a.targets);
    LimitShape s;
    try {
      s = solve_limit_shape(targets, opt);
    } catch (const BoundaryReached& e) {
      Json steps = Json::array();
      for (const auto& c : e.shape().steps) steps.push_back({{"w", c.width}, {"v", c.value}});
      emit_json(Json{{"status", "boundary"}, {"message", e.what()}, {"steps", steps},
                     {"zero_intervals", e.shape().zero_intervals}, {"progress", e.shape().progress},
                     {"last_coeffs", coeff_json(e.shape().last)}},
                std::cout);
      throw;
    }
    f = s.f;
    std::vector<int> idx;
    for (const auto& [i, v] : targets.ones_then_zero) idx.push_back(i);
    Json mult = Json::object();
    for (const auto& [w, lam] : lagrange_multipliers(s.p, idx, opt)) mult[w.str()] = lam;
    j = {{"coeffs", coeff_json(s.p)},
         {"rho1", s.rho1},
         {"densities", s.densities},
         {"entropy", s.entropy},
         {"residuals", {{"reconstruction", s.reconstruction_residual}, {"newton_iterations", s.newton_iterations}}},
         {"multipliers", mult}};
  }
  if (!a.svg.empty()) {
    write_file(a.svg, "the plot", [&](std::ostream& o) { write_density_svg(o, f, 500); });
    j["svg_file"] = a.svg;
  }
  if (!g.out.empty()) {
    write_file(g.out, "the curve", [&](std::ostream& o) { write_curve_csv(o, f, a.grid); });
    j["curve_file"] = g.out;
    emit_json(j, sidecar_path(g.out));
  }
  emit_json(j, std::cout);
}

struct SampleArgs {
  std::size_t n = 2000;
  std::vector<std::string> patterns;
  std::vector<double> targets, multipliers;
  std::size_t sweeps = 1000, burn_in = 100, record_every = 1, chains = 1, rounds = 150;
  double flip_fraction = 0.8;
  std::string reference, curve;
  bool match = false;
};

// rho1 plus rho_{1^i 0} targets, when the pattern list has that shape.
std::optional<DensityTargets> limit_targets(const std::vector<BinaryWord>& ps, const std::vector<double>& vals) {
  DensityTargets t;
  bool have1 = false;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i] == W("1")) {
      t.rho1 = vals[i];
      have1 = true;
      continue;
    }
    const std::size_t k = ps[i].size() - 1;
    if (k < 1 || ps[i] != ones_then_zero(static_cast<int>(k))) return std::nullopt;
    t.ones_then_zero[static_cast<int>(k)] = vals[i];
  }
  if (!have1) return std::nullopt;
  return t;
}

void run_sample(const SampleArgs& a, const Globals& g) {
  const auto ps = words(a.patterns);
  if (a.targets.empty() == a.multipliers.empty()) throw InvalidArgument("sample needs --target or --multiplier per pattern");
  const auto& given = a.targets.empty() ? a.multipliers : a.targets;
  if (given.size() != ps.size()) throw InvalidArgument("sample: one --target (or --multiplier) per --pattern");

  GibbsSpec spec;
  spec.n = a.n;
  spec.patterns = ps;
  spec.seed = g.seed;
  spec.sweeps = a.sweeps;
  spec.burn_in_sweeps = a.burn_in;
  spec.record_every = a.record_every;
  spec.flip_fraction = a.flip_fraction;

  Json j{{"n", a.n}, {"patterns", a.patterns}};
  if (!a.targets.empty()) {
    std::vector<std::pair<BinaryWord, double>> targets;
    for (std::size_t i = 0; i < ps.size(); ++i) targets.emplace_back(ps[i], a.targets[i]);
    CalibrationOptions opt;
    opt.seed = g.seed;
    opt.rounds = a.rounds;
    const auto cal = calibrate_multipliers(targets, a.n, opt);
    spec.multipliers = cal.multipliers;
    j["targets"] = a.targets;
    j["calibration"] = {{"warm_started", cal.warm_started}, {"rounds", cal.trace.size()},
                        {"check_densities", cal.mean_densities}};
  } else {
    spec.multipliers = a.multipliers;
  }
  j["multipliers"] = spec.multipliers;

  std::optional<LimitShape> ref;
  if (!a.reference.empty()) {
    ref = solve_limit_shape(DensityTargets::parse(a.reference));
  } else if (!a.targets.empty()) {
    if (auto t = limit_targets(ps, a.targets)) ref = solve_limit_shape(*t);
  }
  if (ref) spec.reference = ref->f;

  const ChainStats stats = a.chains > 1 ? mcmc_sample_chains(spec, a.chains) : mcmc_sample(spec).stats;
  const StepMeasure fhat = stats.empirical_measure();
  j["chains"] = a.chains;
  j["steps"] = stats.steps;
  j["samples"] = stats.samples;
  j["acceptance_rate"] = stats.acceptance_rate;
  j["mean_densities"] = stats.mean_densities;
  j["rho1_hat"] = stats.distribution.back();
  if (ref) j["dW_to_limit_shape"] = wasserstein(fhat, ref->f);
  if (a.match) {
    // Limit shape through the sampled rho_1 and rho_{1^i 0} means.
    DensityTargets t;
    t.rho1 = stats.distribution.back();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (ps[i] == W("1")) continue;
      const std::size_t k = ps[i].size() - 1;
      if (k < 1 || ps[i] != ones_then_zero(static_cast<int>(k)))
        throw InvalidArgument("--match needs patterns of the form 1 or 1^i 0");
      t.ones_then_zero[static_cast<int>(k)] = stats.mean_densities[i];
    }
    const auto matched = solve_limit_shape(t);
    j["matched"] = {{"coeffs", coeff_json(matched.p)}, {"dW", wasserstein(fhat, matched.f)}};
  }
  if (!g.out.empty()) {
    write_file(g.out, "the chain trace", [&](std::ostream& o) { write_chain_csv(o, spec, stats); });
    j["trace_file"] = g.out;
  }
  if (!a.curve.empty()) {
    write_file(a.curve, "F-hat", [&](std::ostream& o) { write_curve_csv(o, fhat, static_cast<int>(a.n)); });
    j["curve_file"] = a.curve;
  }
  emit_json(j, std::cout);
}

struct BrbrArgs {
  std::size_t n = 52, ones = 26, restarts = 20;
  std::uint64_t steps = 1000000;
  std::string pattern = "1010", mode = "anneal", start, svg, trace, evaluate, gap;
};

void run_brbr(const BrbrArgs& a, const Globals& g) {
  const BinaryWord pattern = W(a.pattern);
  AnnealOptions opt;
  opt.steps = a.steps;
  opt.restarts = a.restarts;
  if (!a.evaluate.empty()) {
    const BinaryWord x = a.evaluate == "new-deck" ? new_deck_order() : W(a.evaluate);
    const BigInt c = count_pattern(pattern, x);
    const BigInt total = binomial(static_cast<std::uint64_t>(x.size()), static_cast<long>(pattern.size()));
    emit_json(Json{{"word", x.str()}, {"pattern", a.pattern}, {"exact_count", big(c)}, {"binomial", big(total)},
                   {"density", ratio_to_double(c, total)}},
              g.out);
    return;
  }
  if (!a.gap.empty()) {
    std::vector<std::size_t> sizes;
    for (double n : doubles(a.gap)) {
      if (n < 1 || n != std::floor(n)) throw InvalidArgument("--gap takes positive integer sizes");
      sizes.push_back(static_cast<std::size_t>(n));
    }
    const auto rep = asymptotic_gap_report(pattern, sizes, g.seed, opt);
    Json rows = Json::array();
    for (const auto& r : rep.rows)
      rows.push_back({{"n", r.n}, {"optimum", r.optimum}, {"method", r.method}, {"discretized", r.discretized}, {"gap", r.gap}});
    emit_json(Json{{"asymptote", rep.asymptote}, {"rows", rows}, {"dominates", rep.dominates}, {"shrinking", rep.shrinking}},
              g.out);
    return;
  }
  DeckProblem prob;
  prob.n = a.n;
  prob.ones = a.ones;
  prob.pattern = pattern;
  prob.mode = parse_deck_mode(a.mode);
  if (!a.start.empty()) prob.start = a.start == "new-deck" ? new_deck_order() : W(a.start);
  const auto res = optimize_deck(prob, g.seed, opt);
  Json j{{"best_word", res.best.str()}, {"exact_count", big(res.exact_count)}, {"density", res.density},
         {"method", res.method},
         {"start_density", prob.mode == DeckMode::exhaustive ? Json(nullptr) : Json(res.start_density)}};
  if (!a.trace.empty()) {
    write_file(a.trace, "the trace", [&](std::ostream& o) {
      o << "restart,step,temperature,current,best\n";
      for (const auto& t : res.trace)
        o << t.restart << "," << t.step << "," << num(t.temperature) << "," << t.current << "," << t.best << "\n";
    });
    j["trace_file"] = a.trace;
  } else {
    j["trace_file"] = nullptr;
  }
  if (!a.svg.empty()) {
    write_file(a.svg, "the lattice path", [&](std::ostream& o) { write_lattice_svg(o, res.best); });
    j["svg_file"] = a.svg;
  }
  if (g.format == Format::svg) {
    Output o(g.out);
    write_lattice_svg(o.stream(), res.best);
    return;
  }
  emit_json(j, g.out);
}

struct HeisenbergArgs {
  std::string mask, word;
  std::size_t random = 0;
  int upper_right = 0;
  bool minors = false;
};

void run_heisenberg(const HeisenbergArgs& a, const Globals& g) {
  const auto spec = GeneratorSpec::from_mask(W(a.mask));
  BinaryWord host;
  if (a.random > 0) {
    std::mt19937_64 rng(g.seed);
    for (std::size_t i = 0; i < a.random; ++i) host.push_back(static_cast<std::uint8_t>(rng() & 1U));
  } else {
    host = W(a.word);
  }
  const auto m = matrix_of_word(spec, host);
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.dim(); ++k) row.push_back(big(m(i, k)));
    rows.push_back(row);
  }
  const auto fr = first_row_equals_counts(spec, host);
  Json counts = Json::array();
  for (const auto& c : fr.counts) counts.push_back(big(c));
  Json j{{"mask", a.mask}, {"d", spec.d}, {"word", host.str()}, {"matrix", rows},
         {"first_row_counts", counts}, {"first_row_match", fr.match}};
  if (a.upper_right > 0) {
    const auto k = static_cast<std::size_t>(a.upper_right);
    if (k > m.dim()) throw InvalidArgument("--upper-right exceeds the dimension");
    std::vector<std::size_t> r(k), c(k);
    for (std::size_t i = 0; i < k; ++i) {
      r[i] = i;
      c[i] = m.dim() - k + i;
    }
    j["upper_right_minor"] = big(m.minor(r, c));
  }
  if (a.minors) {
    Json mins = Json::array();
    bool nonneg = true;
    for (std::size_t order = 1; order <= m.dim(); ++order) {
      const auto mm = min_minor(m, order);
      nonneg = nonneg && mm.value >= 0;
      mins.push_back({{"order", order}, {"min", big(mm.value)}, {"rows", mm.rows}, {"cols", mm.cols}});
    }
    j["min_minors"] = mins;
    j["totally_nonnegative"] = nonneg;
  }
  emit_json(j, g.out);
}

int run_verify(const std::vector<int>& ids, const Globals& g) {
  verify::AcceptanceOptions opt;
  opt.only = ids;
  Output o(g.out);
  const auto results = verify::run_acceptance(opt, [&](const verify::CriterionResult& r) {
    o.stream() << verify::format_result(r) << std::endl;
  });
  std::size_t passed = 0, known = 0;
  for (const auto& r : results) {
    passed += r.pass;
    known += !r.pass && r.known_failure;
  }
  o.stream() << passed << "/" << results.size() << " passed, " << known << " known failures" << std::endl;
  return verify::acceptable(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binpat: binary pattern densities, limit shapes and samplers"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; command-line flags take precedence");

  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--out", g.out, "output file (stdout by default)");
  const std::map<std::string, Format> formats{{"json", Format::json}, {"csv", Format::csv}, {"svg", Format::svg}};
  app.add_option("--format", g.format, "json, csv or svg")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case).description("{json,csv,svg}"));

  int code = 0;

  CountArgs count;
  auto* c = app.add_subcommand("count", "N_pattern of a word, or of a block sequence");
  c->add_option("--pattern", count.pattern);
  c->add_option("--word", count.word);
  c->add_option("--blocks", count.blocks, "comma separated block lengths 1^a1 0^a2 ...");
  c->add_option("--all", count.all, "every pattern up to this length");
  c->callback([&] { run_count(count, g); });

  DensityArgs dens;
  auto* d = app.add_subcommand("density", "rho_pattern of a word or a measure");
  d->add_option("--pattern", dens.pattern, "pattern (comma list with --converge)");
  d->add_option("--word", dens.word);
  d->add_option("--measure", dens.measure, "word:..|const:v|values:..|step:r|extremal:r|file.json");
  d->add_option("--moments", dens.moments, "run the moment identity up to this order");
  d->add_option("--converge", dens.converge, "host sizes for the word convergence check");
  d->add_flag("--sampled", dens.sampled, "i.i.d. hosts instead of rounded ones");
  d->add_flag("--show-measure", dens.show_measure, "JSON with the measure");
  d->add_option("--curve", dens.curve, "write x,F,f on this many intervals");
  d->callback([&] { run_density(dens, g); });

  std::string rel_word;
  auto* r = app.add_subcommand("relations", "polynomial identities among counts of length <= 4");
  r->add_option("--word", rel_word)->required();
  r->callback([&] { run_relations(rel_word, g); });

  IndependenceArgs ind;
  auto* i = app.add_subcommand("independence", "Jacobian rank of counts on block sequences");
  i->add_option("--patterns", ind.patterns, "comma separated")->required();
  i->add_option("--blocks", ind.blocks, "comma separated block lengths")->required();
  i->add_option("--threshold", ind.threshold)->capture_default_str();
  i->callback([&] { run_independence(ind, g); });

  std::string wa, wb;
  auto* w = app.add_subcommand("wasserstein", "d_W between two measures");
  w->add_option("--a", wa)->required();
  w->add_option("--b", wb)->required();
  w->callback([&] { run_wasserstein(wa, wb, g); });

  CvalueArgs cv;
  auto* cvs = app.add_subcommand("cvalue", "C_tau by the auxiliary maximization");
  cvs->add_option("--tau", cv.tau)->required();
  cvs->add_option("--grid", cv.grid)->capture_default_str();
  cvs->add_flag("--closed-form", cv.closed, "also report the closed form and the relative error");
  cvs->add_option("--boundary", cv.boundary, "write rho,upper to this file");
  cvs->add_option("--boundary-points", cv.boundary_points)->capture_default_str();
  cvs->add_option("--residual", cv.residual, "Euler-Lagrange residual of a g measure (aux1010, aux10101, ...)");
  cvs->callback([&] { run_cvalue(cv, g); });

  IntervalArgs iv;
  auto* ivs = app.add_subcommand("interval", "feasible range of rho_tau at fixed rho_1");
  ivs->add_option("--tau", iv.tau)->required();
  ivs->add_option("--rho1", iv.rho1)->capture_default_str();
  ivs->add_option("--grid", iv.grid)->capture_default_str();
  ivs->add_flag("--extremal", iv.extremal, "evaluate the 1010 maximizer on the grid");
  ivs->add_option("--curve", iv.curve, "write the maximizer as x,F,f");
  ivs->callback([&] { run_interval(iv, g); });

  LimitshapeArgs ls;
  auto* lss = app.add_subcommand("limitshape", "entropy maximizing density for given targets");
  lss->add_option("--targets", ls.targets, "e.g. rho1=0.5,rho110=0.3333");
  lss->add_option("--coeffs", ls.coeffs, "exponent polynomial a0,a1,... (forward map)");
  lss->add_flag("--jacobian", ls.jacobian, "with --coeffs, the Jacobian of the forward map");
  lss->add_option("--grid", ls.grid)->capture_default_str();
  lss->add_option("--svg", ls.svg, "plot f to this file");
  lss->add_option("--entropy", ls.entropy, "print the entropy of a measure and exit");
  lss->callback([&] { run_limitshape(ls, g); });

  SampleArgs sm;
  auto* sms = app.add_subcommand("sample", "Metropolis sampling of exponentially tilted words");
  sms->add_option("--n", sm.n)->capture_default_str();
  sms->add_option("--pattern", sm.patterns, "repeat per pattern")->required();
  sms->add_option("--target", sm.targets, "target density per pattern (calibrates multipliers)");
  sms->add_option("--multiplier", sm.multipliers, "multiplier per pattern");
  sms->add_option("--sweeps", sm.sweeps)->capture_default_str();
  sms->add_option("--burn-in", sm.burn_in, "sweeps")->capture_default_str();
  sms->add_option("--record-every", sm.record_every)->capture_default_str();
  sms->add_option("--chains", sm.chains)->capture_default_str();
  sms->add_option("--rounds", sm.rounds, "calibration rounds")->capture_default_str();
  sms->add_option("--flip-fraction", sm.flip_fraction)->capture_default_str();
  sms->add_option("--reference", sm.reference, "limit shape targets for the d_W trace");
  sms->add_flag("--match", sm.match, "compare F-hat with the limit shape through the sampled densities");
  sms->add_option("--curve", sm.curve, "write F-hat as x,F,f");
  sms->callback([&] { run_sample(sm, g); });

  BrbrArgs bb;
  auto* bbs = app.add_subcommand("brbr", "arrange a deck to maximize a pattern count");
  bbs->add_option("--n", bb.n)->capture_default_str();
  bbs->add_option("--ones", bb.ones)->capture_default_str();
  bbs->add_option("--pattern", bb.pattern)->capture_default_str();
  bbs->add_option("--mode", bb.mode, "exhaustive, anneal or ascent")->capture_default_str();
  bbs->add_option("--restarts", bb.restarts)->capture_default_str();
  bbs->add_option("--steps", bb.steps, "annealing steps per restart")->capture_default_str();
  bbs->add_option("--start", bb.start, "starting word or new-deck");
  bbs->add_option("--trace", bb.trace, "write the annealing trace CSV");
  bbs->add_option("--svg", bb.svg, "write the lattice path of the best word");
  bbs->add_option("--evaluate", bb.evaluate, "only evaluate this word (or new-deck)");
  bbs->add_option("--gap", bb.gap, "sizes for the asymptotic gap report");
  bbs->callback([&] { run_brbr(bb, g); });

  HeisenbergArgs hb;
  auto* hbs = app.add_subcommand("heisenberg", "unitriangular matrix of a word");
  hbs->add_option("--mask", hb.mask)->required();
  hbs->add_option("--word", hb.word);
  hbs->add_option("--random", hb.random, "random host of this length from --seed");
  hbs->add_flag("--check-minors", hb.minors, "minimum minor of every order");
  hbs->add_option("--upper-right", hb.upper_right, "upper right k x k minor");
  hbs->callback([&] { run_heisenberg(hb, g); });

  std::vector<int> ids;
  auto* va = app.add_subcommand("verify-all", "run the acceptance suite");
  va->add_option("ids", ids, "criteria to run (all by default)");
  va->callback([&] { code = run_verify(ids, g); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleExponent& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "not converged: " << e.what() << " (best " << num(e.best_value()) << ")\n";
    return 3;
  } catch (const BoundaryReached& e) {
    std::cerr << "boundary reached: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return code;
}
