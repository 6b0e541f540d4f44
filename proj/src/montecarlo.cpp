#include "nnreflex/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nnreflex/distributions.hpp"
#include "nnreflex/exact.hpp"

namespace nnreflex {

namespace {

constexpr std::uint64_t kRandomizationTag = 0x72616e64ULL;
constexpr std::uint64_t kSizeTag = 0x73697a65ULL;
constexpr std::uint64_t kPowerTag = 0x706f7772ULL;
constexpr std::uint64_t kBackgroundStream = std::numeric_limits<std::uint64_t>::max();
constexpr int kMaternRetries = 100;

/// Runs f(worker, index) for index in [0, count) on `workers` threads.
/// Work is handed out in chunks; callers must make results independent of
/// which worker handles an index.
template <typename F>
void parallel_for(std::size_t count, unsigned workers, F&& f) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) f(0u, i);
    return;
  }
  constexpr std::size_t kChunk = 16;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (;;) {
          const std::size_t begin = next.fetch_add(kChunk);
          if (begin >= count) break;
          const std::size_t end = std::min(count, begin + kChunk);
          for (std::size_t i = begin; i < end; ++i) f(w, i);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

Point map_to_window(const Window& w, double u, double v) {
  return {w.x_min + u * w.width(), w.y_min + v * w.height()};
}

Point uniform_in(const Window& w, double lo, double hi, Rng& rng) {
  const double u = rng.uniform(lo, hi);
  const double v = rng.uniform(lo, hi);
  return map_to_window(w, u, v);
}

Point offset(const Point& base, double radius, const Window& w, Rng& rng) {
  const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return {base.x + radius * std::cos(theta) * w.width(), base.y + radius * std::sin(theta) * w.height()};
}

std::vector<ClassId> two_class_labels(std::size_t n1, std::size_t n) {
  std::vector<ClassId> labels(n, 1);
  std::fill_n(labels.begin(), n1, 0);
  return labels;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

PointSet generate_matern(const PatternSpec& spec, Rng& rng, std::vector<std::string>* warnings) {
  const Window& w = spec.window;
  for (int attempt = 0; attempt <= kMaternRetries; ++attempt) {
    std::vector<Point> points;
    const std::uint64_t parents = rng.poisson(spec.kappa * w.area());
    for (std::uint64_t c = 0; c < parents; ++c) {
      const Point centre = uniform_in(w, 0.0, 1.0, rng);
      const std::uint64_t children = rng.poisson(spec.mu);
      for (std::uint64_t j = 0; j < children; ++j) {
        const double rho = spec.r * std::sqrt(rng.uniform());
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        points.push_back({centre.x + rho * std::cos(theta), centre.y + rho * std::sin(theta)});
      }
    }
    if (points.size() >= 4) {
      const std::size_t n = points.size();
      return PointSet(std::move(points), two_class_labels(n / 2, n));
    }
    if (warnings) {
      warnings->push_back("Matern realization with " + std::to_string(points.size()) +
                          " points redrawn");
    }
  }
  throw std::runtime_error("Matern process produced fewer than four points in " +
                           std::to_string(kMaternRetries + 1) + " attempts");
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::csr: return "csr";
    case Family::rl_uniform: return "rl-uniform";
    case Family::rl_matern: return "rl-matern";
    case Family::alt_i: return "alt-I";
    case Family::alt_ii: return "alt-II";
    case Family::alt_iii: return "alt-III";
    case Family::alt_iv: return "alt-IV";
    case Family::alt_v: return "alt-V";
  }
  return "unknown";
}

Family parse_family(std::string_view text) {
  const std::string t = lower(text);
  if (t == "csr") return Family::csr;
  if (t == "rl-uniform" || t == "rl") return Family::rl_uniform;
  if (t == "rl-matern") return Family::rl_matern;
  if (t == "alt-i" || t == "alt-1") return Family::alt_i;
  if (t == "alt-ii" || t == "alt-2") return Family::alt_ii;
  if (t == "alt-iii" || t == "alt-3") return Family::alt_iii;
  if (t == "alt-iv" || t == "alt-4") return Family::alt_iv;
  if (t == "alt-v" || t == "alt-5") return Family::alt_v;
  throw std::invalid_argument("unknown pattern family '" + std::string(text) + "'");
}

void PatternSpec::validate() const {
  if (!(window.width() > 0.0 && window.height() > 0.0)) throw std::invalid_argument("window has no area");
  if (family == Family::rl_matern) {
    if (!(kappa >= 1.0)) throw std::invalid_argument("Matern kappa must be at least 1");
    if (!(mu > 0.0)) throw std::invalid_argument("Matern mu must be positive");
    if (!(r > 0.0)) throw std::invalid_argument("Matern radius must be positive");
    return;
  }
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("both class sizes must be positive");
  if (n1 + n2 < 2) throw std::invalid_argument("need at least two points");
  switch (family) {
    case Family::alt_i:
      if (!(sigma > 0.0)) throw std::invalid_argument("alt-I sigma must be positive");
      break;
    case Family::alt_ii:
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("alt-II p must lie in [0,1]");
      if (n1 < 2) throw std::invalid_argument("alt-II needs at least two class 1 points");
      break;
    case Family::alt_iii:
      if (!(s >= 0.0 && s < 1.0)) throw std::invalid_argument("alt-III s must lie in [0,1)");
      break;
    case Family::alt_iv:
      if (!(s >= 0.0 && s < 1.0)) throw std::invalid_argument("alt-IV support shift must lie in [0,1)");
      if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("alt-IV r must lie in (0,1)");
      if (n1 < 2 || n2 < 2) throw std::invalid_argument("alt-IV needs at least two points per class");
      break;
    case Family::alt_v:
      if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("alt-V r must lie in (0,1)");
      break;
    default:
      break;
  }
}

std::string PatternSpec::parameters() const {
  switch (family) {
    case Family::alt_i: return "sigma=" + format_number(sigma);
    case Family::alt_ii: return "p=" + format_number(p);
    case Family::alt_iii: return "s=" + format_number(s);
    case Family::alt_iv: return "s=" + format_number(s) + ";r=" + format_number(r);
    case Family::alt_v: return "r=" + format_number(r);
    case Family::rl_matern:
      return "kappa=" + format_number(kappa) + ";r=" + format_number(r) + ";mu=" + format_number(mu);
    default: return "";
  }
}

PointSet generate(const PatternSpec& spec, Rng& rng, std::vector<std::string>* warnings) {
  spec.validate();
  if (spec.family == Family::rl_matern) return generate_matern(spec, rng, warnings);

  const Window& w = spec.window;
  const std::size_t n1 = spec.n1;
  const std::size_t n2 = spec.n2;
  std::vector<Point> pts;
  pts.reserve(n1 + n2);

  switch (spec.family) {
    case Family::csr:
    case Family::rl_uniform:
      for (std::size_t i = 0; i < n1 + n2; ++i) pts.push_back(uniform_in(w, 0.0, 1.0, rng));
      break;
    case Family::alt_i:
      for (std::size_t i = 0; i < n1; ++i) pts.push_back(uniform_in(w, 0.0, 1.0, rng));
      for (std::size_t j = 0; j < n2; ++j) {
        const double u = 0.5 + spec.sigma * rng.normal();
        const double v = 0.5 + spec.sigma * rng.normal();
        pts.push_back(map_to_window(w, u, v));
      }
      break;
    case Family::alt_ii: {
      for (std::size_t i = 0; i < n1; ++i) pts.push_back(uniform_in(w, 0.0, 1.0, rng));
      const double d_min = min_interpoint_distance(std::span<const Point>(pts.data(), n1));
      for (std::size_t j = 0; j < n2; ++j) {
        if (rng.uniform() < spec.p) {
          const Point& x = pts[rng.uniform_index(n1)];
          const double radius = rng.uniform(0.0, d_min);
          const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
          pts.push_back({x.x + radius * std::cos(theta), x.y + radius * std::sin(theta)});
        } else {
          pts.push_back(uniform_in(w, 0.0, 1.0, rng));
        }
      }
      break;
    }
    case Family::alt_iii:
      for (std::size_t i = 0; i < n1; ++i) pts.push_back(uniform_in(w, 0.0, 1.0 - spec.s, rng));
      for (std::size_t j = 0; j < n2; ++j) pts.push_back(uniform_in(w, spec.s, 1.0, rng));
      break;
    case Family::alt_iv: {
      // The second half of each class lies within distance r of the point half a class earlier.
      auto fill = [&](std::size_t count, double lo, double hi) {
        const std::size_t first = pts.size();
        const std::size_t half = count / 2;
        for (std::size_t i = 0; i < half; ++i) pts.push_back(uniform_in(w, lo, hi, rng));
        for (std::size_t i = half; i < count; ++i) {
          const Point partner = pts[first + i - half];
          pts.push_back(offset(partner, rng.uniform(0.0, spec.r), w, rng));
        }
      };
      fill(n1, 0.0, 1.0 - spec.s);
      fill(n2, spec.s, 1.0);
      break;
    }
    case Family::alt_v:
      for (std::size_t i = 0; i < n1; ++i) pts.push_back(uniform_in(w, 0.0, 1.0, rng));
      for (std::size_t j = 0; j < n2; ++j) {
        const Point partner = pts[rng.uniform_index(n1)];
        pts.push_back(offset(partner, rng.uniform(0.0, spec.r), w, rng));
      }
      break;
    case Family::rl_matern:
      break;
  }
  return PointSet(std::move(pts), two_class_labels(n1, n1 + n2));
}

void shuffle_labels(std::span<ClassId> labels, Rng& rng) {
  for (std::size_t i = labels.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(labels[i - 1], labels[j]);
  }
}

PointSet random_label(const PointSet& ps, Rng& rng) {
  std::vector<ClassId> labels(ps.labels().begin(), ps.labels().end());
  shuffle_labels(labels, rng);
  return ps.with_labels(std::move(labels));
}

RelabelEngine::RelabelEngine(const NnGraph& graph, std::span<const ClassId> labels, std::size_t num_classes,
                             Weighting weighting, NullContext context)
    : graph_(graph),
      weights_(graph.edge_weights(weighting)),
      labels_(labels.begin(), labels.end()),
      num_classes_(num_classes),
      weighting_(weighting),
      context_(std::move(context)) {}

RelabelEngine::RelabelEngine(const Analysis& analysis, Weighting weighting)
    : RelabelEngine(analysis.graph, analysis.points.labels(), analysis.points.num_classes(), weighting,
                    analysis.context) {}

LabelTables RelabelEngine::observed() const {
  return label_tables(labels_, num_classes_, graph_, weights_, weighting_);
}

LabelTables RelabelEngine::relabel(Rng& rng, std::vector<ClassId>& scratch) const {
  scratch.assign(labels_.begin(), labels_.end());
  shuffle_labels(scratch, rng);
  return label_tables(scratch, num_classes_, graph_, weights_, weighting_);
}

bool at_least_as_extreme(double value, double observed, const StatisticSpec& spec) {
  const double tol = 1e-12 * std::max(1.0, std::fabs(observed));
  switch (spec.kind) {
    case StatisticKind::pielou_chi2:
    case StatisticKind::pielou_chi2_yates:
    case StatisticKind::chi2_reflexivity:
    case StatisticKind::species_overall:
      return value >= observed - tol;
    default:
      break;
  }
  switch (spec.alternative) {
    case Alternative::right: return value >= observed - tol;
    case Alternative::left: return value <= observed + tol;
    case Alternative::two_sided: return std::fabs(value) >= std::fabs(observed) - tol;
  }
  return false;
}

std::vector<RandomizationOutcome> randomization_pvalues(const RelabelEngine& engine,
                                                        std::span<const StatisticSpec> plan,
                                                        std::size_t n_mc, std::uint64_t seed,
                                                        std::uint64_t stream, unsigned workers) {
  if (n_mc == 0) throw std::invalid_argument("randomization_pvalues: n_mc must be positive");
  const std::size_t m = plan.size();
  const LabelTables obs_tables = engine.observed();
  std::vector<double> observed(m);
  for (std::size_t s = 0; s < m; ++s) observed[s] = statistic_value(plan[s], obs_tables, engine.context());

  const unsigned w = std::max(1u, workers);
  std::vector<std::vector<std::size_t>> extreme(w, std::vector<std::size_t>(m, 0));
  std::vector<std::vector<std::size_t>> undefined(w, std::vector<std::size_t>(m, 0));
  std::vector<std::vector<ClassId>> scratch(w);
  parallel_for(n_mc, w, [&](unsigned worker, std::size_t rep) {
    Rng rng = Rng::for_stream(seed, {kRandomizationTag, stream, rep});
    const LabelTables t = engine.relabel(rng, scratch[worker]);
    for (std::size_t s = 0; s < m; ++s) {
      if (std::isnan(observed[s])) continue;
      const double v = statistic_value(plan[s], t, engine.context());
      if (std::isnan(v)) {
        ++undefined[worker][s];
      } else if (at_least_as_extreme(v, observed[s], plan[s])) {
        ++extreme[worker][s];
      }
    }
  });

  std::vector<RandomizationOutcome> out(m);
  for (std::size_t s = 0; s < m; ++s) {
    RandomizationOutcome& o = out[s];
    o.replicates = n_mc;
    std::size_t count = 0;
    for (unsigned k = 0; k < w; ++k) {
      count += extreme[k][s];
      o.undefined += undefined[k][s];
    }
    if (std::isnan(observed[s])) {
      o.error = "statistic undefined on the observed data";
    } else if (static_cast<double>(o.undefined) > 0.05 * static_cast<double>(n_mc)) {
      o.error = "statistic undefined on " + std::to_string(o.undefined) + " of " + std::to_string(n_mc) +
                " relabelings";
    } else {
      o.p_value = static_cast<double>(1 + count) / static_cast<double>(n_mc + 1);
    }
  }
  return out;
}

double randomization_pvalue(const PointSet& ps, const StatisticSpec& statistic, std::size_t n_mc,
                            std::uint64_t seed, Weighting weighting, double tie_epsilon) {
  BatteryOptions options;
  options.weighting = weighting;
  options.tie_epsilon = tie_epsilon;
  const Analysis analysis = prepare_analysis(ps, options);
  const RelabelEngine engine(analysis, weighting);
  const StatisticSpec plan[] = {statistic};
  const auto out = randomization_pvalues(engine, plan, n_mc, seed);
  if (out[0].error) throw UndefinedStatistic(*out[0].error);
  return *out[0].p_value;
}

// ---------------------------------------------------------------------------

SimTest sim_test(std::string_view id) {
  const std::string s(id);
  auto make = [&](StatisticKind kind, Alternative alt, ClassId cls = 0,
                  DecisionRule rule = DecisionRule::asymptotic) {
    return SimTest{s, StatisticSpec{kind, alt, cls, {}}, rule};
  };
  if (s == "x2_p") return make(StatisticKind::pielou_chi2, Alternative::two_sided);
  if (s == "x2_p_yates") return make(StatisticKind::pielou_chi2_yates, Alternative::two_sided);
  if (s == "z_dir_right") return make(StatisticKind::z_directional, Alternative::right);
  if (s == "z_dir_left") return make(StatisticKind::z_directional, Alternative::left);
  if (s == "x2_r") return make(StatisticKind::chi2_reflexivity, Alternative::two_sided);
  if (s == "z_sr_right") return make(StatisticKind::z_self_reflexive, Alternative::right);
  if (s == "z_sr_left") return make(StatisticKind::z_self_reflexive, Alternative::left);
  if (s == "z_mnr_right") return make(StatisticKind::z_mixed_nonreflexive, Alternative::right);
  if (s == "z_mnr_left") return make(StatisticKind::z_mixed_nonreflexive, Alternative::left);
  if (s == "n_i") return make(StatisticKind::species_overall, Alternative::two_sided);
  if (s == "z_11_right") return make(StatisticKind::z_cell, Alternative::right, 0);
  if (s == "z_11_left") return make(StatisticKind::z_cell, Alternative::left, 0);
  if (s == "z_22_right") return make(StatisticKind::z_cell, Alternative::right, 1);
  if (s == "z_22_left") return make(StatisticKind::z_cell, Alternative::left, 1);
  if (s.rfind("fisher_", 0) == 0) {
    const auto sep = s.find('_', 7);
    if (sep != std::string::npos) {
      const std::string side = s.substr(7, sep - 7);
      const std::string variant = s.substr(sep + 1);
      const Alternative alt = side == "right" ? Alternative::right
                              : side == "left" ? Alternative::left
                                               : Alternative::two_sided;
      std::optional<DecisionRule> rule;
      if (variant == "inc") rule = DecisionRule::fisher_inclusive;
      if (variant == "exc") rule = DecisionRule::fisher_exclusive;
      if (variant == "mid") rule = DecisionRule::fisher_mid;
      if (variant == "toc") rule = DecisionRule::fisher_tocher;
      if (alt != Alternative::two_sided && rule) return make(StatisticKind::fisher_exact, alt, 0, *rule);
    }
  }
  throw std::invalid_argument("unknown test id '" + s + "'");
}

std::vector<SimTest> default_size_tests() {
  std::vector<SimTest> out;
  for (const char* id : {"x2_p", "z_dir_right", "z_dir_left", "x2_r", "z_sr_right", "z_mnr_left", "n_i",
                         "z_11_right", "z_22_right"}) {
    out.push_back(sim_test(id));
  }
  return out;
}

std::vector<SimTest> default_power_tests(Family family) {
  // Association-type alternatives are tested on the opposite sides.
  const bool association = family == Family::alt_ii || family == Family::alt_v;
  std::vector<SimTest> out;
  for (const char* id : {"fisher_right_inc", "fisher_left_inc", "x2_r"}) out.push_back(sim_test(id));
  out.push_back(sim_test(association ? "z_sr_left" : "z_sr_right"));
  out.push_back(sim_test(association ? "z_mnr_right" : "z_mnr_left"));
  out.push_back(sim_test("n_i"));
  out.push_back(sim_test(association ? "z_11_left" : "z_11_right"));
  out.push_back(sim_test(association ? "z_22_left" : "z_22_right"));
  return out;
}

std::vector<SimTest> parse_sim_tests(std::string_view text, Family family) {
  std::vector<SimTest> out;
  auto add = [&](std::vector<SimTest> tests) {
    for (auto& t : tests) {
      const bool seen = std::any_of(out.begin(), out.end(), [&](const SimTest& o) { return o.id == t.id; });
      if (!seen) out.push_back(std::move(t));
    }
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    std::string_view item =
        text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == "size") {
      add(default_size_tests());
    } else if (item == "power") {
      add(default_power_tests(family));
    } else if (item == "exact" || item == "all") {
      std::vector<SimTest> exact;
      for (const char* side : {"right", "left"}) {
        for (const char* v : {"inc", "exc", "mid", "toc"}) {
          exact.push_back(sim_test(std::string("fisher_") + side + "_" + v));
        }
      }
      if (item == "all") {
        add(default_size_tests());
        for (const char* id : {"x2_p_yates", "z_sr_left", "z_mnr_right", "z_11_left", "z_22_left"}) {
          add({sim_test(id)});
        }
      }
      add(std::move(exact));
    } else if (!item.empty()) {
      add({sim_test(item)});
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("empty test list");
  return out;
}

std::string_view to_string(SizeFlag flag) {
  switch (flag) {
    case SizeFlag::nominal: return "nominal";
    case SizeFlag::liberal: return "liberal";
    case SizeFlag::conservative: return "conservative";
  }
  return "nominal";
}

std::pair<double, double> size_band(double alpha, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double half = normal_quantile(0.95) * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(trials));
  return {alpha - half, alpha + half};
}

namespace {

enum class Outcome : std::uint8_t { accept, reject, undefined };

Outcome decide(const SimTest& test, const LabelTables& tables, const NullContext& context, double alpha,
               Rng& rng) {
  const TestResult r = evaluate_statistic(test.spec, tables, context, &rng);
  if (r.error) return Outcome::undefined;
  double p = 0.0;
  switch (test.rule) {
    case DecisionRule::asymptotic:
      if (!r.p_asymptotic) return Outcome::undefined;
      p = *r.p_asymptotic;
      break;
    case DecisionRule::fisher_inclusive: p = r.diagnostics.at("p_inclusive"); break;
    case DecisionRule::fisher_exclusive: p = r.diagnostics.at("p_exclusive"); break;
    case DecisionRule::fisher_mid: p = r.diagnostics.at("p_mid"); break;
    case DecisionRule::fisher_tocher: p = r.diagnostics.at("p_tocher"); break;
  }
  return p <= alpha ? Outcome::reject : Outcome::accept;
}

struct Tally {
  std::vector<std::size_t> rejections;
  std::vector<std::size_t> defined;
};

void evaluate_replicate(std::span<const SimTest> tests, const LabelTables& tables, const NullContext& context,
                        double alpha, Rng& rng, Tally& tally) {
  for (std::size_t t = 0; t < tests.size(); ++t) {
    const Outcome o = decide(tests[t], tables, context, alpha, rng);
    if (o == Outcome::undefined) continue;
    ++tally.defined[t];
    if (o == Outcome::reject) ++tally.rejections[t];
  }
}

BatteryOptions battery_options(const SimulationOptions& options) {
  BatteryOptions b;
  b.alpha = options.alpha;
  b.weighting = options.weighting;
  b.tie_epsilon = options.tie_epsilon;
  b.seed = options.seed;
  return b;
}

void check_tests(std::span<const SimTest> tests) {
  if (tests.empty()) throw std::invalid_argument("no tests selected");
  for (const SimTest& t : tests) {
    if (t.spec.kind == StatisticKind::z_cell && t.spec.cls > 1) {
      throw std::invalid_argument("simulations use two classes; test " + t.id + " needs more");
    }
  }
}

/// Rows for one spec from per-worker tallies.
void append_rows(SimulationReport& report, const PatternSpec& spec, std::span<const SimTest> tests,
                 const std::vector<Tally>& tallies, std::size_t replicates, bool size) {
  for (std::size_t t = 0; t < tests.size(); ++t) {
    SimulationRow row;
    row.spec = spec;
    row.test = tests[t].id;
    row.replicates = replicates;
    for (const Tally& tally : tallies) {
      row.rejections += tally.rejections[t];
      row.defined += tally.defined[t];
    }
    if (row.defined > 0) {
      row.rate = static_cast<double>(row.rejections) / static_cast<double>(row.defined);
      row.mc_se = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(row.defined));
    }
    if (size) {
      const auto [lo, hi] = size_band(report.options.alpha, row.defined);
      row.lower_band = lo;
      row.upper_band = hi;
      row.flag = row.defined == 0 ? SizeFlag::nominal
                 : row.rate < lo ? SizeFlag::conservative
                 : row.rate > hi ? SizeFlag::liberal
                                 : SizeFlag::nominal;
    }
    report.rows.push_back(std::move(row));
  }
}

std::vector<Tally> fresh_tallies(unsigned workers, std::size_t tests) {
  return std::vector<Tally>(workers, Tally{std::vector<std::size_t>(tests, 0), std::vector<std::size_t>(tests, 0)});
}

/// n_mc independent realizations of `spec`, each tested once.
void run_fresh_patterns(SimulationReport& report, const PatternSpec& spec, std::size_t spec_index,
                        std::uint64_t tag, std::span<const SimTest> tests, bool size) {
  const SimulationOptions& o = report.options;
  const unsigned workers = std::max(1u, o.workers);
  auto tallies = fresh_tallies(workers, tests.size());
  const BatteryOptions bo = battery_options(o);
  parallel_for(o.n_mc, workers, [&](unsigned worker, std::size_t rep) {
    Rng rng = Rng::for_stream(o.seed, {tag, spec_index, rep});
    const PointSet ps = generate(spec, rng);
    NnGraph graph = build_nn_graph(ps, bo.tie_epsilon);
    const auto weights = graph.edge_weights(bo.weighting);
    const LabelTables tables = label_tables(ps.labels(), ps.num_classes(), graph, weights, bo.weighting);
    NullContext context;
    context.class_sizes.assign(ps.class_sizes().begin(), ps.class_sizes().end());
    context.species = species_moments(ps, graph);
    context.alpha = bo.alpha;
    evaluate_replicate(tests, tables, context, o.alpha, rng, tallies[worker]);
  });
  append_rows(report, spec, tests, tallies, o.n_mc, size);
}

/// `backgrounds` fixed location sets, each relabeled n_mc times.
void run_random_labeling(SimulationReport& report, const PatternSpec& spec, std::size_t spec_index,
                         std::span<const SimTest> tests) {
  const SimulationOptions& o = report.options;
  const unsigned workers = std::max(1u, o.workers);
  const std::size_t nb = o.backgrounds;
  if (nb == 0) throw std::invalid_argument("random-labeling runs need at least one background");

  std::vector<std::optional<RelabelEngine>> engines(nb);
  std::vector<std::vector<std::string>> notes(nb);
  const BatteryOptions bo = battery_options(o);
  parallel_for(nb, workers, [&](unsigned, std::size_t b) {
    Rng rng = Rng::for_stream(o.seed, {kSizeTag, spec_index, b, kBackgroundStream});
    PointSet ps = generate(spec, rng, &notes[b]);
    const Analysis analysis = prepare_analysis(std::move(ps), bo);
    engines[b].emplace(analysis, bo.weighting);
  });
  for (std::size_t b = 0; b < nb; ++b) {
    for (const auto& note : notes[b]) report.warnings.push_back("background " + std::to_string(b) + ": " + note);
  }

  auto tallies = fresh_tallies(workers, tests.size());
  std::vector<std::vector<ClassId>> scratch(workers);
  parallel_for(nb * o.n_mc, workers, [&](unsigned worker, std::size_t flat) {
    const std::size_t b = flat / o.n_mc;
    const std::size_t m = flat % o.n_mc;
    Rng rng = Rng::for_stream(o.seed, {kSizeTag, spec_index, b, m});
    const RelabelEngine& engine = *engines[b];
    const LabelTables tables = engine.relabel(rng, scratch[worker]);
    evaluate_replicate(tests, tables, engine.context(), o.alpha, rng, tallies[worker]);
  });
  append_rows(report, spec, tests, tallies, nb * o.n_mc, true);
}

}  // namespace

SimulationReport empirical_size(std::span<const PatternSpec> grid, std::span<const SimTest> tests,
                                const SimulationOptions& options) {
  if (grid.empty()) throw std::invalid_argument("empty simulation grid");
  check_tests(tests);
  if (options.n_mc == 0) throw std::invalid_argument("n_mc must be positive");
  SimulationReport report{"size", options, {}, {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const PatternSpec& spec = grid[i];
    spec.validate();
    if (!spec.is_null()) {
      throw std::invalid_argument("size runs need null families, got " + std::string(to_string(spec.family)));
    }
    if (spec.is_random_labeling()) {
      run_random_labeling(report, spec, i, tests);
    } else {
      run_fresh_patterns(report, spec, i, kSizeTag, tests, true);
    }
  }
  return report;
}

SimulationReport empirical_power(std::span<const PatternSpec> grid, std::span<const SimTest> tests,
                                 const SimulationOptions& options) {
  if (grid.empty()) throw std::invalid_argument("empty simulation grid");
  check_tests(tests);
  if (options.n_mc == 0) throw std::invalid_argument("n_mc must be positive");
  SimulationReport report{"power", options, {}, {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const PatternSpec& spec = grid[i];
    spec.validate();
    if (spec.is_null()) {
      throw std::invalid_argument("power runs need alternative families, got " +
                                  std::string(to_string(spec.family)));
    }
    run_fresh_patterns(report, spec, i, kPowerTag, tests, false);
  }
  return report;
}

}  // namespace nnreflex
