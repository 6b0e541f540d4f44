// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// The Urkiola criteria read URKIOLA_CSV, else data/urkiola.csv under the
// source tree (columns x, y, label with labels birch/oak).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nnreflex/battery.hpp"
#include "nnreflex/exact.hpp"
#include "nnreflex/io.hpp"
#include "nnreflex/montecarlo.hpp"
#include "nnreflex/report.hpp"
#include "nnreflex/runner.hpp"
#include "nnreflex/stat_tests.hpp"
#include "oracle_moments.hpp"

#ifndef NNREFLEX_SOURCE_DIR
#define NNREFLEX_SOURCE_DIR "."
#endif

using namespace nnreflex;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// Published Table 8 values, in battery_plan order for two classes.
struct Published {
  const char* label;
  double statistic;  // NaN when the column shares a statistic with its neighbour
  double p_asy;
};
const Published kTable8[] = {
    {"X2_P(Yates)", 0.2346, 0.6282}, {"Zdir>", 0.5444, 0.2931},  {"Zdir<", NAN, 0.7069},
    {"TF>", 1.0674, 0.3138},         {"TF<", NAN, 0.7274},       {"X2_R", 8.9538, 0.0114},
    {"Zsr>", 2.2539, 0.0121},        {"Zmnr<", -1.9682, 0.0245}, {"N_I", 11.4079, 0.0033},
    {"Z11>", 2.9011, 0.0019},        {"Z22>", 2.7047, 0.0034},
};

std::optional<std::string> urkiola_path() {
  if (const char* env = std::getenv("URKIOLA_CSV"); env && *env) return std::string(env);
  const std::string local = std::string(NNREFLEX_SOURCE_DIR) + "/data/urkiola.csv";
  if (std::filesystem::exists(local)) return local;
  return std::nullopt;
}

const char* kNoData =
    "Urkiola coordinates not found (set URKIOLA_CSV or add data/urkiola.csv)";

Outcome criterion_1(const std::optional<Dataset>& data, double load_seconds) {
  if (!data) return {false, kNoData};
  const auto start = Clock::now();
  const auto section = tables_section(data->points, Weighting::ordered_edge, 0.0);
  const double secs = seconds_since(start) + load_seconds;
  const auto& t = section.rct;
  const std::vector<std::string> names = data->points.class_names();
  const bool sizes = data->points.size() == 1245 && section.class_sizes == std::vector<std::size_t>{886, 359};
  const bool rct = t == NnRct{475, 259, 323, 188};
  const bool scct = section.scct.self == std::vector<double>{668, 130};
  std::ostringstream os;
  os << "NN-RCT (" << t.self_reflexive << ", " << t.mixed_reflexive << " / " << t.self_nonreflexive << ", "
     << t.mixed_nonreflexive << "), SCCT self (" << section.scct.self[0] << ", " << section.scct.self[1]
     << "), n = " << data->points.size() << ", " << fmt("%.3f s", secs);
  return {sizes && rct && scct && secs < 1.0, os.str()};
}

/// Table-level statistics from the published NN-RCT; needs no coordinates.
std::pair<int, std::string> table_level_check() {
  const NnRct t{475, 259, 323, 188};
  const auto m = reflexivity_moments(std::vector<std::size_t>{886, 359}, t);
  Rng rng(0);
  const double values[] = {pielou_chi2(t, true).statistic,
                           z_directional(t, Alternative::right).statistic,
                           fisher_one_sided(t, Alternative::right, 0.05, rng).odds_ratio,
                           chi2_reflexivity(t, m).statistic,
                           z_self_reflexivity(t, m, Alternative::right).statistic,
                           z_mixed_nonreflexivity(t, m, Alternative::left).statistic};
  const double published[] = {0.2346, 0.5444, 1.0674, 8.9538, 2.2539, -1.9682};
  int ok = 0;
  for (int i = 0; i < 6; ++i) ok += std::fabs(values[i] - published[i]) <= 0.001;
  return {ok, std::to_string(ok) + "/6 statistics from the published NN-RCT within 0.001"};
}

Outcome criterion_2(const std::optional<Dataset>& data) {
  const auto [table_ok, table_detail] = table_level_check();
  if (!data) return {false, std::string(kNoData) + "; " + table_detail + "; N_I, Z11, Z22 need coordinates"};
  RunConfig cfg;
  cfg.n_mc = 99;
  cfg.workers = worker_count();
  const auto report = run_battery(*data, cfg);
  const auto& results = report.sections.at(0).results;
  std::ostringstream os;
  bool pass = true;
  for (std::size_t i = 0; i < std::size(kTable8); ++i) {
    const auto& r = results.at(i + 1);  // skip the uncorrected X2_P
    const auto& pub = kTable8[i];
    const bool stat_ok = std::isnan(pub.statistic) || std::fabs(r.statistic - pub.statistic) <= 0.001;
    const bool p_ok = r.p_asymptotic && std::fabs(*r.p_asymptotic - pub.p_asy) <= 0.0005;
    if (!stat_ok || !p_ok) {
      pass = false;
      os << pub.label << " " << fmt("%.4f", r.statistic) << " (p " << fmt("%.4f", r.p_asymptotic.value_or(NAN))
         << ") ";
    }
  }
  if (pass) os << "all statistics and asymptotic p-values within tolerance";
  return {pass, os.str()};
}

Outcome criterion_3(const std::optional<Dataset>& data) {
  if (!data) return {false, kNoData};
  RunConfig cfg;
  cfg.n_mc = 10000;
  cfg.seed = 1;
  cfg.workers = worker_count();
  const auto start = Clock::now();
  const auto report = run_battery(*data, cfg);
  const double secs = seconds_since(start);
  const auto& results = report.sections.at(0).results;
  // X2_R, N_I, Z11 in battery order.
  const std::pair<std::size_t, double> targets[] = {{6, 0.0044}, {9, 0.0032}, {10, 0.0011}};
  bool pass = secs < 60.0;
  std::ostringstream os;
  for (const auto& [index, published] : targets) {
    const double p = results.at(index).p_randomization.value_or(NAN);
    pass = pass && std::fabs(p - published) <= 0.005;
    os << short_label(results.at(index)) << " " << fmt("%.4f", p) << " ";
  }
  os << fmt("(%.1f s)", secs);
  return {pass, os.str()};
}

double rate_of(const SimulationReport& report, const std::string& test, std::size_t spec_index = 0) {
  for (const auto& row : report.rows) {
    if (row.test == test && spec_index-- == 0) return row.rate;
  }
  return NAN;
}

SimulationOptions sim_options(std::size_t n_mc) {
  SimulationOptions opt;
  opt.n_mc = n_mc;
  opt.seed = 1;
  opt.workers = worker_count();
  return opt;
}

PatternSpec pattern(Family f, std::size_t n1, std::size_t n2) {
  PatternSpec s;
  s.family = f;
  s.n1 = n1;
  s.n2 = n2;
  return s;
}

std::vector<SimTest> tests_of(const std::string& ids) { return parse_sim_tests(ids, Family::csr); }

Outcome criterion_4() {
  const auto start = Clock::now();
  const std::vector<PatternSpec> grid{pattern(Family::csr, 50, 50)};
  const auto report = empirical_size(grid, tests_of("z_dir_right,n_i"), sim_options(2000));
  const double secs = seconds_since(start);
  const double zdir = rate_of(report, "z_dir_right"), ni = rate_of(report, "n_i");
  const bool pass = zdir >= 0.070 && zdir <= 0.105 && ni >= 0.035 && ni <= 0.060 && secs < 300;
  return {pass, "Zdir> " + fmt("%.4f", zdir) + ", N_I " + fmt("%.4f", ni) + fmt(" (%.1f s)", secs)};
}

Outcome criterion_5() {
  const std::vector<PatternSpec> grid{pattern(Family::csr, 30, 30)};
  const auto report = empirical_size(grid, tests_of("fisher_right_inc,fisher_right_exc,fisher_left_inc,fisher_left_exc"),
                                     sim_options(2000));
  const double inc = rate_of(report, "fisher_right_inc"), exc = rate_of(report, "fisher_right_exc");
  const bool pass = inc >= 0.040 && inc <= 0.070 && exc >= 0.10 && exc <= 0.16;
  return {pass, "self side: inc " + fmt("%.4f", inc) + ", exc " + fmt("%.4f", exc) + "; mixed side: inc " +
                    fmt("%.4f", rate_of(report, "fisher_left_inc")) + ", exc " +
                    fmt("%.4f", rate_of(report, "fisher_left_exc"))};
}

Outcome criterion_6() {
  auto third = pattern(Family::alt_iii, 40, 40);
  third.s = 1.0 / 3.0;
  auto sixth = third;
  sixth.s = 1.0 / 6.0;
  const std::vector<PatternSpec> grid{third, sixth};
  const auto report = empirical_power(grid, parse_sim_tests("x2_r,n_i", Family::alt_iii), sim_options(2000));
  const double x2r3 = rate_of(report, "x2_r", 0), ni3 = rate_of(report, "n_i", 0);
  const double x2r6 = rate_of(report, "x2_r", 1);
  const bool pass = x2r3 >= 0.99 && ni3 >= 0.99 && x2r6 >= 0.40 && x2r6 <= 0.52;
  return {pass, "s = 1/3: X2_R " + fmt("%.4f", x2r3) + ", N_I " + fmt("%.4f", ni3) + "; s = 1/6: X2_R " +
                    fmt("%.4f", x2r6)};
}

Outcome criterion_7() {
  auto spec = pattern(Family::alt_v, 40, 40);
  spec.r = 0.1;
  const std::vector<PatternSpec> grid{spec};
  const auto report =
      empirical_power(grid, parse_sim_tests("fisher_right_inc,z_sr_left", Family::alt_v), sim_options(2000));
  const double exact = rate_of(report, "fisher_right_inc"), zsr = rate_of(report, "z_sr_left");
  const bool pass = exact <= 0.01 && zsr >= 0.79 && zsr <= 0.89;
  return {pass, "TF> " + fmt("%.4f", exact) + ", Zsr< " + fmt("%.4f", zsr)};
}

Outcome criterion_8() {
  const auto start = Clock::now();
  const auto e = oracle::check_moments(50, 2024);
  const double secs = seconds_since(start);
  const bool exact_ok = e.exact < 1e-10;
  const bool approx_ok = e.approximate <= 0.25;
  std::ostringstream os;
  os << e.configurations << " configurations, " << e.labelings << " labelings; exact moments max error "
     << fmt("%.2e", e.exact) << "; approximate variances max relative error " << fmt("%.3f", e.approximate)
     << fmt(" (%.2f s)", secs);
  return {exact_ok && approx_ok && secs < 30.0, os.str()};
}

Outcome criterion_9() {
  std::mt19937_64 gen(9);
  std::uniform_int_distribution<int> cell(1, 500);
  double worst_identity = 0, worst_exact = 0;
  bool ordering = true;
  Rng rng(9);
  for (int rep = 0; rep < 1000; ++rep) {
    const NnRct t{double(cell(gen)), double(cell(gen)), double(cell(gen)), double(cell(gen))};
    const double x2 = pielou_chi2(t).statistic;
    const double z = z_directional(t, Alternative::right).statistic;
    worst_identity = std::max(worst_identity, std::fabs(z * z - x2) / std::max(1.0, x2));
    const std::size_t n1 = 1 + gen() % static_cast<std::size_t>(t.total() - 1);
    const auto m = reflexivity_moments(std::vector<std::size_t>{n1, static_cast<std::size_t>(t.total()) - n1}, t);
    const double a = z_self_reflexivity(t, m, Alternative::right).statistic;
    const double b = z_mixed_nonreflexivity(t, m, Alternative::left).statistic;
    worst_identity = std::max(worst_identity, std::fabs(chi2_reflexivity(t, m).statistic - a * a - b * b) /
                                                  std::max(1.0, a * a + b * b));

    const auto r = fisher_one_sided(t, Alternative::right, 0.05, rng);
    const auto l = fisher_one_sided(t, Alternative::left, 0.05, rng);
    worst_exact = std::max(worst_exact, std::fabs(r.p_inclusive + l.p_inclusive - 1.0 - r.p_table));
    for (const auto* e : {&r, &l}) {
      ordering = ordering && e->p_exclusive <= e->p_tocher && e->p_tocher <= e->p_inclusive &&
                 e->p_exclusive <= e->p_mid && e->p_mid <= e->p_inclusive;
      worst_exact = std::max(worst_exact, std::fabs(e->p_exclusive - (e->p_inclusive - e->p_table)));
      worst_exact = std::max(worst_exact, std::fabs(e->p_mid - (e->p_inclusive - e->p_table / 2)));
    }
  }
  const bool pass = worst_identity <= 1e-10 && worst_exact <= 1e-12 && ordering;
  return {pass, "identity error " + fmt("%.1e", worst_identity) + ", exact relation error " +
                    fmt("%.1e", worst_exact) + (ordering ? ", orderings hold" : ", ordering violated")};
}

Outcome criterion_10() {
  std::vector<PatternSpec> size_grid{pattern(Family::csr, 20, 20), pattern(Family::rl_uniform, 15, 25)};
  auto matern = pattern(Family::rl_matern, 0, 0);
  matern.kappa = 10;
  matern.mu = 10;
  size_grid.push_back(matern);
  auto alt = pattern(Family::alt_ii, 20, 20);
  const std::vector<PatternSpec> power_grid{alt};
  std::vector<std::string> csv;
  for (unsigned workers : {1u, 2u, 5u}) {
    SimulationOptions opt;
    opt.n_mc = 300;
    opt.backgrounds = 4;
    opt.seed = 0xC0FFEE;
    opt.workers = workers;
    csv.push_back(simulation_csv(empirical_size(size_grid, parse_sim_tests("all", Family::csr), opt)) +
                  simulation_csv(empirical_power(power_grid, parse_sim_tests("all", Family::alt_ii), opt)));
  }
  const bool pass = csv[0] == csv[1] && csv[0] == csv[2];
  return {pass, "size and power CSV with 1, 2 and 5 workers " + std::string(pass ? "identical" : "differ")};
}

}  // namespace

int main() {
  std::optional<Dataset> urkiola;
  double load_seconds = 0;
  if (auto path = urkiola_path()) {
    const auto start = Clock::now();
    urkiola = read_points_csv(*path, CsvSchema{});
    load_seconds = seconds_since(start);
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Urkiola tables", [&] { return criterion_1(urkiola, load_seconds); }},
      {"Urkiola statistics", [&] { return criterion_2(urkiola); }},
      {"Urkiola randomization p-values", [&] { return criterion_3(urkiola); }},
      {"CSR size, Z_dir and N_I", criterion_4},
      {"CSR size, exact variants", criterion_5},
      {"case III power", criterion_6},
      {"case V power", criterion_7},
      {"exhaustive-oracle moments", criterion_8},
      {"algebraic identities", criterion_9},
      {"determinism across workers", criterion_10},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  criterion %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
