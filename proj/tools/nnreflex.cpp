// nnreflex: NN reflexivity and species-correspondence tests for labeled
// planar point patterns, plus the size/power simulation harness.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nnreflex/config.hpp"
#include "nnreflex/io.hpp"
#include "nnreflex/montecarlo.hpp"
#include "nnreflex/report.hpp"
#include "nnreflex/runner.hpp"

using namespace nnreflex;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitUndefined = 3;
constexpr int kExitFailure = 1;

struct Formats {
  bool json = false;
  bool csv = false;
  bool text = false;
};

Formats parse_formats(const std::string& text) {
  Formats f;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item == "json") {
      f.json = true;
    } else if (item == "csv") {
      f.csv = true;
    } else if (item == "text") {
      f.text = true;
    } else if (!item.empty()) {
      throw std::invalid_argument("unknown output format '" + item + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return f;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot write");
  out << content;
}

std::string default_stem(const std::string& input, const std::string& fallback) {
  if (input.empty()) return fallback;
  return std::filesystem::path(input).stem().string();
}

/// Loads the config file named by --config before the real parse, so flags override it.
RunConfig initial_config(int argc, char** argv) {
  RunConfig config;
  if (auto seed = seed_from_environment()) config.seed = *seed;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    std::string path;
    if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
    if (!path.empty()) apply_config(config, read_key_value_file(path));
  }
  return config;
}

struct SimulationArgs {
  std::string family;
  std::string sizes;
  std::string n1;
  std::string n2;
  std::string sigma, p, s, r;
  std::string kappa, mu;
  double radius = 0.1;
};

std::vector<std::pair<std::size_t, std::size_t>> class_size_grid(const SimulationArgs& a,
                                                                  const std::string& fallback) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (!a.sizes.empty()) {
    if (!a.n1.empty() || !a.n2.empty()) throw std::invalid_argument("use either --sizes or --n1/--n2");
    for (auto n : parse_size_grid(a.sizes)) out.emplace_back(n, n);
    return out;
  }
  const std::string n1 = a.n1.empty() ? (a.n2.empty() ? fallback : a.n2) : a.n1;
  const std::string n2 = a.n2.empty() ? n1 : a.n2;
  if (n1.empty()) throw std::invalid_argument("class sizes are required (--sizes or --n1/--n2)");
  for (auto x : parse_size_grid(n1)) {
    for (auto y : parse_size_grid(n2)) out.emplace_back(x, y);
  }
  return out;
}

std::vector<PatternSpec> size_grid(const SimulationArgs& a) {
  const Family family = parse_family(a.family);
  std::vector<PatternSpec> grid;
  if (family == Family::rl_matern) {
    if (a.kappa.empty()) throw std::invalid_argument("rl-matern needs --kappa");
    const auto kappas = parse_grid(a.kappa);
    const std::vector<double> mus = a.mu.empty() ? std::vector<double>{} : parse_grid(a.mu);
    if (!mus.empty() && mus.size() != kappas.size() && mus.size() != 1) {
      throw std::invalid_argument("--mu must have one value or one per --kappa value");
    }
    for (std::size_t i = 0; i < kappas.size(); ++i) {
      PatternSpec s;
      s.family = family;
      s.kappa = kappas[i];
      s.mu = mus.empty() ? std::floor(100.0 / kappas[i]) : (mus.size() == 1 ? mus[0] : mus[i]);
      s.r = a.radius;
      grid.push_back(s);
    }
    return grid;
  }
  if (family != Family::csr && family != Family::rl_uniform) {
    throw std::invalid_argument("simulate-size takes csr, rl-uniform or rl-matern");
  }
  for (auto [n1, n2] : class_size_grid(a, "")) {
    PatternSpec s;
    s.family = family;
    s.n1 = n1;
    s.n2 = n2;
    grid.push_back(s);
  }
  return grid;
}

std::vector<PatternSpec> power_grid(const SimulationArgs& a) {
  const Family family = parse_family(a.family);
  auto values = [](const std::string& given, const char* fallback) { return parse_grid(given.empty() ? fallback : given); };
  std::vector<PatternSpec> grid;
  for (auto [n1, n2] : class_size_grid(a, "40")) {
    PatternSpec base;
    base.family = family;
    base.n1 = n1;
    base.n2 = n2;
    switch (family) {
      case Family::alt_i:
        for (double v : values(a.sigma, "1/10,1/20,1/30")) {
          base.sigma = v;
          grid.push_back(base);
        }
        break;
      case Family::alt_ii:
        for (double v : values(a.p, "0.25,0.5,0.75")) {
          base.p = v;
          grid.push_back(base);
        }
        break;
      case Family::alt_iii:
        for (double v : values(a.s, "1/6,1/4,1/3")) {
          base.s = v;
          grid.push_back(base);
        }
        break;
      case Family::alt_iv:
        for (double s : values(a.s, "0,1/6,1/4")) {
          for (double r : values(a.r, "1/7,1/8,1/9")) {
            base.s = s;
            base.r = r;
            grid.push_back(base);
          }
        }
        break;
      case Family::alt_v:
        for (double v : values(a.r, "1/4,1/7,1/10")) {
          base.r = v;
          grid.push_back(base);
        }
        break;
      default:
        throw std::invalid_argument("simulate-power takes alt-I .. alt-V");
    }
  }
  return grid;
}

int emit_battery(const BatteryReport& report, const RunConfig& config, const std::string& stem) {
  const Formats f = parse_formats(config.format);
  if (f.json) write_file(stem + ".report.json", to_json(report).dump(2) + "\n");
  if (f.csv) write_file(stem + ".report.csv", battery_csv(report));
  if (f.text) std::cout << battery_text(report);
  return 0;
}

int emit_simulation(const SimulationReport& report, const RunConfig& config, const std::string& stem,
                    double runtime) {
  const Formats f = parse_formats(config.format);
  if (f.json) write_file(stem + ".report.json", to_json(report, runtime).dump(2) + "\n");
  if (f.csv) write_file(stem + ".report.csv", simulation_csv(report));
  if (f.text) std::cout << simulation_text(report);
  return 0;
}

void add_common(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--config", "key = value file; flags override its settings");
  cmd->add_option("--alpha", c.alpha, "Nominal level")->capture_default_str();
  cmd->add_option("--n-mc", c.n_mc, "Monte Carlo replications")->capture_default_str();
  cmd->add_option_function<std::string>(
         "--seed", [&c](const std::string& s) { c.seed = parse_seed(s); },
         "64-bit seed (default from NNREFLEX_SEED, else 0)");
  cmd->add_option_function<std::string>(
         "--weights", [&c](const std::string& s) { c.weighting = parse_weighting(s); },
         "Edge weighting with NN ties: ordered-edge or pielou");
  cmd->add_option("--tie-epsilon", c.tie_epsilon, "Absolute distance tolerance for NN ties")->capture_default_str();
  cmd->add_option("--workers", c.workers, "Worker threads")->capture_default_str();
  cmd->add_option("--out", c.out, "Output file stem (writes <stem>.report.json and .csv)");
  cmd->add_option("--format", c.format, "Comma list of json, csv, text")->capture_default_str();
}

void add_input(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("input", c.input, "Delimited text file with x, y and label columns");
  cmd->add_option("--x-col", c.schema.x_column, "Name of the x column")->capture_default_str();
  cmd->add_option("--y-col", c.schema.y_column, "Name of the y column")->capture_default_str();
  cmd->add_option("--label-col", c.schema.label_column, "Name of the label column")->capture_default_str();
  cmd->add_option_function<std::string>(
      "--delimiter",
      [&c](const std::string& d) {
        if (d == "tab" || d == "\\t") {
          c.schema.delimiter = '\t';
        } else if (d.size() == 1) {
          c.schema.delimiter = d[0];
        } else {
          throw CLI::ValidationError("--delimiter", "one character or 'tab'");
        }
      },
      "Field delimiter (default ',')");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  try {
    config = initial_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App app{"Nearest-neighbor reflexivity and species-correspondence tests"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  auto* test = app.add_subcommand("test", "Run the test battery on a labeled point pattern");
  add_input(test, config);
  add_common(test, config);
  test->add_option("--tests", config.tests, "Comma list of pielou, exact, reflexivity, scc, all")
      ->capture_default_str();
  test->add_option("--posthoc", config.posthoc,
                   "Post-hoc comparisons for k > 2: pairwise-restricted, pairwise-unrestricted, one-vs-rest");
  test->add_flag("--lenient", config.lenient, "Report undefined statistics instead of failing");

  auto* tables = app.add_subcommand("tables", "Print the NN-RCT, NNCT and SCCT of a point pattern");
  add_input(tables, config);
  add_common(tables, config);

  SimulationArgs sim;
  auto* size = app.add_subcommand("simulate-size", "Empirical size under CSR or random labeling");
  auto* power = app.add_subcommand("simulate-power", "Empirical power under the alternative families");
  std::string sim_tests;
  for (auto* cmd : {size, power}) {
    add_common(cmd, config);
    cmd->add_option("--sizes", sim.sizes, "Equal class sizes n1 = n2, e.g. 10..50");
    cmd->add_option("--n1", sim.n1, "Class 1 sizes");
    cmd->add_option("--n2", sim.n2, "Class 2 sizes");
    cmd->add_option("--tests", sim_tests, "Test ids or groups (size, power, exact, all)");
  }
  size->add_option("--family", sim.family, "csr, rl-uniform or rl-matern")->default_val("csr");
  size->add_option("--backgrounds", config.backgrounds, "Background patterns per random-labeling spec")
      ->capture_default_str();
  size->add_option("--kappa", sim.kappa, "Matern parent intensities");
  size->add_option("--mu", sim.mu, "Matern mean cluster sizes (default floor(100/kappa))");
  size->add_option("--radius", sim.radius, "Matern cluster radius")->capture_default_str();
  power->add_option("--family", sim.family, "alt-I, alt-II, alt-III, alt-IV or alt-V")->required();
  power->add_option("--sigma", sim.sigma, "alt-I standard deviations");
  power->add_option("--p", sim.p, "alt-II probabilities");
  power->add_option("--s", sim.s, "alt-III shifts, alt-IV support shifts");
  power->add_option("--r", sim.r, "alt-IV and alt-V offset radii");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    config.validate();
    parse_formats(config.format);
    if (*test || *tables) {
      if (config.input.empty()) throw std::invalid_argument("an input file is required");
    }
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*test) {
      const Dataset data = read_points_csv(config.input, config.schema);
      const BatteryReport report = run_battery(data, config);
      if (has_errors(report) && !config.lenient) {
        for (const auto& s : report.sections) {
          for (const auto& r : s.results) {
            if (r.error) std::cerr << "error: " << s.comparison << " " << short_label(r) << ": " << *r.error << '\n';
          }
        }
        std::cerr << "rerun with --lenient to report the remaining tests\n";
        return kExitUndefined;
      }
      return emit_battery(report, config, config.out.empty() ? default_stem(config.input, "nnreflex") : config.out);
    }
    if (*tables) {
      const Dataset data = read_points_csv(config.input, config.schema);
      BatteryReport report;
      report.input = data.provenance;
      report.settings.weighting = to_string(config.weighting);
      report.settings.tie_epsilon = config.tie_epsilon;
      report.settings.tests = "none";
      report.warnings = data.provenance.warnings;
      report.sections.push_back(tables_section(data.points, config.weighting, config.tie_epsilon));
      return emit_battery(report, config, config.out.empty() ? default_stem(config.input, "nnreflex") : config.out);
    }

    SimulationOptions options;
    options.n_mc = config.n_mc;
    options.backgrounds = config.backgrounds;
    options.alpha = config.alpha;
    options.seed = config.seed;
    options.workers = config.workers;
    options.weighting = config.weighting;
    options.tie_epsilon = config.tie_epsilon;
    const bool is_size = static_cast<bool>(*size);
    std::vector<PatternSpec> grid;
    std::vector<SimTest> tests;
    try {
      grid = is_size ? size_grid(sim) : power_grid(sim);
      if (grid.empty()) throw std::invalid_argument("empty simulation grid");
      for (const auto& spec : grid) spec.validate();
      const Family family = grid.front().family;
      tests = parse_sim_tests(sim_tests.empty() ? (is_size ? "size" : "power") : sim_tests, family);
    } catch (const std::invalid_argument& e) {
      std::cerr << "usage error: " << e.what() << '\n';
      return kExitUsage;
    }
    const auto start = std::chrono::steady_clock::now();
    const SimulationReport report =
        is_size ? empirical_size(grid, tests, options) : empirical_power(grid, tests, options);
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string stem = config.out.empty() ? (is_size ? "nnreflex-size" : "nnreflex-power") : config.out;
    return emit_simulation(report, config, stem, runtime);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
