#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "nnreflex/io.hpp"
#include "nnreflex/nn_graph.hpp"

namespace nnreflex {

/// Settings shared by the command-line tools. Precedence, lowest first:
/// built-in defaults, the NNREFLEX_SEED environment variable (seed only), a
/// key = value config file, command-line flags.
struct RunConfig {
  std::string input;
  CsvSchema schema;
  double alpha = 0.05;
  std::size_t n_mc = 10000;
  std::uint64_t seed = 0;
  Weighting weighting = Weighting::ordered_edge;
  double tie_epsilon = 0.0;
  std::string tests = "all";
  std::optional<std::string> posthoc;
  std::string format = "json,csv,text";
  std::string out;
  unsigned workers = 1;
  bool lenient = false;
  std::size_t backgrounds = 100;

  /// Throws std::invalid_argument unless alpha is in (0,1), n_mc >= 99 and
  /// tie_epsilon >= 0.
  void validate() const;
};

inline constexpr const char* kSeedEnvironmentVariable = "NNREFLEX_SEED";

/// Reads "key = value" lines; '#' starts a comment. Throws std::runtime_error
/// naming the line on malformed input.
std::map<std::string, std::string> read_key_value_file(const std::string& path);

/// Applies recognised keys (input, x_column, y_column, label_column,
/// delimiter, alpha, n_mc, seed, weighting, tie_epsilon, tests, posthoc,
/// format, out, workers, lenient, backgrounds). Unknown keys throw.
void apply_config(RunConfig& config, const std::map<std::string, std::string>& values);

/// Seed from NNREFLEX_SEED if set; throws on an unparsable value.
std::optional<std::uint64_t> seed_from_environment();

std::uint64_t parse_seed(const std::string& text);
Weighting parse_weighting(const std::string& text);
std::string to_string(Weighting weighting);

}  // namespace nnreflex
