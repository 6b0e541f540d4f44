#include "nnreflex/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace nnreflex {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("config: " + key + " = '" + text + "' is not a valid number");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("config: " + key + " = '" + text + "' is not a boolean");
}

}  // namespace

void RunConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (n_mc < 99) throw std::invalid_argument("n_mc must be at least 99");
  if (!(tie_epsilon >= 0.0)) throw std::invalid_argument("tie_epsilon must be non-negative");
  if (workers == 0) throw std::invalid_argument("workers must be positive");
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty key");
    values[key] = trim(line.substr(eq + 1));
  }
  return values;
}

std::uint64_t parse_seed(const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  int base = 10;
  std::size_t skip = 0;
  if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
    base = 16;
    skip = 2;
  }
  const auto [ptr, ec] = std::from_chars(t.data() + skip, t.data() + t.size(), value, base);
  if (t.size() == skip || ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument("seed '" + text + "' is not an unsigned 64-bit integer");
  }
  return value;
}

Weighting parse_weighting(const std::string& text) {
  if (text == "ordered-edge" || text == "ordered_edge") return Weighting::ordered_edge;
  if (text == "pielou") return Weighting::pielou;
  throw std::invalid_argument("unknown weighting '" + text + "' (ordered-edge or pielou)");
}

std::string to_string(Weighting weighting) {
  return weighting == Weighting::pielou ? "pielou" : "ordered-edge";
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* value = std::getenv(kSeedEnvironmentVariable);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return parse_seed(value);
}

void apply_config(RunConfig& c, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    if (key == "input") {
      c.input = value;
    } else if (key == "x_column") {
      c.schema.x_column = value;
    } else if (key == "y_column") {
      c.schema.y_column = value;
    } else if (key == "label_column") {
      c.schema.label_column = value;
    } else if (key == "delimiter") {
      if (value == "tab" || value == "\\t") {
        c.schema.delimiter = '\t';
      } else if (value.size() == 1) {
        c.schema.delimiter = value[0];
      } else {
        throw std::invalid_argument("config: delimiter must be one character or 'tab'");
      }
    } else if (key == "alpha") {
      c.alpha = parse_number<double>(key, value);
    } else if (key == "n_mc") {
      c.n_mc = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
      c.seed = parse_seed(value);
    } else if (key == "weighting") {
      c.weighting = parse_weighting(value);
    } else if (key == "tie_epsilon") {
      c.tie_epsilon = parse_number<double>(key, value);
    } else if (key == "tests") {
      c.tests = value;
    } else if (key == "posthoc") {
      c.posthoc = value;
    } else if (key == "format") {
      c.format = value;
    } else if (key == "out") {
      c.out = value;
    } else if (key == "workers") {
      c.workers = parse_number<unsigned>(key, value);
    } else if (key == "lenient") {
      c.lenient = parse_bool(key, value);
    } else if (key == "backgrounds") {
      c.backgrounds = parse_number<std::size_t>(key, value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
}

}  // namespace nnreflex
