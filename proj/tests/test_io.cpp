#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nnreflex/config.hpp"
#include "nnreflex/io.hpp"
#include "nnreflex/runner.hpp"

using namespace nnreflex;

namespace {

Dataset parse(const std::string& text, CsvSchema schema = {}) {
  std::istringstream in(text);
  return parse_points_csv(in, schema, "mem");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("csv ingestion") {
  const auto d = parse("# window: 0 10 0 5\nlabel,x,y\noak,1,2\nbirch,3,4\n\n\"oak\",5,1.5\n");
  CHECK(d.points.size() == 3);
  CHECK(d.provenance.rows == 3);
  CHECK(d.provenance.class_names == std::vector<std::string>{"birch", "oak"});
  CHECK(d.provenance.class_sizes == std::vector<std::size_t>{1, 2});
  CHECK(d.provenance.x_min == 1);
  CHECK(d.provenance.x_max == 5);
  CHECK(d.provenance.y_max == 4);
  REQUIRE(d.provenance.window.has_value());
  CHECK(d.provenance.window->x_max == 10);
  CHECK(d.provenance.window->y_max == 5);
  CHECK(d.points.label(0) == 1);
}

TEST_CASE("csv schema options") {
  CsvSchema schema;
  schema.x_column = "east";
  schema.y_column = "north";
  schema.label_column = "sp";
  schema.delimiter = '\t';
  const auto d = parse("sp\teast\tnorth\n1\t0\t0\n2\t1\t1\n", schema);
  CHECK(d.points.size() == 2);
  CHECK(d.points.num_classes() == 2);
}

TEST_CASE("csv errors name the line") {
  CHECK(error_of("x,y,label\n").find("empty input") != std::string::npos);
  CHECK(error_of("").find("empty input") != std::string::npos);
  CHECK(error_of("x,y,label\n1,2,a\n").find("at least two") != std::string::npos);
  CHECK(error_of("x,y,label\n1,2,a\n1,zz,b\n").find("mem:3") != std::string::npos);
  CHECK(error_of("x,y,label\n1,2,a\n1,2\n").find("mem:3") != std::string::npos);
  CHECK(error_of("x,label\n1,a\n2,b\n").find("y") != std::string::npos);
  CHECK(error_of("x,y,label\n1,2,a\ninf,2,b\n").find("mem:3") != std::string::npos);
}

TEST_CASE("duplicate coordinates are accepted with a warning") {
  const auto d = parse("x,y,label\n1,1,a\n1,1,b\n2,2,a\n");
  CHECK(d.points.size() == 3);
  CHECK_FALSE(d.provenance.warnings.empty());
}

TEST_CASE("split delimited") {
  CHECK(split_delimited("a,\"b,c\",d", ',') == std::vector<std::string>{"a", "b,c", "d"});
  CHECK(split_delimited("\"say \"\"hi\"\"\",2", ',') == std::vector<std::string>{"say \"hi\"", "2"});
  CHECK(split_delimited("a,,", ',') == std::vector<std::string>{"a", "", ""});
}

TEST_CASE("run config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.alpha = 1.0;
  CHECK_THROWS(c.validate());
  c.alpha = 0.05;
  c.n_mc = 98;
  CHECK_THROWS(c.validate());
  c.n_mc = 99;
  c.tie_epsilon = -1;
  CHECK_THROWS(c.validate());
}

TEST_CASE("config file and seeds") {
  const auto path = std::filesystem::temp_directory_path() / "nnreflex_test.conf";
  {
    std::ofstream out(path);
    out << "# settings\nalpha = 0.01\nseed = 0xff\nweighting = pielou\ndelimiter = tab\nlenient = true\n";
  }
  RunConfig c;
  apply_config(c, read_key_value_file(path.string()));
  CHECK(c.alpha == 0.01);
  CHECK(c.seed == 255);
  CHECK(c.weighting == Weighting::pielou);
  CHECK(c.schema.delimiter == '\t');
  CHECK(c.lenient);
  CHECK_THROWS(apply_config(c, {{"colour", "red"}}));
  CHECK_THROWS(apply_config(c, {{"alpha", "0.0x"}}));
  {
    std::ofstream out(path);
    out << "alpha 0.05\n";
  }
  CHECK_THROWS_WITH(read_key_value_file(path.string()), doctest::Contains(":1:"));
  std::filesystem::remove(path);

  CHECK(parse_seed("18446744073709551615") == 18446744073709551615ULL);
  CHECK_THROWS(parse_seed("-1"));
  CHECK_THROWS(parse_seed("12a"));
  CHECK(to_string(parse_weighting("ordered-edge")) == "ordered-edge");
  CHECK_THROWS(parse_weighting("mean"));

  setenv(kSeedEnvironmentVariable, "42", 1);
  CHECK(seed_from_environment() == std::optional<std::uint64_t>(42));
  unsetenv(kSeedEnvironmentVariable);
  CHECK_FALSE(seed_from_environment().has_value());
}

TEST_CASE("grid arguments") {
  CHECK(parse_grid("10..50") == std::vector<double>{10, 20, 30, 40, 50});
  CHECK(parse_grid("1..2:0.5") == std::vector<double>{1, 1.5, 2});
  CHECK(parse_grid("1/4, 0.5") == std::vector<double>{0.25, 0.5});
  CHECK(parse_grid("0.1..0.3:0.1").size() == 3);
  CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid(" , "), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("5..1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1..5:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("abc"), std::invalid_argument);
  CHECK(parse_size_grid("10..30") == std::vector<std::size_t>{10, 20, 30});
  CHECK_THROWS_AS(parse_size_grid("2.5"), std::invalid_argument);
}

TEST_CASE("battery on a single class is an error") {
  const auto d = parse("x,y,label\n0,0,a\n1,0,a\n0,1,a\n");
  CHECK_THROWS_AS(run_battery(d, RunConfig{}), std::invalid_argument);
}
