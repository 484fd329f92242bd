#include <sstream>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "run_config.hpp"

using trendboot::cli::ConfigError;
using trendboot::cli::KeyKind;
using trendboot::cli::KeySpec;
using trendboot::cli::RunConfig;

namespace {

std::vector<KeySpec> schema() {
  return {
      {"count", KeyKind::integer, "5", "how many", 1, 10, {}, false},
      {"ratio", KeyKind::real, "0.5", "a ratio", 0, 1, {}, false},
      {"mode", KeyKind::text, "fast", "speed", 0, 0, {"fast", "slow"}, false},
      {"input", KeyKind::path, "", "input file", 0, 0, {}, true},
      {"ks", KeyKind::integer_list, "20,30", "segments", 0, 100, {}, false},
      {"rs", KeyKind::real_list, "", "grid", 0, 1, {}, false},
      {"tags", KeyKind::text_list, "a", "labels", 0, 0, {"a", "b", "c"}, false},
  };
}

}  // namespace

TEST(RunConfig, DefaultsAreApplied) {
  const RunConfig c(schema());
  EXPECT_EQ(c.integer("count"), 5);
  EXPECT_EQ(c.real("ratio"), 0.5);
  EXPECT_EQ(c.text("mode"), "fast");
  EXPECT_EQ(c.integer_list("ks"), (std::vector<long long>{20, 30}));
  EXPECT_FALSE(c.has("input"));
  EXPECT_FALSE(c.has("rs"));
  EXPECT_THROW(c.require_complete(), ConfigError);
}

TEST(RunConfig, SetValidates) {
  RunConfig c(schema());
  c.set("count", "10");
  EXPECT_EQ(c.integer("count"), 10);
  EXPECT_THROW(c.set("count", "11"), ConfigError);
  EXPECT_THROW(c.set("count", "0"), ConfigError);
  EXPECT_THROW(c.set("count", "2.5"), ConfigError);
  EXPECT_THROW(c.set("ratio", "-0.1"), ConfigError);
  EXPECT_THROW(c.set("ratio", "x"), ConfigError);
  EXPECT_THROW(c.set("mode", "medium"), ConfigError);
  EXPECT_THROW(c.set("ks", "20,101"), ConfigError);
  EXPECT_THROW(c.set("tags", "a,z"), ConfigError);
  EXPECT_THROW(c.set("input", ""), ConfigError);
  EXPECT_THROW(c.set("colour", "red"), ConfigError);
  c.set("rs", "0.1, 0.2,0.3");
  EXPECT_EQ(c.real_list("rs"), (std::vector<double>{0.1, 0.2, 0.3}));
  c.set("tags", "b,c");
  EXPECT_EQ(c.text_list("tags"), (std::vector<std::string>{"b", "c"}));
  // Failed sets leave the previous value.
  EXPECT_EQ(c.integer("count"), 10);
}

TEST(RunConfig, LoadsKeyValueFile) {
  RunConfig c(schema());
  std::istringstream in(
      "# comment\n"
      "\n"
      "count = 7\n"
      "input=data.csv   # trailing comment\n"
      "ks = 1, 2, 3\n");
  c.load(in, "test.cfg");
  EXPECT_EQ(c.integer("count"), 7);
  EXPECT_EQ(c.text("input"), "data.csv");
  EXPECT_EQ(c.integer_list("ks"), (std::vector<long long>{1, 2, 3}));
  EXPECT_NO_THROW(c.require_complete());
}

TEST(RunConfig, LoadErrorsNameTheLine) {
  RunConfig c(schema());
  std::istringstream bad("count = 7\nnonsense\n");
  try {
    c.load(bad, "my.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("my.cfg:2"), std::string::npos) << e.what();
  }
  std::istringstream unknown("speed = 3\n");
  EXPECT_THROW(c.load(unknown, "x"), ConfigError);
  EXPECT_THROW(c.load(std::filesystem::path("/nonexistent/file.cfg")), ConfigError);
}

TEST(RunConfig, EchoFollowsSchemaOrder) {
  RunConfig c(schema());
  c.set("input", "in.csv");
  std::ostringstream out;
  c.echo(out);
  EXPECT_EQ(out.str(), "count=5\nratio=0.5\nmode=fast\ninput=in.csv\nks=20,30\ntags=a\n");
}

TEST(RunConfig, DescribeShowsBoundsChoicesAndDefaults) {
  const auto s = schema();
  EXPECT_EQ(trendboot::cli::describe(s[0]), "how many [1, 10] default 5");
  EXPECT_NE(trendboot::cli::describe(s[2]).find("{fast,slow}"), std::string::npos);
  EXPECT_NE(trendboot::cli::describe(s[3]).find("(required)"), std::string::npos);
}
