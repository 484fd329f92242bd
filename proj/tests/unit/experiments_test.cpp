#include <sstream>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "trendboot/experiments.hpp"

namespace ex = trendboot::experiments;

TEST(Table1, SmokeRunHasFourRowsOfSevenQuantiles) {
  ex::Table1Config c;
  c.n = 2000;
  c.outer = 10;
  c.inner = 10;
  c.select_replicates = 20;
  const auto result = ex::run_table1(c);
  ASSERT_EQ(result.rows.size(), 4u);
  const char* labels[] = {"ar1_process", "moving_block", "wild", "dep_wild_ar1"};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(result.rows[i].label, labels[i]);
    for (std::size_t q = 1; q < 7; ++q) EXPECT_LE(result.rows[i].values[q - 1], result.rows[i].values[q]);
  }
  EXPECT_EQ(&result.row("wild"), &result.rows[2]);
  EXPECT_GT(result.mean_selected_r, 0.0);
  EXPECT_GT(result.mean_block_length, 1.0);

  std::ostringstream out;
  ex::write_quantile_table_csv(out, result.rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "method,q2.5,q5,q25,q50,q75,q95,q97.5");
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7);
  }
  EXPECT_EQ(lines, 4);
}

TEST(Table1, DeterministicAndThreadIndependent) {
  ex::Table1Config c;
  c.n = 1000;
  c.outer = 6;
  c.inner = 20;
  c.select_replicates = 10;
  c.seed = 5;
  const auto a = ex::run_table1(c);
  c.threads = 3;
  const auto b = ex::run_table1(c);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.rows[i].values, b.rows[i].values);
}

TEST(Table1, FixedBlockLength) {
  ex::Table1Config c;
  c.n = 1000;
  c.outer = 4;
  c.inner = 10;
  c.select_replicates = 10;
  c.block_length = 17;
  EXPECT_EQ(ex::run_table1(c).mean_block_length, 17.0);
}

TEST(Table1, RejectsBadConfig) {
  ex::Table1Config c;
  c.outer = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.r = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Table2, SmokeRun) {
  ex::Table2Config c;
  c.years = {2, 4};
  c.outer = 4;
  c.inner = 100;
  c.select_replicates = 10;
  const auto rows = ex::run_table2(c);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].n, 730u);
  EXPECT_EQ(rows[1].years, 4);
  for (const auto& r : rows) {
    EXPECT_GE(r.negative_percent, 0.0);
    EXPECT_LE(r.negative_percent, 100.0);
  }
  std::ostringstream out;
  ex::write_table2_csv(out, rows);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "years,n,negative_percent");

  c.method = trendboot::resampling::Method::wild;
  EXPECT_NO_THROW((void)ex::run_table2(c));
  c.method = trendboot::resampling::Method::efron;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
