// Copyright 2026 The Calum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>

#include "calum/csv.h"
#include "calum/report.h"
#include "calum/text.h"
#include "test_support.h"

namespace calum {
namespace {

using testing::DataPath;
using testing::ThrowsCode;

AggregateMetrics Cell(const std::string& model, const std::string& task,
                      double acc, double cr, double cs) {
  RunMetrics r;
  r.model_name = model;
  r.task_id = task;
  r.acc_val = acc;
  r.c_reverse = cr;
  r.c_signal = cs;
  return Aggregate(std::span<const RunMetrics>(&r, 1));
}

std::vector<AggregateMetrics> LoadCells(const std::vector<std::string>& rel) {
  std::vector<AggregateMetrics> cells;
  for (const auto& path : rel) {
    cells.push_back(Aggregate(MetricsFromJson(ReadFile(DataPath(path)))));
  }
  return cells;
}

std::vector<AggregateMetrics> Table2Cells() {
  std::vector<std::string> paths;
  for (const char* model : {"RoBERTa_base", "RoBERTa_large"}) {
    for (const char* task : {"mnli", "qnli", "rte", "qqp", "mrpc"}) {
      paths.push_back(std::string("report/table2/") + model + "_" + task +
                      ".json");
    }
  }
  return LoadCells(paths);
}

std::vector<AggregateMetrics> Table5Cells(const std::string& variant) {
  std::vector<std::string> paths;
  for (const char* task : {"mnli", "qnli", "rte"}) {
    paths.push_back("report/table5/" + variant + "_" + task + ".json");
  }
  return LoadCells(paths);
}

TEST(FormatTest, KnownCells) {
  EXPECT_EQ(FormatPercent(0.872), "87.2");
  EXPECT_EQ(FormatPercent(0.603), "60.3");
  EXPECT_EQ(FormatPercent(0.986), "98.6");
  EXPECT_EQ(FormatPercent(1.0), "100.0");
  EXPECT_EQ(FormatPercent(0.0), "0.0");
  EXPECT_EQ(FormatPercent(0.0005), "0.1");
  EXPECT_EQ(FormatPercent(-0.0005), "-0.1");
  EXPECT_TRUE(ThrowsCode([] { FormatPercent(NAN); },
                         ErrorCode::kInvalidArgument));
}

TEST(FormatTest, DeltaUsesDisplayedValues) {
  EXPECT_EQ(FormatDelta(0.865, 0.664), "+20.1");
  EXPECT_EQ(FormatDelta(0.729, 0.755), "-2.6");
  EXPECT_EQ(FormatDelta(0.5, 0.5), "0.0");
  // 0.12345 shows as 12.3 and 0.12355 as 12.4, so the delta is 0.1.
  EXPECT_EQ(FormatDelta(0.12355, 0.12345), "+0.1");
}

// The displayed value is within half a display unit of 100x, and exact
// half-unit ties round away from zero.
TEST(FormatTest, RoundingProperty) {
  Rng gen(77);
  for (int i = 0; i < 20000; ++i) {
    const double x = gen.Uniform(-1.0, 1.0);
    const double shown = std::stod(FormatPercent(x));
    ASSERT_LE(std::fabs(shown - 100.0 * x), 0.05 + 1e-9) << x;
  }
  for (int k = -999; k <= 999; k += 2) {
    const int64_t expect = k > 0 ? (k + 1) / 2 : (k - 1) / 2;
    ASSERT_EQ(PercentTenths(k / 2000.0), expect) << k;
  }
}

TEST(ResultsTableTest, GoldenMarkdownAndCsv) {
  const auto cells = Table2Cells();
  EXPECT_EQ(EmitResultsTable(cells, TableFormat::kMarkdown),
            ReadFile(DataPath("report/table2_golden.md")));
  EXPECT_EQ(EmitResultsTable(cells, TableFormat::kCsv),
            ReadFile(DataPath("report/table2_golden.csv")));
}

TEST(ResultsTableTest, MarkdownAndCsvShareNumbers) {
  const auto cells = Table2Cells();
  const auto md = SplitLines(EmitResultsTable(cells, TableFormat::kMarkdown));
  const auto rows = csv::Parse(EmitResultsTable(cells, TableFormat::kCsv));
  ASSERT_EQ(md.size(), rows.size() + 1);  // md has the alignment row
  for (size_t i = 1; i < rows.size(); ++i) {
    std::string joined = "|";
    for (const auto& f : rows[i]) joined += " " + f + " |";
    EXPECT_EQ(md[i + 1], joined);
  }
}

TEST(ResultsTableTest, Errors) {
  EXPECT_TRUE(ThrowsCode([] { EmitResultsTable({}, TableFormat::kCsv); },
                         ErrorCode::kRaggedCells));
  const std::vector<AggregateMetrics> dup = {Cell("m", "rte", 1, 1, 1),
                                             Cell("m", "rte", 1, 1, 1)};
  EXPECT_TRUE(ThrowsCode([&] { EmitResultsTable(dup, TableFormat::kCsv); },
                         ErrorCode::kRaggedCells));
  const std::vector<AggregateMetrics> ragged = {Cell("a", "rte", 1, 1, 1),
                                                Cell("a", "mnli", 1, 1, 1),
                                                Cell("b", "rte", 1, 1, 1)};
  EXPECT_TRUE(ThrowsCode([&] { EmitResultsTable(ragged, TableFormat::kCsv); },
                         ErrorCode::kRaggedCells));
  EXPECT_TRUE(ThrowsCode([] { ParseTableFormat("html"); },
                         ErrorCode::kInvalidArgument));
}

TEST(ResultsTableTest, CsvQuotesModelNames) {
  const std::vector<AggregateMetrics> cells = {
      Cell("a,b", "rte", 0.5, 0.5, 0.5)};
  const std::string out = EmitResultsTable(cells, TableFormat::kCsv);
  EXPECT_NE(out.find("\"a,b\",50.0,50.0,50.0\n"), std::string::npos) << out;
}

TEST(ComparisonTableTest, GoldenMarkdownAndCsv) {
  const auto single = Table5Cells("single");
  const auto para = Table5Cells("para");
  const auto all = Table5Cells("all");
  EXPECT_EQ(EmitComparisonTable(single, para, all, TableFormat::kMarkdown),
            ReadFile(DataPath("report/table5_golden.md")));
  EXPECT_EQ(EmitComparisonTable(single, para, all, TableFormat::kCsv),
            ReadFile(DataPath("report/table5_golden.csv")));
}

TEST(ComparisonTableTest, IdenticalVariantsHaveZeroDeltas) {
  const auto single = Table5Cells("single");
  const auto rows = csv::Parse(
      EmitComparisonTable(single, single, single, TableFormat::kCsv));
  ASSERT_EQ(rows.size(), 4u);
  for (size_t r = 2; r < rows.size(); ++r) {
    for (size_t c = rows[r].size() - 3; c < rows[r].size(); ++c) {
      EXPECT_EQ(rows[r][c], "0.0");
    }
  }
}

TEST(ComparisonTableTest, ShapeMismatch) {
  const auto single = Table5Cells("single");
  const auto para = Table5Cells("para");
  const std::vector<AggregateMetrics> short_all(para.begin(), para.end() - 1);
  EXPECT_TRUE(ThrowsCode(
      [&] {
        EmitComparisonTable(single, para, short_all, TableFormat::kCsv);
      },
      ErrorCode::kRaggedCells));
}

}  // namespace
}  // namespace calum
