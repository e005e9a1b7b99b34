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

// Results tables in Markdown and CSV. All numbers go through one
// formatter, so both formats carry identical numeric strings.

#ifndef CALUM_REPORT_H_
#define CALUM_REPORT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "calum/corpus.h"
#include "calum/metrics.h"

namespace calum {

enum class TableFormat { kMarkdown, kCsv };
TableFormat ParseTableFormat(std::string_view name);  // "md" | "csv"

// Percentage in tenths, 100x rounded half away from zero:
// round(x * 1000). Throws kInvalidArgument for non-finite x.
int64_t PercentTenths(double fraction);
// "87.2", "100.0", "0.0", "-3.5".
std::string FormatTenths(int64_t tenths);
std::string FormatPercent(double fraction);
// Signed difference of displayed values: "+20.1", "0.0", "-3.5".
std::string FormatDelta(double fraction, double baseline);

// One row per model (first-appearance order) and Acc_val / C_R / C_S per
// task (first-appearance order). Missing consistency values print "-".
// Throws kRaggedCells when empty, when a (model, task) cell repeats, or
// when models cover different task sets.
std::string EmitResultsTable(std::span<const AggregateMetrics> cells,
                             TableFormat format);

// Rows "<family>-Single", "<family>-Para", "<family>-All" per model family,
// where families are the models of `single` and the k-th model of `para`
// and `all` belongs to the k-th family. After the metric columns, one
// "<task> dC_R" column per task holds C_R minus the family's Single C_R
// ("-" on Single rows). Throws kRaggedCells on mismatched shapes.
std::string EmitComparisonTable(std::span<const AggregateMetrics> single,
                                std::span<const AggregateMetrics> para,
                                std::span<const AggregateMetrics> all,
                                TableFormat format);

// Inverse of ParseTsv: header "id", field_a, field_b, field_label; a
// missing gold label is written as an empty cell.
std::string FormatTsv(const Dataset& dataset);
void WriteTsv(const Dataset& dataset, const std::string& path);

}  // namespace calum

#endif  // CALUM_REPORT_H_
