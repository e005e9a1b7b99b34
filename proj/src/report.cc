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

#include "calum/report.h"

#include <cmath>
#include <cstdlib>
#include <map>
#include <vector>

#include "calum/csv.h"
#include "calum/error.h"
#include "calum/text.h"

namespace calum {
namespace {

using Row = std::vector<std::string>;

struct Grid {
  std::vector<std::string> models;
  std::vector<std::string> tasks;
  std::map<std::pair<std::string, std::string>, const AggregateMetrics*> cells;

  const AggregateMetrics& At(const std::string& model,
                             const std::string& task) const {
    return *cells.at({model, task});
  }
};

template <typename T>
void AddUnique(std::vector<T>& v, const T& x) {
  for (const auto& y : v) {
    if (y == x) return;
  }
  v.push_back(x);
}

Grid MakeGrid(std::span<const AggregateMetrics> cells) {
  if (cells.empty()) throw Error(ErrorCode::kRaggedCells, "no cells");
  Grid g;
  for (const auto& c : cells) {
    AddUnique(g.models, c.model_name);
    AddUnique(g.tasks, c.task_id);
    if (!g.cells.emplace(std::make_pair(c.model_name, c.task_id), &c).second) {
      throw Error(ErrorCode::kRaggedCells, "duplicate cell (" + c.model_name +
                                               ", " + c.task_id + ")");
    }
  }
  if (g.cells.size() != g.models.size() * g.tasks.size()) {
    throw Error(ErrorCode::kRaggedCells,
                "models do not cover the same task columns");
  }
  return g;
}

std::string OptionalPercent(const std::optional<Stat>& s) {
  return s ? FormatPercent(s->mean) : "-";
}

Row MetricHeader(const std::vector<std::string>& tasks) {
  Row header = {"Model"};
  for (const auto& t : tasks) {
    header.push_back(t + " Acc_val");
    header.push_back(t + " C_R");
    header.push_back(t + " C_S");
  }
  return header;
}

void AppendMetrics(Row& row, const AggregateMetrics& m) {
  row.push_back(FormatPercent(m.acc_val.mean));
  row.push_back(OptionalPercent(m.c_reverse));
  row.push_back(OptionalPercent(m.c_signal));
}

std::string EscapeMarkdownCell(const std::string& cell) {
  std::string out;
  for (const char c : cell) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string Render(const Row& header, const std::vector<Row>& rows,
                   TableFormat format) {
  std::string out;
  if (format == TableFormat::kCsv) {
    out += csv::FormatRow(header);
    for (const auto& r : rows) out += csv::FormatRow(r);
    return out;
  }
  auto line = [&](const Row& r) {
    out += "|";
    for (const auto& cell : r) out += " " + EscapeMarkdownCell(cell) + " |";
    out += "\n";
  };
  line(header);
  out += "|---|";
  for (size_t i = 1; i < header.size(); ++i) out += "---:|";
  out += "\n";
  for (const auto& r : rows) line(r);
  return out;
}

}  // namespace

TableFormat ParseTableFormat(std::string_view name) {
  const std::string lower = NormalizeLabel(name);
  if (lower == "md" || lower == "markdown") return TableFormat::kMarkdown;
  if (lower == "csv") return TableFormat::kCsv;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown table format '" + std::string(name) + "'");
}

int64_t PercentTenths(double fraction) {
  if (!std::isfinite(fraction)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot format a non-finite value");
  }
  return static_cast<int64_t>(std::llround(fraction * 1000.0));
}

std::string FormatTenths(int64_t tenths) {
  const int64_t mag = tenths < 0 ? -tenths : tenths;
  std::string out = tenths < 0 ? "-" : "";
  out += std::to_string(mag / 10) + "." + std::to_string(mag % 10);
  return out;
}

std::string FormatPercent(double fraction) {
  return FormatTenths(PercentTenths(fraction));
}

std::string FormatDelta(double fraction, double baseline) {
  const int64_t d = PercentTenths(fraction) - PercentTenths(baseline);
  return (d > 0 ? "+" : "") + FormatTenths(d);
}

std::string EmitResultsTable(std::span<const AggregateMetrics> cells,
                             TableFormat format) {
  const Grid g = MakeGrid(cells);
  std::vector<Row> rows;
  for (const auto& model : g.models) {
    Row row = {model};
    for (const auto& task : g.tasks) AppendMetrics(row, g.At(model, task));
    rows.push_back(std::move(row));
  }
  return Render(MetricHeader(g.tasks), rows, format);
}

std::string EmitComparisonTable(std::span<const AggregateMetrics> single,
                                std::span<const AggregateMetrics> para,
                                std::span<const AggregateMetrics> all,
                                TableFormat format) {
  const Grid gs = MakeGrid(single);
  const Grid gp = MakeGrid(para);
  const Grid ga = MakeGrid(all);
  for (const Grid* g : {&gp, &ga}) {
    if (g->models.size() != gs.models.size() || g->tasks != gs.tasks) {
      throw Error(ErrorCode::kRaggedCells,
                  "Single, Para and All sets must have the same shape");
    }
  }
  Row header = MetricHeader(gs.tasks);
  for (const auto& t : gs.tasks) header.push_back(t + " dC_R");

  std::vector<Row> rows;
  for (size_t f = 0; f < gs.models.size(); ++f) {
    const std::string& family = gs.models[f];
    const struct {
      const char* suffix;
      const Grid* grid;
    } variants[] = {{"Single", &gs}, {"Para", &gp}, {"All", &ga}};
    for (const auto& v : variants) {
      const std::string& model = v.grid->models[f];
      Row row = {family + "-" + v.suffix};
      for (const auto& task : gs.tasks) {
        AppendMetrics(row, v.grid->At(model, task));
      }
      for (const auto& task : gs.tasks) {
        const auto& base = gs.At(family, task).c_reverse;
        const auto& mine = v.grid->At(model, task).c_reverse;
        if (v.grid == &gs || !base || !mine) {
          row.push_back("-");
        } else {
          row.push_back(FormatDelta(mine->mean, base->mean));
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return Render(header, rows, format);
}

std::string FormatTsv(const Dataset& dataset) {
  const TaskSpec& task = dataset.task();
  std::string out = "id\t" + task.field_a + "\t" + task.field_b + "\t" +
                    task.field_label + "\n";
  for (const Example& ex : dataset.examples()) {
    out += ex.id + "\t" + ex.sentence_a + "\t" + ex.sentence_b + "\t" +
           ex.gold.value_or("") + "\n";
  }
  return out;
}

void WriteTsv(const Dataset& dataset, const std::string& path) {
  WriteFile(path, FormatTsv(dataset));
}

}  // namespace calum
