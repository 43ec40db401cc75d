// Copyright 2026 The prae Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prae/comparison.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prae/error.h"

namespace prae {
namespace {

constexpr const char* kCsvHeader = "backbone,depth,heads,params,cd,emd,hd,f1";

std::array<double, 4> values(const MetricRow& r) {
  return {r.cd, r.emd, r.hd, r.f1};
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') {
    throw IoError("metrics CSV line " + std::to_string(line) +
                  ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

MetricRow metric_row(const RunRecord& record) {
  const auto config = nlohmann::json::parse(record.config_json);
  MetricRow row;
  row.backbone = config.at("backbone").get<std::string>();
  row.depth = config.at("depth").get<int>();
  row.heads = config.at("heads").get<std::size_t>();
  row.params = record.decoder_params;
  row.cd = record.best.cd;
  row.emd = record.best_exact ? record.best_exact->emd : record.best.emd;
  row.hd = record.best.hd;
  row.f1 = record.best.f1;
  return row;
}

MetricRow apply_scale(MetricRow row, const PresentationScale& scale) {
  row.cd *= scale.cd;
  row.emd *= scale.emd;
  row.hd *= scale.hd;
  return row;
}

ComparisonTable build_comparison(std::span<const MetricRow> rows) {
  using Key = std::pair<std::string, int>;
  std::map<Key, const MetricRow*> singles, multis;
  std::vector<Key> order;
  for (const MetricRow& r : rows) {
    const Key key{r.backbone, r.depth};
    auto& slot = r.heads == 1 ? singles : multis;
    if (slot.count(key)) {
      throw ConfigError("duplicate " +
                        std::string(r.heads == 1 ? "single" : "multi") +
                        "-head row for " + r.backbone + " depth " +
                        std::to_string(r.depth));
    }
    slot[key] = &r;
    if (std::find(order.begin(), order.end(), key) == order.end()) {
      order.push_back(key);
    }
  }
  ComparisonTable table;
  for (const Key& key : order) {
    if (!singles.count(key) || !multis.count(key)) {
      throw ConfigError("unpaired row for " + key.first + " depth " +
                        std::to_string(key.second) +
                        ": need both a single-head and a multi-head result");
    }
    const MetricRow& s = *singles[key];
    const MetricRow& m = *multis[key];
    ComparisonRow row;
    row.backbone = key.first;
    row.depth = key.second;
    row.multi_heads = m.heads;
    row.single = values(s);
    row.multi = values(m);
    for (std::size_t i = 0; i < 4; ++i) {
      row.delta[i] = row.multi[i] - row.single[i];
      const bool higher_better = i == 3;
      const double gain = higher_better ? row.multi[i] - row.single[i]
                                        : row.single[i] - row.multi[i];
      row.percent[i] = row.single[i] != 0.0 ? 100.0 * gain / row.single[i] : 0.0;
      row.improved[i] = gain > 0.0;
    }
    table.rows.push_back(row);
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) {
                     return a.backbone != b.backbone ? a.backbone < b.backbone
                                                     : a.depth < b.depth;
                   });
  if (!table.rows.empty()) {
    for (std::size_t i = 0; i < 4; ++i) {
      double sum = 0.0;
      for (const ComparisonRow& r : table.rows) sum += r.percent[i];
      table.mean_percent[i] = sum / static_cast<double>(table.rows.size());
    }
  }
  return table;
}

std::string format_comparison(const ComparisonTable& table) {
  std::string out = pad("backbone", 10) + pad("depth", 6) + pad("M", 4);
  for (const char* name : kMetricNames) {
    out += " |" + pad(std::string(name) + " single", 12) + pad("multi", 11) +
           pad("delta", 10) + pad("change", 10);
  }
  out += "\n";
  for (const ComparisonRow& r : table.rows) {
    out += pad(r.backbone, 10) + pad(std::to_string(r.depth), 6) +
           pad(std::to_string(r.multi_heads), 4);
    for (std::size_t i = 0; i < 4; ++i) {
      const char* mark = r.delta[i] == 0.0 ? " " : (r.improved[i] ? "+" : "-");
      out += " |" + pad(fmt("%.6g", r.single[i]), 12) +
             pad(fmt("%.6g", r.multi[i]), 11) +
             pad(fmt("%+.4g", r.delta[i]), 10) +
             pad(fmt("%+.2f%%", r.percent[i]) + mark, 10);
    }
    out += "\n";
  }
  out += pad("mean", 20);
  for (std::size_t i = 0; i < 4; ++i) {
    out += " |" + pad("", 33) + pad(fmt("%+.2f%%", table.mean_percent[i]), 10);
  }
  out += "\n(change: positive = multi-head better; lower CD/EMD/HD, higher F1)\n";
  return out;
}

std::string comparison_csv(const ComparisonTable& table) {
  std::string out = "backbone,depth,multi_heads";
  for (const char* name : {"cd", "emd", "hd", "f1"}) {
    for (const char* col : {"single", "multi", "delta", "percent", "improved"}) {
      out += std::string(",") + name + "_" + col;
    }
  }
  out += "\n";
  for (const ComparisonRow& r : table.rows) {
    out += r.backbone + "," + std::to_string(r.depth) + "," +
           std::to_string(r.multi_heads);
    for (std::size_t i = 0; i < 4; ++i) {
      out += "," + fmt("%.17g", r.single[i]) + "," + fmt("%.17g", r.multi[i]) +
             "," + fmt("%.17g", r.delta[i]) + "," + fmt("%.17g", r.percent[i]) +
             "," + (r.improved[i] ? "1" : "0");
    }
    out += "\n";
  }
  out += "mean,,";
  for (std::size_t i = 0; i < 4; ++i) {
    out += ",,,," + fmt("%.17g", table.mean_percent[i]) + ",";
  }
  out += "\n";
  return out;
}

std::string metric_rows_csv(std::span<const MetricRow> rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const MetricRow& r : rows) {
    if (r.backbone.find(',') != std::string::npos) {
      throw ConfigError("backbone name may not contain ','");
    }
    out += r.backbone + "," + std::to_string(r.depth) + "," +
           std::to_string(r.heads) + "," + std::to_string(r.params) + "," +
           fmt("%.17g", r.cd) + "," + fmt("%.17g", r.emd) + "," +
           fmt("%.17g", r.hd) + "," + fmt("%.17g", r.f1) + "\n";
  }
  return out;
}

std::vector<MetricRow> parse_metric_rows_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<MetricRow> rows;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kCsvHeader) {
        throw IoError("metrics CSV must start with '" + std::string(kCsvHeader) +
                      "'");
      }
      header = true;
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != 8) {
      throw IoError("metrics CSV line " + std::to_string(line_no) +
                    ": expected 8 columns");
    }
    MetricRow r;
    r.backbone = cells[0];
    r.depth = static_cast<int>(parse_double(cells[1], line_no));
    r.heads = static_cast<std::size_t>(parse_double(cells[2], line_no));
    r.params = static_cast<std::size_t>(parse_double(cells[3], line_no));
    r.cd = parse_double(cells[4], line_no);
    r.emd = parse_double(cells[5], line_no);
    r.hd = parse_double(cells[6], line_no);
    r.f1 = parse_double(cells[7], line_no);
    rows.push_back(r);
  }
  if (!header) throw IoError("metrics CSV is empty");
  return rows;
}

}  // namespace prae
