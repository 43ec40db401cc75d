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

#include "prae/audit.h"

#include <cmath>
#include <cstdio>

#include "prae/error.h"

namespace prae {
namespace {

constexpr double kPublished[3][5][2] = {
    {{0.79, 0.79}, {1.61, 1.65}, {3.31, 3.48}, {6.99, 7.68}, {8.04, 9.78}},
    {{6.30, 6.30}, {3.67, 4.20}, {7.35, 8.40}, {8.40, 10.50}, {9.45, 12.60}},
    {{3.15, 3.15}, {1.71, 1.84}, {3.41, 3.68}, {7.09, 7.87}, {8.14, 9.97}},
};

int backbone_row(Backbone b) {
  switch (b) {
    case Backbone::kLightAE:
      return 0;
    case Backbone::kDeepAE:
      return 1;
    case Backbone::kPTv3:
      return 2;
    case Backbone::kCustom:
      break;
  }
  throw ConfigError("no published decoder sizes for the custom backbone");
}

std::string millions(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

double published_decoder_millions(Backbone backbone, int depth,
                                  std::size_t heads) {
  if (depth < kMinDepth || depth > kMaxDepth || heads < 1 || heads > 2) {
    throw ConfigError("published sizes cover depths 1-5 with 1 or 2 heads");
  }
  return kPublished[backbone_row(backbone)][depth - 1][heads - 1];
}

std::vector<AuditRow> audit_parameters() {
  std::vector<AuditRow> rows;
  for (Backbone b : {Backbone::kLightAE, Backbone::kDeepAE, Backbone::kPTv3}) {
    for (int depth = kMinDepth; depth <= kMaxDepth; ++depth) {
      for (std::size_t heads : {1u, 2u}) {
        AuditRow row;
        row.backbone = b;
        row.depth = depth;
        row.heads = heads;
        row.computed = decoder_parameter_count(standard_spec(b, depth, heads));
        row.published_millions = published_decoder_millions(b, depth, heads);
        const long computed_hundredths =
            std::lround(static_cast<double>(row.computed) / 1e4);
        const long published_hundredths =
            std::lround(row.published_millions * 100.0);
        row.matches = std::labs(computed_hundredths - published_hundredths) <= 1;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string format_audit(const std::vector<AuditRow>& rows) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-9s %5s %5s %12s %9s %9s %s\n", "backbone",
                "depth", "heads", "parameters", "computed", "published",
                "status");
  std::string out = buf;
  for (const AuditRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-9s %5d %5zu %12zu %8sM %8sM %s\n",
                  backbone_name(r.backbone), r.depth, r.heads, r.computed,
                  millions(static_cast<double>(r.computed) / 1e6).c_str(),
                  millions(r.published_millions).c_str(),
                  r.matches ? "ok" : "MISMATCH");
    out += buf;
  }
  return out;
}

std::string audit_csv(const std::vector<AuditRow>& rows) {
  std::string out = "backbone,depth,heads,parameters,computed_millions,"
                    "published_millions,matches\n";
  for (const AuditRow& r : rows) {
    out += std::string(backbone_name(r.backbone)) + "," +
           std::to_string(r.depth) + "," + std::to_string(r.heads) + "," +
           std::to_string(r.computed) + "," +
           millions(static_cast<double>(r.computed) / 1e6) + "," +
           millions(r.published_millions) + "," + (r.matches ? "1" : "0") +
           "\n";
  }
  return out;
}

}  // namespace prae
