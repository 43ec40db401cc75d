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

#ifndef PRAE_PLOT_H_
#define PRAE_PLOT_H_

#include <string>
#include <utility>
#include <vector>

namespace prae {

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // drawn in x order
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  int width = 640;
  int height = 420;
};

// Standalone SVG document with axes, ticks, markers and a legend.
std::string render_svg(const LinePlot& plot);

}  // namespace prae

#endif  // PRAE_PLOT_H_
