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

#ifndef PRAE_AUDIT_H_
#define PRAE_AUDIT_H_

#include <cstddef>
#include <string>
#include <vector>

#include "prae/model.h"

namespace prae {

struct AuditRow {
  Backbone backbone = Backbone::kLightAE;
  int depth = 1;
  std::size_t heads = 1;
  std::size_t computed = 0;  // decoder parameters, all heads
  double published_millions = 0.0;
  // |round(computed / 1e4) - round(published * 100)| <= 1, i.e. within
  // 0.01 M after rounding both to two decimals.
  bool matches = false;
};

// Published decoder sizes in millions, indexed [backbone][depth-1][heads-1]
// for Light-AE, Deep-AE and PTv3 with one or two heads.
double published_decoder_millions(Backbone backbone, int depth,
                                  std::size_t heads);

// All 30 configurations (three backbones, depths 1-5, one and two heads),
// computed from layer shapes alone at K = 2048.
std::vector<AuditRow> audit_parameters();

std::string format_audit(const std::vector<AuditRow>& rows);
std::string audit_csv(const std::vector<AuditRow>& rows);

}  // namespace prae

#endif  // PRAE_AUDIT_H_
