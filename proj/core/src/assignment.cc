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

#include "prae/assignment.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "prae/error.h"

namespace prae {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

void require_square(const CostMatrix& costs, const char* where) {
  if (costs.cost.size() != costs.n * costs.n) {
    throw DimensionError(std::string(where) + ": cost matrix is not n x n");
  }
}

double summed_cost(const CostMatrix& costs,
                   const std::vector<std::size_t>& mapping) {
  double total = 0.0;
  for (std::size_t i = 0; i < mapping.size(); ++i) {
    total += costs(i, mapping[i]);
  }
  return total;
}

}  // namespace

bool is_permutation_mapping(std::span<const std::size_t> mapping) {
  std::vector<bool> seen(mapping.size(), false);
  for (std::size_t j : mapping) {
    if (j >= mapping.size() || seen[j]) return false;
    seen[j] = true;
  }
  return true;
}

Assignment solve_assignment_exact(const CostMatrix& costs) {
  require_square(costs, "solve_assignment_exact");
  const std::size_t n = costs.n;
  Assignment result;
  if (n == 0) return result;

  // 1-based arrays; column 0 is the virtual source of each augmentation.
  std::vector<double> row_pot(n + 1, 0.0), col_pot(n + 1, 0.0);
  std::vector<std::size_t> row_of_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    row_of_col[0] = row;
    std::size_t col0 = 0;
    std::vector<double> min_slack(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t row0 = row_of_col[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double reduced =
            costs(row0 - 1, col - 1) - row_pot[row0] - col_pot[col];
        if (reduced < min_slack[col]) {
          min_slack[col] = reduced;
          way[col] = col0;
        }
        if (min_slack[col] < delta) {
          delta = min_slack[col];
          col1 = col;
        }
      }
      for (std::size_t col = 0; col <= n; ++col) {
        if (used[col]) {
          row_pot[row_of_col[col]] += delta;
          col_pot[col] -= delta;
        } else {
          min_slack[col] -= delta;
        }
      }
      col0 = col1;
    } while (row_of_col[col0] != 0);
    // Flip the augmenting path.
    do {
      const std::size_t col1 = way[col0];
      row_of_col[col0] = row_of_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  result.mapping.assign(n, 0);
  for (std::size_t col = 1; col <= n; ++col) {
    result.mapping[row_of_col[col] - 1] = col - 1;
  }
  result.total_cost = summed_cost(costs, result.mapping);
  return result;
}

Assignment solve_assignment_auction(const CostMatrix& costs,
                                    const AuctionOptions& options,
                                    AuctionStats* stats) {
  require_square(costs, "solve_assignment_auction");
  const std::size_t n = costs.n;
  Assignment result;
  if (n == 0) return result;
  if (!(options.quantization > 0.0) || !(options.scale_factor > 1.0) ||
      !(options.initial_fraction > 0.0)) {
    throw ConfigError("auction options out of range");
  }

  double max_cost = 0.0;
  for (double c : costs.cost) {
    if (!std::isfinite(c) || c < 0.0) {
      throw NumericError("auction costs must be finite and non-negative");
    }
    max_cost = std::max(max_cost, c);
  }
  if (n == 1 || max_cost == 0.0) {
    result.mapping.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.mapping[i] = i;
    result.total_cost = summed_cost(costs, result.mapping);
    if (stats) *stats = AuctionStats{};
    return result;
  }

  std::vector<double> scaled(costs.cost.size());
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    scaled[k] = std::round(costs.cost[k] / max_cost * options.quantization);
  }
  const double final_eps = options.final_epsilon > 0.0
                               ? options.final_epsilon
                               : 1.0 / static_cast<double>(n + 1);
  const std::uint64_t max_bids =
      options.max_bids > 0 ? options.max_bids
                           : 200ull * n * n + 1000000ull;

  std::vector<double> price(n, 0.0);
  std::vector<std::size_t> owner(n), assigned(n);
  double eps = std::max(options.quantization * options.initial_fraction,
                        final_eps);
  AuctionStats local;
  std::deque<std::size_t> unassigned;
  while (true) {
    ++local.phases;
    std::fill(owner.begin(), owner.end(), kUnassigned);
    std::fill(assigned.begin(), assigned.end(), kUnassigned);
    unassigned.clear();
    for (std::size_t i = 0; i < n; ++i) unassigned.push_back(i);

    while (!unassigned.empty()) {
      const std::size_t person = unassigned.front();
      unassigned.pop_front();
      const double* row = scaled.data() + person * n;
      double best = -kInf, second = -kInf;
      std::size_t best_obj = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const double value = -row[j] - price[j];
        if (value > best) {
          second = best;
          best = value;
          best_obj = j;
        } else if (value > second) {
          second = value;
        }
      }
      price[best_obj] += best - second + eps;
      if (owner[best_obj] != kUnassigned) {
        assigned[owner[best_obj]] = kUnassigned;
        unassigned.push_back(owner[best_obj]);
      }
      owner[best_obj] = person;
      assigned[person] = best_obj;
      if (++local.bids > max_bids) {
        std::ostringstream msg;
        msg << "auction did not converge: " << local.bids << " bids, phase "
            << local.phases << ", epsilon " << eps << ", "
            << unassigned.size() << " of " << n << " rows unassigned";
        throw ConvergenceError(msg.str());
      }
    }
    local.final_epsilon = eps;
    if (eps <= final_eps) break;
    eps = std::max(eps / options.scale_factor, final_eps);
  }

  result.mapping = assigned;
  result.total_cost = summed_cost(costs, result.mapping);
  if (stats) *stats = local;
  return result;
}

}  // namespace prae
