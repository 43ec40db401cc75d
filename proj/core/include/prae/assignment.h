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

#ifndef PRAE_ASSIGNMENT_H_
#define PRAE_ASSIGNMENT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace prae {

// Square cost matrix, row-major, n x n.
struct CostMatrix {
  std::size_t n = 0;
  std::vector<double> cost;

  double operator()(std::size_t row, std::size_t col) const {
    return cost[row * n + col];
  }
};

// Bijection row -> column with the summed cost of its pairs.
struct Assignment {
  std::vector<std::size_t> mapping;
  double total_cost = 0.0;
};

bool is_permutation_mapping(std::span<const std::size_t> mapping);

// Exact minimum-cost assignment by shortest augmenting paths with dual
// potentials (Hungarian / Jonker-Volgenant family), O(n^3).
Assignment solve_assignment_exact(const CostMatrix& costs);

struct AuctionOptions {
  // Costs are rescaled to integers in [0, quantization] before bidding.
  double quantization = 1e7;
  // First epsilon = max integer cost * initial_fraction.
  double initial_fraction = 1.0 / 8.0;
  double scale_factor = 4.0;
  // Last epsilon in integer-cost units; <= 0 selects 1/(n+1), which makes
  // the final phase optimal for the integer costs.
  double final_epsilon = 0.0;
  // Total bid budget before ConvergenceError; 0 selects 200 * n^2 + 10^6.
  std::uint64_t max_bids = 0;
};

struct AuctionStats {
  int phases = 0;
  std::uint64_t bids = 0;
  double final_epsilon = 0.0;
};

// Forward auction with epsilon scaling. The result is the exact optimum of
// the quantized problem whenever final_epsilon < 1/n; the gap to the true
// optimum is then bounded by n * max_cost / quantization. Larger
// final_epsilon trades accuracy for speed with gap <= n * epsilon (in
// integer units). total_cost is evaluated on the original costs.
Assignment solve_assignment_auction(const CostMatrix& costs,
                                    const AuctionOptions& options = {},
                                    AuctionStats* stats = nullptr);

}  // namespace prae

#endif  // PRAE_ASSIGNMENT_H_
