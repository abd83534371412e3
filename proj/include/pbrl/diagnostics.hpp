// Copyright 2026 The pbrl Authors. All rights reserved.
//
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

#ifndef PBRL_DIAGNOSTICS_HPP_
#define PBRL_DIAGNOSTICS_HPP_

#include <vector>

#include "json.hpp"

namespace pbrl {

// Finite class of functions X -> [0, 1] on an indexed domain.
struct FiniteFunctionClass {
  int domain_size = 0;
  std::vector<std::vector<double>> functions;

  void validate() const;
  nlohmann::json to_json() const;
  static FiniteFunctionClass from_json(const nlohmann::json& j);
};

struct CoveringResult {
  int value = 0;   // best known cover size
  int greedy = 0;  // greedy set-cover size
  bool exact = false;
};

// Sup-norm eps-cover with centers drawn from the class. The greedy size is
// confirmed (or improved) by exhaustive search when the class has at most 20
// members.
CoveringResult covering_number(const FiniteFunctionClass& cls, double eps);

inline constexpr int kMaxEluderDomain = 16;

// Length of the longest sequence of distinct points, each alpha'-independent
// of its prefix for one common alpha' >= alpha, where independence means some
// f1, f2 have prefix distance sqrt(sum (f1 - f2)^2) <= alpha' and
// f1(x) - f2(x) >= alpha'. Throws DomainTooLarge above 16 points.
int eluder_dimension(const FiniteFunctionClass& cls, double alpha);

}  // namespace pbrl

#endif  // PBRL_DIAGNOSTICS_HPP_
