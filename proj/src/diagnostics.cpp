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

#include "pbrl/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>

#include "pbrl/error.hpp"

namespace pbrl {

namespace {

constexpr double kTol = 1e-12;

double sup_distance(const std::vector<double>& f, const std::vector<double>& g) {
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) d = std::max(d, std::abs(f[i] - g[i]));
  return d;
}

bool cover_of_size(const std::vector<std::uint32_t>& balls, std::uint32_t all,
                   int size, int start, std::uint32_t covered) {
  if (covered == all) return true;
  if (size == 0) return false;
  const int n = static_cast<int>(balls.size());
  for (int c = start; c <= n - size; ++c) {
    if (cover_of_size(balls, all, size - 1, c + 1, covered | balls[c])) return true;
  }
  return false;
}

}  // namespace

void FiniteFunctionClass::validate() const {
  if (domain_size < 1) throw InvalidArgument("function class needs a nonempty domain");
  if (functions.empty()) throw InvalidArgument("function class is empty");
  for (const auto& f : functions) {
    if (static_cast<int>(f.size()) != domain_size) {
      throw InvalidArgument("function table length differs from the domain size");
    }
    for (double v : f) {
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("function values must lie in [0, 1]");
    }
  }
}

nlohmann::json FiniteFunctionClass::to_json() const {
  return {{"domain_size", domain_size}, {"functions", functions}};
}

FiniteFunctionClass FiniteFunctionClass::from_json(const nlohmann::json& j) {
  FiniteFunctionClass c;
  c.functions = j.at("functions").get<std::vector<std::vector<double>>>();
  c.domain_size = j.value("domain_size",
                          c.functions.empty() ? 0 : static_cast<int>(c.functions[0].size()));
  c.validate();
  return c;
}

CoveringResult covering_number(const FiniteFunctionClass& cls, double eps) {
  cls.validate();
  if (!(eps > 0.0)) throw InvalidArgument("covering radius must be positive");
  const int n = static_cast<int>(cls.functions.size());
  std::vector<std::vector<char>> within(n, std::vector<char>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      within[i][j] = sup_distance(cls.functions[i], cls.functions[j]) <= eps + kTol;
    }
  }
  std::vector<char> covered(n, 0);
  int remaining = n;
  int greedy = 0;
  while (remaining > 0) {
    int best = -1, gain = -1;
    for (int c = 0; c < n; ++c) {
      int g = 0;
      for (int f = 0; f < n; ++f) g += !covered[f] && within[c][f];
      if (g > gain) {
        gain = g;
        best = c;
      }
    }
    for (int f = 0; f < n; ++f) {
      if (!covered[f] && within[best][f]) {
        covered[f] = 1;
        --remaining;
      }
    }
    ++greedy;
  }
  CoveringResult out{greedy, greedy, false};
  if (n <= 20) {
    std::vector<std::uint32_t> balls(n, 0);
    for (int c = 0; c < n; ++c) {
      for (int f = 0; f < n; ++f) {
        if (within[c][f]) balls[c] |= 1u << f;
      }
    }
    const std::uint32_t all = n == 32 ? ~0u : (1u << n) - 1;
    for (int m = 1; m < greedy; ++m) {
      if (cover_of_size(balls, all, m, 0, 0)) {
        out.value = m;
        break;
      }
    }
    out.exact = true;
  }
  return out;
}

int eluder_dimension(const FiniteFunctionClass& cls, double alpha) {
  cls.validate();
  if (!(alpha > 0.0)) throw InvalidArgument("eluder scale alpha must be positive");
  const int nx = cls.domain_size;
  if (nx > kMaxEluderDomain) {
    throw DomainTooLarge("eluder search supports at most " +
                         std::to_string(kMaxEluderDomain) + " domain points, got " +
                         std::to_string(nx));
  }
  const auto& F = cls.functions;
  struct Pair {
    std::vector<double> sq;  // (f1 - f2)^2 per point
    std::vector<double> gap; // f1 - f2 per point
  };
  std::vector<Pair> pairs;
  std::set<double> candidates;
  for (std::size_t a = 0; a < F.size(); ++a) {
    for (std::size_t b = 0; b < F.size(); ++b) {
      if (a == b) continue;
      Pair p;
      bool useful = false;
      for (int x = 0; x < nx; ++x) {
        const double g = F[a][x] - F[b][x];
        p.gap.push_back(g);
        p.sq.push_back(g * g);
        if (g >= alpha - kTol) {
          candidates.insert(g);
          useful = true;
        }
      }
      if (useful) pairs.push_back(std::move(p));
    }
  }
  const std::uint32_t full = (1u << nx) - 1;
  std::vector<std::uint32_t> indep(std::size_t{1} << nx);
  std::vector<int> best(std::size_t{1} << nx);
  int answer = 0;
  for (double a : candidates) {
    std::vector<std::uint32_t> reach(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      for (int x = 0; x < nx; ++x) {
        if (pairs[p].gap[x] >= a - kTol) reach[p] |= 1u << x;
      }
    }
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      std::uint32_t bits = 0;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        if ((bits | reach[p]) == bits) continue;
        double s = 0.0;
        for (std::uint32_t m = mask; m != 0; m &= m - 1) s += pairs[p].sq[std::countr_zero(m)];
        if (s <= a * a + kTol) bits |= reach[p];
      }
      indep[mask] = bits & ~mask;
    }
    for (std::uint32_t mask = full + 1; mask-- > 0;) {
      int b = 0;
      for (std::uint32_t m = indep[mask]; m != 0; m &= m - 1) {
        b = std::max(b, 1 + best[mask | (1u << std::countr_zero(m))]);
      }
      best[mask] = b;
    }
    answer = std::max(answer, best[0]);
    if (answer == nx) break;
  }
  return answer;
}

}  // namespace pbrl
