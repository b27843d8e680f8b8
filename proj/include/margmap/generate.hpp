#pragma once

// Random desk-scale models: grids and chains standing in for benchmark
// Markov random fields, and unstructured models for property tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "margmap/errors.hpp"
#include "margmap/model.hpp"
#include "margmap/potential.hpp"
#include "margmap/random.hpp"

namespace margmap {

struct GridOptions {
  std::size_t rows = 3;
  std::size_t cols = 3;
  std::size_t cardinality = 2;
  // Log-potential entries are drawn uniformly from [-coupling, coupling].
  double coupling = 2.0;
};

/// Pairwise MRF on a rows x cols lattice: one unary potential per node (row
/// major) followed by horizontal then vertical edge potentials.
inline GraphicalModel grid_model(const GridOptions& opt, Rng& rng) {
  if (opt.rows == 0 || opt.cols == 0) throw ContractError("empty grid");
  if (opt.cardinality == 0) throw ContractError("cardinality must be positive");
  const std::size_t n = opt.rows * opt.cols;
  const std::vector<std::size_t> cards(n, opt.cardinality);

  auto table = [&](std::size_t size) {
    std::vector<double> t(size);
    for (double& x : t) x = std::exp(rng.uniform(-opt.coupling, opt.coupling));
    return t;
  };

  std::vector<Potential> potentials;
  for (VariableId v = 0; v < n; ++v) {
    potentials.push_back(Potential::over({v}, cards, table(opt.cardinality)));
  }
  const std::size_t pair = opt.cardinality * opt.cardinality;
  for (std::size_t r = 0; r < opt.rows; ++r) {
    for (std::size_t c = 0; c + 1 < opt.cols; ++c) {
      const VariableId v = r * opt.cols + c;
      potentials.push_back(Potential::over({v, v + 1}, cards, table(pair)));
    }
  }
  for (std::size_t r = 0; r + 1 < opt.rows; ++r) {
    for (std::size_t c = 0; c < opt.cols; ++c) {
      const VariableId v = r * opt.cols + c;
      potentials.push_back(Potential::over({v, v + opt.cols}, cards, table(pair)));
    }
  }
  return GraphicalModel(cards, std::move(potentials));
}

inline GraphicalModel chain_model(std::size_t length, std::size_t cardinality,
                                  double coupling, Rng& rng) {
  return grid_model({1, length, cardinality, coupling}, rng);
}

struct RandomModelOptions {
  std::size_t min_variables = 2;
  std::size_t max_variables = 12;
  std::size_t min_cardinality = 2;
  std::size_t max_cardinality = 4;
  std::size_t max_scope = 3;
  // Upper bound on the product of all cardinalities.
  std::size_t max_joint_states = std::size_t{1} << 16;
  // Table entries are uniform in [min_entry, 1).
  double min_entry = 0.05;
};

/// Random model with positive tables over random scopes of size 1..max_scope.
/// Every variable is covered; cardinalities are lowered as needed to respect
/// the joint-state budget.
inline GraphicalModel random_model(const RandomModelOptions& opt, Rng& rng) {
  const std::size_t n = rng.between(opt.min_variables, opt.max_variables);
  std::vector<std::size_t> cards(n);
  for (auto& c : cards) c = rng.between(opt.min_cardinality, opt.max_cardinality);
  auto joint = [&] {
    double total = 1.0;
    for (std::size_t c : cards) total *= static_cast<double>(c);
    return total;
  };
  while (joint() > static_cast<double>(opt.max_joint_states)) {
    auto largest = std::max_element(cards.begin(), cards.end());
    if (*largest <= 2) throw ContractError("joint-state budget too small");
    --*largest;
  }

  std::vector<Potential> potentials;
  std::vector<bool> covered(n, false);
  auto add = [&](std::vector<VariableId> scope) {
    std::size_t size = 1;
    for (VariableId v : scope) {
      size *= cards[v];
      covered[v] = true;
    }
    std::vector<double> table(size);
    for (double& x : table) x = rng.uniform(opt.min_entry, 1.0);
    potentials.push_back(Potential::over(std::move(scope), cards, std::move(table)));
  };

  const std::size_t f = rng.between(n / 2 + 1, n + n / 2);
  for (std::size_t i = 0; i < f; ++i) {
    const std::size_t width = rng.between(1, std::min(opt.max_scope, n));
    std::vector<VariableId> pool(n);
    for (VariableId v = 0; v < n; ++v) pool[v] = v;
    std::vector<VariableId> scope;
    for (std::size_t j = 0; j < width; ++j) {
      const std::size_t pick = j + rng.below(n - j);
      std::swap(pool[j], pool[pick]);
      scope.push_back(pool[j]);
    }
    add(std::move(scope));
  }
  for (VariableId v = 0; v < n; ++v) {
    if (!covered[v]) add({v});
  }
  return GraphicalModel(std::move(cards), std::move(potentials));
}

/// Random evidence on `k` distinct variables drawn from `candidates`.
inline Evidence random_evidence(const GraphicalModel& m,
                                std::span<const VariableId> candidates,
                                std::size_t k, Rng& rng) {
  if (k > candidates.size()) throw ContractError("too few candidates for evidence");
  std::vector<VariableId> pool(candidates.begin(), candidates.end());
  Evidence e;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t pick = j + rng.below(pool.size() - j);
    std::swap(pool[j], pool[pick]);
  }
  for (std::size_t j = 0; j < k; ++j) {
    e.assign(pool[j], rng.below(m.cardinality(pool[j])));
  }
  return e;
}

}  // namespace margmap
