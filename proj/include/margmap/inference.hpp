#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "margmap/errors.hpp"
#include "margmap/model.hpp"
#include "margmap/potential.hpp"

namespace margmap {

/// Normalized entropy -sum p log_|X| p, in [0, 1]. Uses 0 log 0 = 0; a
/// single-state mass function has entropy 0.
inline double entropy(const MassFunction& p) {
  const std::size_t k = p.cardinality();
  if (k < 2) return 0.0;
  double h = 0.0;
  for (double x : p.probs()) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return std::clamp(h / std::log(static_cast<double>(k)), 0.0, 1.0);
}

/// Permutation of the variables to sum out during elimination.
struct EliminationOrder {
  std::vector<VariableId> order;
};

enum class OrderPolicy {
  kMinFill,   // greedy min-fill, lowest id on ties
  kIdentity,  // ascending variable id
};

/// Greedy min-fill order over the interaction graph of the unobserved
/// variables. Variables not in `eliminate` stay in the graph and contribute to
/// fill counts but are never chosen. Ties go to the lowest id.
inline EliminationOrder min_fill_order(const GraphicalModel& m,
                                       std::span<const VariableId> eliminate,
                                       const Evidence& e = {}) {
  const std::size_t n = m.num_variables();
  std::vector<std::set<VariableId>> adj(n);
  for (const Potential& p : m.potentials()) {
    for (VariableId a : p.scope()) {
      if (e.contains(a)) continue;
      for (VariableId b : p.scope()) {
        if (a != b && !e.contains(b)) adj[a].insert(b);
      }
    }
  }

  std::set<VariableId> pending;
  for (VariableId v : eliminate) {
    if (v >= n) throw ContractError("elimination variable out of range");
    pending.insert(v);
  }

  EliminationOrder result;
  result.order.reserve(pending.size());
  while (!pending.empty()) {
    VariableId best = *pending.begin();
    std::size_t best_fill = std::numeric_limits<std::size_t>::max();
    for (VariableId v : pending) {
      std::size_t fill = 0;
      for (auto i = adj[v].begin(); i != adj[v].end(); ++i) {
        for (auto j = std::next(i); j != adj[v].end(); ++j) {
          if (!adj[*i].contains(*j)) ++fill;
        }
      }
      if (fill < best_fill) {
        best_fill = fill;
        best = v;
      }
    }
    for (VariableId a : adj[best]) {
      for (VariableId b : adj[best]) {
        if (a != b) adj[a].insert(b);
      }
      adj[a].erase(best);
    }
    adj[best].clear();
    pending.erase(best);
    result.order.push_back(best);
  }
  return result;
}

/// Result of variable elimination: a factor over the kept variables (in
/// ascending id order) whose true value is `factor * exp(log_scale)`.
struct ScaledFactor {
  Potential factor;
  double log_scale = 0.0;

  double log_sum() const {
    const double s = factor.sum();
    return s > 0.0 ? std::log(s) + log_scale
                   : -std::numeric_limits<double>::infinity();
  }
};

namespace detail {

// Rescales `p` so its largest entry is 1 and returns log of the factor taken
// out. All-zero factors are left untouched.
inline double rescale(Potential& p) {
  const double peak = p.max();
  if (!(peak > 0.0) || peak == 1.0) return 0.0;
  std::vector<double> table(p.table());
  for (double& x : table) x /= peak;
  p = Potential(p.scope(), p.dims(), std::move(table));
  return std::log(peak);
}

}  // namespace detail

/// Conditions every potential on `e`, then sums out every unobserved variable
/// not in `keep`, bucket by bucket in `order`. Intermediate factors are
/// rescaled to max entry 1 with the scale tracked in log space.
inline ScaledFactor eliminate(const GraphicalModel& m, const Evidence& e,
                              std::span<const VariableId> keep,
                              const EliminationOrder& order) {
  const auto& cards = m.cardinalities();
  e.check(cards);

  std::vector<bool> kept(m.num_variables(), false);
  for (VariableId v : keep) {
    if (v >= m.num_variables()) throw ContractError("kept variable out of range");
    if (e.contains(v)) throw ContractError("kept variable is observed");
    kept[v] = true;
  }
  std::vector<bool> scheduled(m.num_variables(), false);
  for (VariableId v : order.order) {
    if (v >= m.num_variables() || kept[v] || e.contains(v) || scheduled[v]) {
      throw ContractError("elimination order names an invalid variable");
    }
    scheduled[v] = true;
  }
  for (VariableId v = 0; v < m.num_variables(); ++v) {
    if (!kept[v] && !e.contains(v) && !scheduled[v]) {
      throw ContractError("elimination order misses variable " +
                          std::to_string(v));
    }
  }

  double log_scale = 0.0;
  std::vector<Potential> pool;
  pool.reserve(m.num_potentials());
  for (const Potential& p : m.potentials()) {
    pool.push_back(factor_restrict(p, e, cards));
    log_scale += detail::rescale(pool.back());
  }

  for (VariableId v : order.order) {
    Potential bucket;
    std::vector<Potential> rest;
    rest.reserve(pool.size());
    for (Potential& p : pool) {
      if (p.contains(v)) {
        bucket = factor_product(bucket, p, cards);
      } else {
        rest.push_back(std::move(p));
      }
    }
    const VariableId out[] = {v};
    Potential message = factor_marginalize(bucket, out, cards);
    log_scale += detail::rescale(message);
    rest.push_back(std::move(message));
    pool = std::move(rest);
  }

  Potential result;
  for (const Potential& p : pool) {
    result = factor_product(result, p, cards);
    log_scale += detail::rescale(result);
  }
  std::vector<VariableId> target(keep.begin(), keep.end());
  std::sort(target.begin(), target.end());
  return {factor_reorder(result, std::move(target)), log_scale};
}

/// Variables that elimination must sum out when keeping `keep` under `e`.
inline std::vector<VariableId> summed_variables(const GraphicalModel& m,
                                                const Evidence& e,
                                                std::span<const VariableId> keep) {
  std::vector<VariableId> out;
  for (VariableId v = 0; v < m.num_variables(); ++v) {
    if (!e.contains(v) && std::find(keep.begin(), keep.end(), v) == keep.end()) {
      out.push_back(v);
    }
  }
  return out;
}

inline EliminationOrder make_order(const GraphicalModel& m, const Evidence& e,
                                   std::span<const VariableId> keep,
                                   OrderPolicy policy) {
  auto vars = summed_variables(m, e, keep);
  if (policy == OrderPolicy::kIdentity) return {std::move(vars)};
  return min_fill_order(m, vars, e);
}

inline ScaledFactor eliminate(const GraphicalModel& m, const Evidence& e,
                              std::span<const VariableId> keep,
                              OrderPolicy policy = OrderPolicy::kMinFill) {
  return eliminate(m, e, keep, make_order(m, e, keep, policy));
}

/// log of the partition function sum_x prod_i phi_i(x).
inline double log_partition(const GraphicalModel& m,
                            OrderPolicy policy = OrderPolicy::kMinFill) {
  return eliminate(m, Evidence{}, {}, policy).log_sum();
}

/// P(x_E). Returns 0 for structurally impossible evidence.
inline double pr(const GraphicalModel& m, const Evidence& e,
                 OrderPolicy policy = OrderPolicy::kMinFill) {
  const double log_numerator = eliminate(m, e, {}, policy).log_sum();
  if (std::isinf(log_numerator)) return 0.0;
  const double log_z = log_partition(m, policy);
  if (std::isinf(log_z)) throw ModelError("model has zero partition function");
  return std::exp(log_numerator - log_z);
}

/// P(X | x_E) for one unobserved variable X.
inline MassFunction mar(const GraphicalModel& m, const Evidence& e,
                        VariableId x,
                        OrderPolicy policy = OrderPolicy::kMinFill) {
  if (x >= m.num_variables()) throw ContractError("MAR variable out of range");
  if (e.contains(x)) {
    throw ContractError("MAR variable " + std::to_string(x) + " is observed");
  }
  const VariableId keep[] = {x};
  return normalize(eliminate(m, e, keep, policy).factor);
}

}  // namespace margmap
