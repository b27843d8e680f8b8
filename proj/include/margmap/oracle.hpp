#pragma once

// Exact ground truth by exhaustive enumeration. Only meant for desk-scale
// models; every routine refuses to enumerate more than `cap` joint states.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "margmap/errors.hpp"
#include "margmap/inference.hpp"
#include "margmap/model.hpp"
#include "margmap/potential.hpp"

namespace margmap {

inline constexpr std::size_t kDefaultOracleCap = std::size_t{1} << 22;

/// Exact MMAP optimum x_M* and p* = P(x_M*, x_E).
struct MmapSolution {
  Assignment assignment;
  double probability = 0.0;
};

namespace detail {

inline std::size_t joint_state_count(const GraphicalModel& m,
                                     std::span<const VariableId> vars,
                                     std::size_t cap) {
  std::size_t count = 1;
  for (VariableId v : vars) {
    const std::size_t c = m.cardinality(v);
    if (count > cap / c) {
      throw OracleTooLarge("enumeration exceeds the cap of " +
                           std::to_string(cap) + " joint states");
    }
    count *= c;
  }
  return count;
}

}  // namespace detail

/// Normalized product of all potentials, enumerated entry by entry, over
/// variables 0..n-1 in order.
inline Potential brute_force_joint(const GraphicalModel& m,
                                   std::size_t cap = kDefaultOracleCap) {
  std::vector<VariableId> all(m.num_variables());
  for (VariableId v = 0; v < all.size(); ++v) all[v] = v;
  const std::size_t count = detail::joint_state_count(m, all, cap);

  std::vector<double> table(count);
  detail::Odometer it(m.cardinalities(), {});
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i, it.advance()) {
    double value = 1.0;
    for (const Potential& p : m.potentials()) value *= p.at_joint(it.states());
    table[i] = value;
    total += value;
  }
  if (!(total > 0.0)) throw ModelError("model has zero partition function");
  for (double& x : table) x /= total;
  return Potential(std::move(all), m.cardinalities(), std::move(table));
}

/// Exact MMAP: every x_M is enumerated against the exact joint P(x_M, x_E)
/// obtained by summing out the remaining variables. Ties go to the
/// lexicographically smallest assignment in variable id order. Zero-probability
/// evidence yields probability 0 with the all-zero assignment.
inline MmapSolution brute_force_mmap(const GraphicalModel& m, const Evidence& e,
                                     std::span<const VariableId> explain,
                                     std::size_t cap = kDefaultOracleCap) {
  std::vector<VariableId> vars(explain.begin(), explain.end());
  std::sort(vars.begin(), vars.end());
  if (std::adjacent_find(vars.begin(), vars.end()) != vars.end()) {
    throw ContractError("explain set lists a variable twice");
  }
  for (VariableId v : vars) {
    if (v >= m.num_variables()) throw ContractError("explain variable out of range");
    if (e.contains(v)) {
      throw ContractError("explain variable " + std::to_string(v) +
                          " is observed");
    }
  }
  detail::joint_state_count(m, vars, cap);

  const ScaledFactor joint = eliminate(m, e, vars);
  const double log_z = log_partition(m);

  // Row-major order over ascending ids is lexicographic order, so the first
  // maximum is the tie-break winner.
  const auto& table = joint.factor.table();
  const auto best = std::max_element(table.begin(), table.end());
  std::size_t index = static_cast<std::size_t>(best - table.begin());

  MmapSolution out;
  for (std::size_t i = vars.size(); i-- > 0;) {
    const std::size_t c = m.cardinality(vars[i]);
    out.assignment[vars[i]] = index % c;
    index /= c;
  }
  out.probability =
      *best > 0.0 ? std::exp(std::log(*best) + joint.log_scale - log_z) : 0.0;
  return out;
}

}  // namespace margmap
