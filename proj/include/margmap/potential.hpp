#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "margmap/errors.hpp"

namespace margmap {

using VariableId = std::size_t;
using State = std::size_t;

// Per-variable cardinalities of a model, indexed by VariableId.
using Cardinalities = std::span<const std::size_t>;

namespace detail {

// Mixed-radix counter over `dims` (last digit fastest) that keeps a set of
// linear offsets in sync. Offset `k` advances by `strides[k][d]` whenever
// digit `d` advances, so callers can walk several differently laid out tables
// in lockstep without recomputing dot products.
class Odometer {
 public:
  Odometer(std::span<const std::size_t> dims,
           std::vector<std::vector<std::size_t>> strides)
      : dims_(dims.begin(), dims.end()),
        digits_(dims.size(), 0),
        strides_(std::move(strides)),
        offsets_(strides_.size(), 0) {}

  std::size_t offset(std::size_t k) const { return offsets_[k]; }
  std::span<const State> states() const { return digits_; }

  // Returns false once the counter wraps past the last state.
  bool advance() {
    for (std::size_t d = dims_.size(); d-- > 0;) {
      if (++digits_[d] < dims_[d]) {
        for (std::size_t k = 0; k < strides_.size(); ++k) {
          offsets_[k] += strides_[k][d];
        }
        return true;
      }
      for (std::size_t k = 0; k < strides_.size(); ++k) {
        offsets_[k] -= strides_[k][d] * (dims_[d] - 1);
      }
      digits_[d] = 0;
    }
    return false;
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<State> digits_;
  std::vector<std::vector<std::size_t>> strides_;
  std::vector<std::size_t> offsets_;
};

inline std::vector<std::size_t> row_major_strides(
    std::span<const std::size_t> dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (std::size_t d = dims.size(); d-- > 1;) {
    strides[d - 1] = strides[d] * dims[d];
  }
  return strides;
}

inline std::size_t product_of(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace detail

/// Non-negative table over an ordered scope of discrete variables.
///
/// The table is row-major with the last scope variable varying fastest, the
/// same layout the UAI format uses. A potential with an empty scope is a
/// scalar holding exactly one entry.
class Potential {
 public:
  Potential() : table_{1.0} {}

  Potential(std::vector<VariableId> scope, std::vector<std::size_t> dims,
            std::vector<double> table)
      : scope_(std::move(scope)), dims_(std::move(dims)), table_(std::move(table)) {
    if (scope_.size() != dims_.size()) {
      throw ModelError("potential scope and dimension lists differ in length");
    }
    for (std::size_t i = 0; i < scope_.size(); ++i) {
      if (dims_[i] == 0) throw ModelError("potential dimension of zero");
      for (std::size_t j = 0; j < i; ++j) {
        if (scope_[i] == scope_[j]) {
          throw ModelError("duplicate variable " + std::to_string(scope_[i]) +
                           " in potential scope");
        }
      }
    }
    if (table_.size() != detail::product_of(dims_)) {
      throw ModelError("potential table has " + std::to_string(table_.size()) +
                       " entries, expected " +
                       std::to_string(detail::product_of(dims_)));
    }
    for (double v : table_) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ModelError("potential entries must be finite and non-negative");
      }
    }
  }

  // Builds a potential whose dimensions are looked up in `cards`.
  static Potential over(std::vector<VariableId> scope, Cardinalities cards,
                        std::vector<double> table) {
    std::vector<std::size_t> dims;
    dims.reserve(scope.size());
    for (VariableId v : scope) {
      if (v >= cards.size()) {
        throw ModelError("scope variable " + std::to_string(v) +
                         " out of range");
      }
      dims.push_back(cards[v]);
    }
    return Potential(std::move(scope), std::move(dims), std::move(table));
  }

  static Potential scalar(double value) { return Potential({}, {}, {value}); }

  const std::vector<VariableId>& scope() const noexcept { return scope_; }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  const std::vector<double>& table() const noexcept { return table_; }
  std::size_t size() const noexcept { return table_.size(); }
  double operator[](std::size_t i) const { return table_[i]; }

  bool contains(VariableId v) const {
    return std::find(scope_.begin(), scope_.end(), v) != scope_.end();
  }

  // Position of `v` in the scope, or scope().size() if absent.
  std::size_t position(VariableId v) const {
    return static_cast<std::size_t>(
        std::find(scope_.begin(), scope_.end(), v) - scope_.begin());
  }

  std::vector<std::size_t> strides() const {
    return detail::row_major_strides(dims_);
  }

  // Entry for a full assignment of the scope, aligned with scope().
  double at(std::span<const State> states) const {
    if (states.size() != scope_.size()) {
      throw ContractError("assignment length does not match potential scope");
    }
    std::size_t index = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i] >= dims_[i]) throw ContractError("state out of range");
      index = index * dims_[i] + states[i];
    }
    return table_[index];
  }

  // Entry for the scope restricted from a full model assignment.
  double at_joint(std::span<const State> model_states) const {
    std::size_t index = 0;
    for (std::size_t i = 0; i < scope_.size(); ++i) {
      index = index * dims_[i] + model_states[scope_[i]];
    }
    return table_[index];
  }

  double sum() const {
    return std::accumulate(table_.begin(), table_.end(), 0.0);
  }

  double max() const { return *std::max_element(table_.begin(), table_.end()); }

  friend bool operator==(const Potential&, const Potential&) = default;

 private:
  std::vector<VariableId> scope_;
  std::vector<std::size_t> dims_;
  std::vector<double> table_;
};

/// Partial assignment x_E of observed variables.
class Evidence {
 public:
  Evidence() = default;
  Evidence(std::initializer_list<std::pair<const VariableId, State>> pairs) {
    for (const auto& [v, s] : pairs) assign(v, s);
  }

  void assign(VariableId v, State s) {
    if (!values_.emplace(v, s).second) {
      throw ContractError("variable " + std::to_string(v) +
                          " observed twice in evidence");
    }
  }

  bool contains(VariableId v) const { return values_.contains(v); }
  State at(VariableId v) const { return values_.at(v); }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  // Throws ModelError unless every observation fits the given model shape.
  void check(Cardinalities cards) const {
    for (const auto& [v, s] : values_) {
      if (v >= cards.size()) {
        throw ModelError("evidence variable " + std::to_string(v) +
                         " out of range");
      }
      if (s >= cards[v]) {
        throw ModelError("evidence state " + std::to_string(s) +
                         " out of range for variable " + std::to_string(v));
      }
    }
  }

  friend bool operator==(const Evidence&, const Evidence&) = default;

 private:
  std::map<VariableId, State> values_;
};

/// Normalized distribution P(X | x_E) over the states of one variable.
class MassFunction {
 public:
  static constexpr double kSumTolerance = 1e-9;

  MassFunction(VariableId variable, std::vector<double> probs)
      : variable_(variable), probs_(std::move(probs)) {
    if (probs_.empty()) throw ContractError("mass function over no states");
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ContractError("mass function entry outside [0, 1]");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kSumTolerance) {
      throw ContractError("mass function does not sum to one");
    }
  }

  VariableId variable() const noexcept { return variable_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t cardinality() const noexcept { return probs_.size(); }
  double operator[](State s) const { return probs_[s]; }

  // Most probable state, lowest index on ties.
  State argmax() const {
    return static_cast<State>(
        std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
  }

  friend bool operator==(const MassFunction&, const MassFunction&) = default;

 private:
  VariableId variable_;
  std::vector<double> probs_;
};

namespace detail {

inline void check_against(const Potential& p, Cardinalities cards) {
  for (std::size_t i = 0; i < p.scope().size(); ++i) {
    const VariableId v = p.scope()[i];
    if (v >= cards.size()) {
      throw ModelError("scope variable " + std::to_string(v) + " out of range");
    }
    if (cards[v] != p.dims()[i]) {
      throw ModelError("potential dimension disagrees with cardinality of " +
                       std::to_string(v));
    }
  }
}

// Strides of `p` laid out along `scope`; variables absent from `p` get 0.
inline std::vector<std::size_t> strides_along(const Potential& p,
                                              std::span<const VariableId> scope) {
  const auto own = p.strides();
  std::vector<std::size_t> out(scope.size(), 0);
  for (std::size_t i = 0; i < scope.size(); ++i) {
    const std::size_t pos = p.position(scope[i]);
    if (pos < own.size()) out[i] = own[pos];
  }
  return out;
}

}  // namespace detail

/// Pointwise product over the ordered union of the two scopes (a's variables
/// first, then b's variables not already in a).
inline Potential factor_product(const Potential& a, const Potential& b,
                                Cardinalities cards) {
  detail::check_against(a, cards);
  detail::check_against(b, cards);

  std::vector<VariableId> scope = a.scope();
  std::vector<std::size_t> dims = a.dims();
  for (std::size_t i = 0; i < b.scope().size(); ++i) {
    if (!a.contains(b.scope()[i])) {
      scope.push_back(b.scope()[i]);
      dims.push_back(b.dims()[i]);
    }
  }

  std::vector<double> table(detail::product_of(dims));
  detail::Odometer it(dims, {detail::strides_along(a, scope),
                             detail::strides_along(b, scope)});
  std::size_t i = 0;
  do {
    table[i++] = a[it.offset(0)] * b[it.offset(1)];
  } while (it.advance());
  return Potential(std::move(scope), std::move(dims), std::move(table));
}

/// Sums the variables in `out` out of `p`. The remaining variables keep their
/// relative order.
inline Potential factor_marginalize(const Potential& p,
                                    std::span<const VariableId> out,
                                    Cardinalities cards) {
  detail::check_against(p, cards);
  for (VariableId v : out) {
    if (!p.contains(v)) {
      throw ContractError("cannot sum out variable " + std::to_string(v) +
                          " that is not in the potential's scope");
    }
  }
  if (out.empty()) return p;

  std::vector<VariableId> scope;
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < p.scope().size(); ++i) {
    if (std::find(out.begin(), out.end(), p.scope()[i]) == out.end()) {
      scope.push_back(p.scope()[i]);
      dims.push_back(p.dims()[i]);
    }
  }

  // Walk p in its own order; the offset tracks the destination entry.
  const auto kept_strides = detail::row_major_strides(dims);
  std::vector<std::size_t> target(p.scope().size(), 0);
  for (std::size_t i = 0, k = 0; i < p.scope().size(); ++i) {
    if (k < scope.size() && scope[k] == p.scope()[i]) target[i] = kept_strides[k++];
  }

  std::vector<double> table(detail::product_of(dims), 0.0);
  detail::Odometer it(p.dims(), {target});
  std::size_t i = 0;
  do {
    table[it.offset(0)] += p[i++];
  } while (it.advance());
  return Potential(std::move(scope), std::move(dims), std::move(table));
}

/// Slice of `p` consistent with `e`. Evidence on variables outside the scope
/// is ignored.
inline Potential factor_restrict(const Potential& p, const Evidence& e,
                                 Cardinalities cards) {
  detail::check_against(p, cards);
  const auto strides = p.strides();
  std::vector<VariableId> scope;
  std::vector<std::size_t> dims;
  std::vector<std::size_t> source;
  std::size_t base = 0;
  for (std::size_t i = 0; i < p.scope().size(); ++i) {
    const VariableId v = p.scope()[i];
    if (e.contains(v)) {
      const State s = e.at(v);
      if (s >= p.dims()[i]) {
        throw ModelError("evidence state out of range for variable " +
                         std::to_string(v));
      }
      base += s * strides[i];
    } else {
      scope.push_back(v);
      dims.push_back(p.dims()[i]);
      source.push_back(strides[i]);
    }
  }
  if (scope.size() == p.scope().size()) return p;

  std::vector<double> table(detail::product_of(dims));
  detail::Odometer it(dims, {source});
  std::size_t i = 0;
  do {
    table[i++] = p[base + it.offset(0)];
  } while (it.advance());
  return Potential(std::move(scope), std::move(dims), std::move(table));
}

/// Same entries as `p`, laid out along `scope` (a permutation of p's scope).
inline Potential factor_reorder(const Potential& p,
                                std::vector<VariableId> scope) {
  if (scope.size() != p.scope().size()) {
    throw ContractError("reorder target is not a permutation of the scope");
  }
  std::vector<std::size_t> dims;
  dims.reserve(scope.size());
  for (VariableId v : scope) {
    const std::size_t pos = p.position(v);
    if (pos == p.scope().size()) {
      throw ContractError("reorder target is not a permutation of the scope");
    }
    dims.push_back(p.dims()[pos]);
  }
  if (scope == p.scope()) return p;

  std::vector<double> table(p.size());
  detail::Odometer it(dims, {detail::strides_along(p, scope)});
  std::size_t i = 0;
  do {
    table[i++] = p[it.offset(0)];
  } while (it.advance());
  return Potential(std::move(scope), std::move(dims), std::move(table));
}

/// Divides a single-variable potential by its sum.
inline MassFunction normalize(const Potential& p) {
  if (p.scope().size() != 1) {
    throw ContractError("normalize expects a potential over one variable");
  }
  const double total = p.sum();
  if (!(total > 0.0)) {
    throw ZeroProbabilityEvidence("evidence has probability zero");
  }
  std::vector<double> probs(p.table());
  for (double& v : probs) v /= total;
  return MassFunction(p.scope().front(), std::move(probs));
}

}  // namespace margmap
