#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "margmap/errors.hpp"
#include "margmap/potential.hpp"

namespace margmap {

// Full assignment of some variable set, keyed and ordered by variable id.
using Assignment = std::map<VariableId, State>;

enum class NetworkKind { kMarkov, kBayes };

/// A set of potentials whose product, normalized, is a joint distribution over
/// variables 0..n-1. Immutable once built.
class GraphicalModel {
 public:
  GraphicalModel(std::vector<std::size_t> cardinalities,
                 std::vector<Potential> potentials,
                 NetworkKind kind = NetworkKind::kMarkov)
      : cards_(std::move(cardinalities)),
        potentials_(std::move(potentials)),
        kind_(kind) {
    if (potentials_.empty()) throw ModelError("model has no potentials");
    for (std::size_t c : cards_) {
      if (c == 0) throw ModelError("variable with cardinality zero");
    }
    std::vector<bool> covered(cards_.size(), false);
    for (const Potential& p : potentials_) {
      detail::check_against(p, cards_);
      for (VariableId v : p.scope()) covered[v] = true;
    }
    const auto missing = std::find(covered.begin(), covered.end(), false);
    if (missing != covered.end()) {
      throw ModelError("variable " +
                       std::to_string(missing - covered.begin()) +
                       " appears in no potential");
    }
  }

  std::size_t num_variables() const noexcept { return cards_.size(); }
  std::size_t num_potentials() const noexcept { return potentials_.size(); }
  NetworkKind kind() const noexcept { return kind_; }

  const std::vector<std::size_t>& cardinalities() const noexcept {
    return cards_;
  }
  std::size_t cardinality(VariableId v) const { return cards_.at(v); }
  const std::vector<Potential>& potentials() const noexcept {
    return potentials_;
  }

  // Largest variable cardinality (omega in benchmark tables).
  std::size_t max_cardinality() const {
    return cards_.empty() ? 0 : *std::max_element(cards_.begin(), cards_.end());
  }

  // Unobserved variables with at least two states, ascending.
  std::vector<VariableId> explainable(const Evidence& e) const {
    std::vector<VariableId> out;
    for (VariableId v = 0; v < cards_.size(); ++v) {
      if (!e.contains(v) && cards_[v] >= 2) out.push_back(v);
    }
    return out;
  }

  friend bool operator==(const GraphicalModel&, const GraphicalModel&) = default;

 private:
  std::vector<std::size_t> cards_;
  std::vector<Potential> potentials_;
  NetworkKind kind_;
};

}  // namespace margmap
