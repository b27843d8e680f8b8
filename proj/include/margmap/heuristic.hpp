#pragma once

// Greedy reduction of marginal MAP to a sequence of single-variable marginals.
//
// Each round computes P(X | x_E') for every variable X still to explain,
// picks the least entropic one, and moves its most probable state into the
// working evidence x_E'. With k variables to explain this needs exactly
// k(k+1)/2 marginal computations. The thresholded variant stops as soon as
// the least entropic marginal is not strictly below epsilon and leaves the
// remaining variables unexplained.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "margmap/errors.hpp"
#include "margmap/inference.hpp"
#include "margmap/model.hpp"
#include "margmap/potential.hpp"

namespace margmap {

struct HeuristicConfig {
  // Entropy threshold; std::nullopt runs until every variable is explained.
  std::optional<double> epsilon;
};

struct ExplanationStep {
  VariableId variable;
  State chosen_state;
  double entropy_at_selection;
  MassFunction marginal;  // P(X* | x_E') at selection time
};

struct ExplanationTrace {
  std::vector<ExplanationStep> steps;
  Assignment explained;
  std::vector<VariableId> unexplained;  // ascending; empty unless thresholded
  // P(explained, x_E), accumulated by the chain rule from the step marginals.
  double p_tilde = 0.0;
  // Minimum over accepted steps of 1 - entropy; 1 for an empty trace.
  double confidence = 1.0;
  // Least entropic candidate of the round that hit the threshold, if any.
  std::optional<VariableId> break_variable;
  std::optional<double> break_entropy;
  std::size_t mar_calls = 0;
  double mar_seconds = 0.0;
};

inline double confidence(const ExplanationTrace& t) {
  double c = 1.0;
  for (const auto& step : t.steps) c = std::min(c, 1.0 - step.entropy_at_selection);
  return c;
}

// Default marginal routine: exact MAR by variable elimination.
struct ExactMarginal {
  OrderPolicy policy = OrderPolicy::kMinFill;

  MassFunction operator()(const GraphicalModel& m, const Evidence& e,
                          VariableId x) const {
    return mar(m, e, x, policy);
  }
};

namespace detail {

inline std::vector<VariableId> checked_explain_set(
    const GraphicalModel& m, std::span<const VariableId> explain,
    const Evidence& e) {
  if (explain.empty()) throw ContractError("explain set is empty");
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
    if (m.cardinality(v) < 2) {
      throw ContractError("explain variable " + std::to_string(v) +
                          " has a single state");
    }
  }
  return vars;
}

}  // namespace detail

/// Runs the greedy explanation with an arbitrary marginal routine
/// `marginal(model, evidence, variable) -> MassFunction`.
template <typename MarginalFn>
ExplanationTrace explain_greedily(const GraphicalModel& m,
                                  std::span<const VariableId> explain,
                                  const Evidence& e,
                                  const HeuristicConfig& config,
                                  MarginalFn&& marginal) {
  using Clock = std::chrono::steady_clock;
  if (config.epsilon && !(*config.epsilon >= 0.0 && *config.epsilon <= 1.0)) {
    throw ContractError("epsilon must lie in [0, 1]");
  }
  e.check(m.cardinalities());
  std::vector<VariableId> remaining = detail::checked_explain_set(m, explain, e);

  ExplanationTrace trace;
  trace.p_tilde = pr(m, e);
  Evidence working = e;

  while (!remaining.empty()) {
    std::optional<MassFunction> best;
    double best_entropy = 0.0;
    for (VariableId x : remaining) {
      const auto start = Clock::now();
      std::optional<MassFunction> p;
      try {
        p.emplace(marginal(m, working, x));
      } catch (const ZeroProbabilityEvidence&) {
        throw ZeroProbabilityEvidence(
            "working evidence has probability zero at step " +
            std::to_string(trace.steps.size() + 1));
      }
      trace.mar_seconds +=
          std::chrono::duration<double>(Clock::now() - start).count();
      ++trace.mar_calls;

      const double h = entropy(*p);
      if (!best || h < best_entropy) {
        best = std::move(p);
        best_entropy = h;
      }
    }

    const VariableId chosen = best->variable();
    if (config.epsilon && !(best_entropy < *config.epsilon)) {
      trace.break_variable = chosen;
      trace.break_entropy = best_entropy;
      break;
    }

    const State state = best->argmax();
    trace.p_tilde *= (*best)[state];
    trace.confidence = std::min(trace.confidence, 1.0 - best_entropy);
    trace.explained[chosen] = state;
    working.assign(chosen, state);
    remaining.erase(std::find(remaining.begin(), remaining.end(), chosen));
    trace.steps.push_back({chosen, state, best_entropy, std::move(*best)});
  }

  trace.unexplained = std::move(remaining);
  return trace;
}

/// Explains every variable in `explain`.
inline ExplanationTrace mmap2mar(const GraphicalModel& m,
                                 std::span<const VariableId> explain,
                                 const Evidence& e) {
  return explain_greedily(m, explain, e, HeuristicConfig{}, ExactMarginal{});
}

/// Explains variables only while the least entropic marginal stays strictly
/// below `epsilon`.
inline ExplanationTrace epsilon_mmap2mar(const GraphicalModel& m,
                                         std::span<const VariableId> explain,
                                         const Evidence& e, double epsilon) {
  return explain_greedily(m, explain, e, HeuristicConfig{epsilon},
                          ExactMarginal{});
}

}  // namespace margmap
