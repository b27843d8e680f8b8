#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "margmap/generate.hpp"
#include "margmap/inference.hpp"
#include "margmap/oracle.hpp"
#include "margmap/random.hpp"
#include "support/naive.hpp"
#include "support/weather.hpp"

using namespace margmap;

namespace {

std::vector<VariableId> all_variables(const GraphicalModel& m) {
  std::vector<VariableId> out(m.num_variables());
  for (VariableId v = 0; v < out.size(); ++v) out[v] = v;
  return out;
}

// Counts fill edges created when eliminating in `order` from the moral graph.
std::size_t total_fill(const GraphicalModel& m, const EliminationOrder& order) {
  const std::size_t n = m.num_variables();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const auto& p : m.potentials())
    for (VariableId a : p.scope())
      for (VariableId b : p.scope())
        if (a != b) adj[a][b] = true;
  std::vector<bool> gone(n, false);
  std::size_t fill = 0;
  for (VariableId v : order.order) {
    std::vector<VariableId> nb;
    for (VariableId u = 0; u < n; ++u)
      if (!gone[u] && adj[v][u]) nb.push_back(u);
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j)
        if (!adj[nb[i]][nb[j]]) {
          adj[nb[i]][nb[j]] = adj[nb[j]][nb[i]] = true;
          ++fill;
        }
    gone[v] = true;
  }
  return fill;
}

}  // namespace

TEST(Entropy, ReferenceValues) {
  EXPECT_DOUBLE_EQ(entropy(MassFunction(0, {0.5, 0.5})), 1.0);
  EXPECT_EQ(entropy(MassFunction(0, {1.0, 0.0})), 0.0);
  EXPECT_EQ(entropy(MassFunction(0, {1.0})), 0.0);

  const double a = entropy(MassFunction(0, {0.75, 0.24, 0.01}));
  const double b = entropy(MassFunction(0, {0.80, 0.10, 0.10}));
  EXPECT_NEAR(a, 0.5500768449304291, 1e-12);
  EXPECT_NEAR(b, 0.5816718657178868, 1e-12);
  EXPECT_LT(a, b);

  EXPECT_NEAR(entropy(MassFunction(0, {0.6, 0.4})), 0.9709505944546688, 1e-12);
  EXPECT_NEAR(entropy(MassFunction(0, {0.35, 0.65})), 0.9340680553754911, 1e-12);
  EXPECT_NEAR(entropy(MassFunction(0, {6.0 / 13, 7.0 / 13})), 0.9957274520849256,
              1e-12);
}

// The ternary [.2,.1,.7] is slightly MORE entropic than the binary [.8,.2]
// under the normalized formula. Pinned here so the direction is explicit.
TEST(Entropy, MixedCardinalityComparison) {
  EXPECT_NEAR(entropy(MassFunction(0, {0.2, 0.1, 0.7})), 0.7298466991620975, 1e-12);
  EXPECT_NEAR(entropy(MassFunction(0, {0.8, 0.2})), 0.7219280948873623, 1e-12);
}

TEST(Entropy, UniformAndDegenerateAcrossCardinalities) {
  for (std::size_t k = 2; k <= 6; ++k) {
    EXPECT_NEAR(entropy(MassFunction(0, std::vector<double>(k, 1.0 / k))), 1.0, 1e-12);
    std::vector<double> point(k, 0.0);
    point[k - 1] = 1.0;
    EXPECT_NEAR(entropy(MassFunction(0, point)), 0.0, 1e-12);
  }
}

TEST(Entropy, UniformIsTheUniqueMaximum) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = rng.between(2, 6);
    std::vector<double> p(k);
    double total = 0.0;
    for (double& x : p) total += (x = rng.uniform(0.0, 1.0) + 1e-3);
    for (double& x : p) x /= total;
    const double h = entropy(MassFunction(0, p));
    EXPECT_GE(h, 0.0);
    EXPECT_LT(h, 1.0 - 1e-12);
  }
}

TEST(MinFill, EmptySet) {
  EXPECT_TRUE(min_fill_order(weather::model(), {}).order.empty());
}

TEST(MinFill, ChainHasZeroFill) {
  Rng rng(1);
  const GraphicalModel chain = chain_model(3, 2, 1.0, rng);
  const auto all = all_variables(chain);
  const auto order = min_fill_order(chain, all);
  ASSERT_EQ(order.order.size(), 3u);
  EXPECT_EQ(total_fill(chain, order), 0u);
  // Both endpoints have zero fill; the lowest id wins the tie.
  EXPECT_EQ(order.order.front(), 0u);
}

TEST(MinFill, GridOrderIsAPermutation) {
  Rng rng(2);
  const GraphicalModel grid = grid_model({4, 4, 2, 1.0}, rng);
  const auto all = all_variables(grid);
  auto order = min_fill_order(grid, all).order;
  std::sort(order.begin(), order.end());
  EXPECT_EQ(order, all);
}

TEST(MinFill, PrIsOrderInvariant) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const GraphicalModel m = random_model({}, rng);
    const Evidence e = random_evidence(m, all_variables(m),
                                       rng.below(m.num_variables()), rng);
    const double a = pr(m, e, OrderPolicy::kMinFill);
    const double b = pr(m, e, OrderPolicy::kIdentity);
    EXPECT_NEAR(a, b, 1e-9 * b);
  }
}

TEST(Pr, Weather) {
  const auto m = weather::model();
  EXPECT_EQ(pr(m, {}), 1.0);
  EXPECT_NEAR(pr(m, {{weather::kDrive, weather::kDriving}}), 0.65, 1e-12);
}

TEST(Pr, MatchesBruteForce) {
  Rng rng(4);
  for (int i = 0; i < 60; ++i) {
    RandomModelOptions opt;
    opt.min_variables = 10;
    opt.max_variables = 10;
    const GraphicalModel m = random_model(opt, rng);
    const auto joint = naive::joint(m);
    const Evidence e = random_evidence(m, all_variables(m), rng.between(0, 4), rng);
    const double expected = naive::pr(joint, e);
    EXPECT_NEAR(pr(m, e), expected, 1e-9 * expected);
    EXPECT_NEAR(pr(m, {}), 1.0, 1e-12);
  }
}

TEST(Pr, StructurallyZeroEvidence) {
  const std::vector<std::size_t> cards{2, 2};
  const GraphicalModel m(cards, {Potential::over({0, 1}, cards, {1, 0, 0, 1})});
  EXPECT_EQ(pr(m, {{0, 0}, {1, 1}}), 0.0);
  EXPECT_THROW(mar(m, {{0, 0}, {1, 1}}, 0), ContractError);
}

TEST(Mar, Weather) {
  const auto m = weather::model();
  const auto r = mar(m, {}, weather::kRain);
  EXPECT_NEAR(r[0], 0.60, 1e-12);
  EXPECT_NEAR(r[1], 0.40, 1e-12);
  const auto given = mar(m, {{weather::kDrive, weather::kDriving}}, weather::kRain);
  EXPECT_NEAR(given[0], 6.0 / 13, 1e-12);
  EXPECT_NEAR(given[1], 7.0 / 13, 1e-12);
}

TEST(Mar, Errors) {
  const auto m = weather::model();
  EXPECT_THROW(mar(m, {{0, 1}}, 0), ContractError);
  EXPECT_THROW(mar(m, {}, 5), ContractError);

  const std::vector<std::size_t> cards{2, 2, 2};
  const GraphicalModel blocked(
      cards, {Potential::over({0, 1}, cards, {1, 0, 0, 1}),
              Potential::over({2}, cards, {1, 1})});
  EXPECT_THROW(mar(blocked, {{0, 0}, {1, 1}}, 2), ZeroProbabilityEvidence);
}

TEST(Mar, MatchesBruteForceUnderBothOrders) {
  Rng rng(6);
  for (int i = 0; i < 60; ++i) {
    const GraphicalModel m = random_model({}, rng);
    const auto joint = naive::joint(m);
    const Evidence e = random_evidence(m, all_variables(m),
                                       rng.below(m.num_variables()), rng);
    for (VariableId x : m.explainable(e)) {
      const auto expected = naive::mar(joint, e, x);
      for (OrderPolicy policy : {OrderPolicy::kMinFill, OrderPolicy::kIdentity}) {
        const auto got = mar(m, e, x, policy);
        double total = 0.0;
        for (std::size_t s = 0; s < expected.size(); ++s) {
          EXPECT_NEAR(got[s], expected[s], 1e-9);
          total += got[s];
        }
        EXPECT_NEAR(total, 1.0, 1e-9);
      }
    }
  }
}

// MAR by elimination equals |X| evidence-probability calls plus normalization.
TEST(Mar, EqualsPrReduction) {
  Rng rng(7);
  for (int i = 0; i < 30; ++i) {
    const GraphicalModel m = random_model({}, rng);
    const Evidence e = random_evidence(m, all_variables(m),
                                       rng.below(m.num_variables()), rng);
    for (VariableId x : m.explainable(e)) {
      std::vector<double> joint(m.cardinality(x));
      double total = 0.0;
      for (State s = 0; s < joint.size(); ++s) {
        Evidence with = e;
        with.assign(x, s);
        total += (joint[s] = pr(m, with));
      }
      const auto got = mar(m, e, x);
      for (State s = 0; s < joint.size(); ++s) {
        EXPECT_NEAR(got[s], joint[s] / total, 1e-9);
      }
    }
  }
}

// A long chain whose raw partition function underflows a double.
TEST(Elimination, RescalingAvoidsUnderflow) {
  const std::size_t n = 400;
  std::vector<std::size_t> cards(n, 2);
  std::vector<Potential> potentials;
  for (VariableId v = 0; v + 1 < n; ++v) {
    potentials.push_back(Potential::over({v, v + 1}, cards,
                                         {1e-3, 2e-3, 3e-3, 1e-3}));
  }
  const GraphicalModel m(cards, std::move(potentials));
  EXPECT_LT(log_partition(m), -2000.0);
  EXPECT_EQ(pr(m, {}), 1.0);
  const double p = pr(m, {{0, 1}, {n - 1, 0}});
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1.0);
  const auto middle = mar(m, {{0, 1}}, n / 2);
  EXPECT_NEAR(middle[0] + middle[1], 1.0, 1e-12);
}

TEST(Elimination, RejectsBadOrders) {
  const auto m = weather::model();
  const VariableId keep[] = {0};
  EXPECT_THROW(eliminate(m, {}, keep, EliminationOrder{{}}), ContractError);
  EXPECT_THROW(eliminate(m, {}, keep, EliminationOrder{{0, 1}}), ContractError);
  EXPECT_NO_THROW(eliminate(m, {}, keep, EliminationOrder{{1}}));
}

TEST(BruteForceJoint, Weather) {
  const Potential j = brute_force_joint(weather::model());
  const std::vector<double> expected{0.30, 0.30, 0.05, 0.35};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(j[i], expected[i], 1e-12);
}

TEST(BruteForceJoint, UniformBinary) {
  const std::vector<std::size_t> cards{2};
  const GraphicalModel m(cards, {Potential::over({0}, cards, {3.0, 3.0})});
  EXPECT_EQ(brute_force_joint(m).table(), (std::vector<double>{0.5, 0.5}));
}

TEST(BruteForceJoint, NormalizedAndMatchesNaive) {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const GraphicalModel m = random_model({}, rng);
    const Potential j = brute_force_joint(m);
    EXPECT_NEAR(j.sum(), 1.0, 1e-12);
    const auto ref = naive::joint(m);
    for (std::size_t s = 0; s < j.size(); s += 17) {
      EXPECT_NEAR(j[s], ref.weights[s] / ref.total, 1e-15);
    }
  }
}

TEST(BruteForceJoint, CapExceeded) {
  Rng rng(9);
  const GraphicalModel m = grid_model({3, 3, 2, 1.0}, rng);
  EXPECT_THROW(brute_force_joint(m, 256), OracleTooLarge);
  EXPECT_NO_THROW(brute_force_joint(m, 512));
}

TEST(BruteForceMmap, Weather) {
  const VariableId both[] = {weather::kRain, weather::kDrive};
  const MmapSolution s = brute_force_mmap(weather::model(), {}, both);
  EXPECT_EQ(s.assignment, (Assignment{{weather::kRain, weather::kRainy},
                                      {weather::kDrive, weather::kDriving}}));
  EXPECT_NEAR(s.probability, 0.35, 1e-12);
}

TEST(BruteForceMmap, EmptyExplainIsPr) {
  const auto m = weather::model();
  const Evidence e{{weather::kDrive, weather::kWalk}};
  const MmapSolution s = brute_force_mmap(m, e, {});
  EXPECT_TRUE(s.assignment.empty());
  EXPECT_NEAR(s.probability, 0.35, 1e-12);
}

TEST(BruteForceMmap, TiesGoToSmallestAssignment) {
  const std::vector<std::size_t> cards{2, 3};
  const GraphicalModel m(cards, {Potential::over({0, 1}, cards, {1, 2, 2, 1, 2, 2})});
  const VariableId both[] = {1, 0};
  EXPECT_EQ(brute_force_mmap(m, {}, both).assignment, (Assignment{{0, 0}, {1, 1}}));
}

TEST(BruteForceMmap, ZeroEvidence) {
  const std::vector<std::size_t> cards{2, 2, 2};
  const GraphicalModel m(cards, {Potential::over({0, 1}, cards, {1, 0, 0, 1}),
                                 Potential::over({2}, cards, {1, 3})});
  const VariableId x[] = {2};
  const MmapSolution s = brute_force_mmap(m, {{0, 0}, {1, 1}}, x);
  EXPECT_EQ(s.probability, 0.0);
  EXPECT_EQ(s.assignment, (Assignment{{2, 0}}));
}

TEST(BruteForceMmap, Errors) {
  const auto m = weather::model();
  const VariableId observed[] = {0};
  EXPECT_THROW(brute_force_mmap(m, {{0, 1}}, observed), ContractError);
  const VariableId twice[] = {1, 1};
  EXPECT_THROW(brute_force_mmap(m, {}, twice), ContractError);
  const VariableId both[] = {0, 1};
  EXPECT_THROW(brute_force_mmap(m, {}, both, 3), OracleTooLarge);
}

TEST(BruteForceMmap, MatchesJointTableMaximization) {
  Rng rng(10);
  for (int i = 0; i < 60; ++i) {
    RandomModelOptions opt;
    opt.min_variables = opt.max_variables = 8;
    const GraphicalModel m = random_model(opt, rng);
    const auto joint = naive::joint(m);
    const Evidence e = random_evidence(m, all_variables(m), rng.below(3), rng);
    auto pool = m.explainable(e);
    std::vector<VariableId> explain;
    for (VariableId v : pool) {
      if (rng.below(2)) explain.push_back(v);
    }
    const auto expected = naive::mmap(joint, e, explain);
    const MmapSolution got = brute_force_mmap(m, e, explain);
    EXPECT_NEAR(got.probability, expected.probability, 1e-9 * expected.probability);
    EXPECT_EQ(got.assignment, expected.assignment);

    Evidence full = e;
    for (const auto& [v, s] : got.assignment) full.assign(v, s);
    EXPECT_NEAR(got.probability, pr(m, full), 1e-9 * got.probability);
  }
}

TEST(BruteForceMmap, SingleVariableIsMarArgmax) {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const GraphicalModel m = random_model({}, rng);
    const Evidence e = random_evidence(m, all_variables(m),
                                       rng.below(m.num_variables()), rng);
    for (VariableId x : m.explainable(e)) {
      const VariableId one[] = {x};
      EXPECT_EQ(brute_force_mmap(m, e, one).assignment.at(x), mar(m, e, x).argmax());
    }
  }
}
