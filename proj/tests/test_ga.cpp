/*
Copyright 2026 The apxmul Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "apxmul/ga.hpp"

using namespace apxmul;

namespace {

SearchSpace micro_space() {
  // 2x2 multiplier, both rows compressed, restricted columns: Z = 3*2*2 = 12.
  GroupingPlan plan;
  plan.n = 2;
  plan.m = 2;
  plan.compressed_rows = {0, 1};
  plan.groups.push_back(BitGroup{0, {PPBit{0, 1}, PPBit{1, 0}}, 1});
  plan.groups.push_back(BitGroup{1, {PPBit{0, 0}, PPBit{1, 1}}, 0});
  return enumerate_search_space(2, 2, plan, {1, 2});
}

double exhaustive_minimum(const SearchSpace& space, const OperandDistribution& dist,
                          const ObjectiveConfig& cfg) {
  ObjectiveEvaluator evaluator(space, dist, cfg);
  double best = std::numeric_limits<double>::infinity();
  const int z = space.z();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << z); ++mask) {
    ThetaVector theta(z);
    for (int i = 0; i < z; ++i) theta.bits[i] = (mask >> i) & 1;
    best = std::min(best, evaluator.objective(theta));
  }
  return best;
}

}  // namespace

TEST_CASE("GA matches exhaustive enumeration on a micro instance") {
  const auto space = micro_space();
  REQUIRE(space.z() == 12);
  const auto uniform = OperandDistribution::uniform(2, 2);
  ObjectiveConfig obj_cfg;
  obj_cfg.lambda1 = 0.0;
  GAConfig ga_cfg;
  ga_cfg.seed = 1;
  const double optimum = exhaustive_minimum(space, uniform, obj_cfg);
  const auto result = optimize(space, uniform, obj_cfg, ga_cfg);
  CHECK(result.best.fitness == doctest::Approx(optimum).epsilon(1e-12));
}

TEST_CASE("GA reaches zero on a space containing the exact multiplier") {
  const auto plan = default_grouping(4, 4, {0, 1});
  const auto space = enumerate_search_space(4, 4, plan, all_columns(4, 4));
  const auto uniform = OperandDistribution::uniform(4, 4);
  ObjectiveConfig obj_cfg;
  obj_cfg.lambda1 = 0.0;
  GAConfig ga_cfg;
  ga_cfg.seed = 7;
  const auto result = optimize(space, uniform, obj_cfg, ga_cfg);
  CHECK(result.best.fitness == 0.0);
}

TEST_CASE("same seed gives an identical result, different seed differs somewhere") {
  const auto space = micro_space();
  const auto uniform = OperandDistribution::uniform(2, 2);
  ObjectiveConfig obj_cfg;
  GAConfig ga_cfg;
  ga_cfg.seed = 99;
  ga_cfg.max_generations = 40;
  const auto a = optimize(space, uniform, obj_cfg, ga_cfg);
  const auto b = optimize(space, uniform, obj_cfg, ga_cfg);
  CHECK(a.best.theta == b.best.theta);
  CHECK(a.best.fitness == b.best.fitness);
  CHECK(a.history == b.history);
  CHECK(a.mean_history == b.mean_history);
  CHECK(a.evaluations_count == b.evaluations_count);
}

TEST_CASE("history is non-increasing and the budget adds up") {
  const auto plan = default_grouping(4, 4, {0, 1, 2, 3});
  const auto space = enumerate_search_space(4, 4, plan, all_columns(4, 4));
  auto px = Histogram::zeros(4);
  auto py = Histogram::zeros(4);
  px.add(0, 100);
  px.add(1, 30);
  py.add(12, 60);
  py.add(3, 10);
  const auto dist = OperandDistribution::product_joint(px, py, 1.0);
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    ObjectiveConfig obj_cfg;
    obj_cfg.lambda1 = 2.0;
    GAConfig ga_cfg;
    ga_cfg.seed = seed;
    ga_cfg.max_generations = 60;
    const auto result = optimize(space, dist, obj_cfg, ga_cfg);
    for (std::size_t g = 1; g < result.history.size(); ++g) {
      REQUIRE(result.history[g] <= result.history[g - 1]);
    }
    CHECK(result.evaluations_count ==
          static_cast<std::uint64_t>(ga_cfg.population_size) * result.generations_run);
    CHECK(result.best.fitness == result.history.back());
  }
}

TEST_CASE("empty search space is a loud error") {
  const auto plan = default_grouping(4, 4, {});
  const auto space = enumerate_search_space(4, 4, plan, all_columns(4, 4));
  REQUIRE(space.z() == 0);
  CHECK_THROWS_AS(optimize(space, OperandDistribution::uniform(4, 4), ObjectiveConfig{}, GAConfig{}),
                  std::invalid_argument);
}

TEST_CASE("init population honors warm starts and population size") {
  GAConfig cfg;
  cfg.population_size = 10;
  Rng rng(derive_seed(4, "test"));
  ThetaVector warm(24);
  warm.bits[3] = warm.bits[9] = 1;
  const auto pop = init_population(24, cfg, rng, {warm});
  REQUIRE(pop.size() == 10);
  CHECK(pop[0] == ThetaVector(24));  // all zeros
  CHECK(pop[1] == warm);
  for (const auto& t : pop) CHECK(t.size() == 24);

  Rng rng2(derive_seed(5, "test"));
  const auto pop2 = init_population(24, cfg, rng2, {warm});
  bool any_difference = false;
  for (std::size_t i = 2; i < pop.size(); ++i) any_difference |= !(pop[i] == pop2[i]);
  CHECK(any_difference);
}

TEST_CASE("tournament returns the unique minimum when k equals the population size") {
  std::vector<Individual> pop;
  for (int i = 0; i < 8; ++i) pop.push_back(Individual{ThetaVector(4), 10.0 + i});
  pop[5].fitness = 1.0;
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    CHECK(tournament_select(pop, static_cast<int>(pop.size()), rng) == 5);
  }
}

TEST_CASE("crossover and mutation edge cases") {
  Rng rng(6);
  ThetaVector a(16), b(16);
  for (int i = 0; i < 16; ++i) {
    a.bits[i] = 1;
    b.bits[i] = i % 2;
  }
  SUBCASE("identical parents produce identical children") {
    const auto [c1, c2] = uniform_crossover(a, a, 1.0, rng);
    CHECK(c1 == a);
    CHECK(c2 == a);
  }
  SUBCASE("zero crossover rate clones") {
    const auto [c1, c2] = uniform_crossover(a, b, 0.0, rng);
    CHECK(c1 == a);
    CHECK(c2 == b);
  }
  SUBCASE("crossover only swaps, never invents bits") {
    const auto [c1, c2] = uniform_crossover(a, b, 1.0, rng);
    for (int i = 0; i < 16; ++i) {
      CHECK(c1.bits[i] + c2.bits[i] == a.bits[i] + b.bits[i]);
    }
  }
  SUBCASE("zero mutation rate is the identity") {
    ThetaVector c = b;
    mutate(c, 0.0, rng);
    CHECK(c == b);
  }
  SUBCASE("mutation rate one flips everything") {
    ThetaVector c = b;
    mutate(c, 1.0, rng);
    for (int i = 0; i < 16; ++i) CHECK(c.bits[i] == (b.bits[i] ^ 1));
  }
}

TEST_CASE("config validation") {
  GAConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.elite_count = cfg.population_size;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = GAConfig{};
  cfg.crossover_rate = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = GAConfig{};
  cfg.tournament_size = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK(GAConfig{}.effective_mutation_rate(50) == doctest::Approx(0.02));
}

TEST_CASE("GA history CSV has one row per generation") {
  const auto space = micro_space();
  GAConfig ga_cfg;
  ga_cfg.seed = 3;
  ga_cfg.max_generations = 10;
  ga_cfg.stall_generations = 100;
  const auto result =
      optimize(space, OperandDistribution::uniform(2, 2), ObjectiveConfig{}, ga_cfg);
  const auto csv = ga_history_csv(result);
  const auto rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == result.generations_run + 1);  // header + generations
}
