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
#include "apxmul/ga.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace apxmul {

namespace {

struct ThetaHash {
  std::size_t operator()(const std::vector<std::uint8_t>& bits) const {
    std::size_t h = 1469598103934665603ull;
    for (auto b : bits) {
      h ^= b;
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Fitness values memoized by exact theta; late generations revisit the same
// vectors constantly and the exhaustive expectation is the hot path.
class CachedFitness {
 public:
  explicit CachedFitness(const FitnessFn& fn) : fn_(fn) {}

  double operator()(const ThetaVector& theta) {
    auto it = cache_.find(theta.bits);
    if (it != cache_.end()) return it->second;
    const double v = fn_(theta);
    cache_.emplace(theta.bits, v);
    return v;
  }

 private:
  const FitnessFn& fn_;
  std::unordered_map<std::vector<std::uint8_t>, double, ThetaHash> cache_;
};

}  // namespace

void GAConfig::validate() const {
  if (population_size < 2) throw std::invalid_argument("population_size must be >= 2");
  if (max_generations < 1) throw std::invalid_argument("max_generations must be >= 1");
  if (crossover_rate < 0 || crossover_rate > 1) {
    throw std::invalid_argument("crossover_rate must be in [0, 1]");
  }
  if (mutation_rate > 1) throw std::invalid_argument("mutation_rate must be <= 1");
  if (tournament_size < 2 || tournament_size > population_size) {
    throw std::invalid_argument("tournament_size must be in [2, population_size]");
  }
  if (elite_count < 1 || elite_count >= population_size) {
    throw std::invalid_argument("elite_count must be in [1, population_size)");
  }
  if (stall_generations < 1) throw std::invalid_argument("stall_generations must be >= 1");
}

double GAConfig::effective_mutation_rate(int z) const {
  if (mutation_rate >= 0) return mutation_rate;
  return 1.0 / static_cast<double>(z);
}

std::vector<ThetaVector> init_population(int z, const GAConfig& cfg, Rng& rng,
                                         const std::vector<ThetaVector>& warm_starts) {
  std::vector<ThetaVector> pop;
  pop.reserve(cfg.population_size);
  pop.emplace_back(static_cast<std::size_t>(z));  // all-zeros warm start
  for (const auto& w : warm_starts) {
    if (static_cast<int>(pop.size()) >= cfg.population_size) break;
    if (w.size() != static_cast<std::size_t>(z)) {
      throw std::invalid_argument("warm start length mismatch");
    }
    pop.push_back(w);
  }
  while (static_cast<int>(pop.size()) < cfg.population_size) {
    ThetaVector t(static_cast<std::size_t>(z));
    for (int i = 0; i < z; ++i) t.bits[i] = rng.next_bernoulli(0.5) ? 1 : 0;
    pop.push_back(std::move(t));
  }
  return pop;
}

std::size_t tournament_select(const std::vector<Individual>& population, int k, Rng& rng) {
  const std::size_t n = population.size();
  if (k < 2 || static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("tournament size must be in [2, population_size]");
  }
  // k distinct contestants via partial Fisher-Yates; ties go to the lower index.
  thread_local std::vector<std::uint32_t> idx;
  idx.resize(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  std::size_t best = n;
  for (int i = 0; i < k; ++i) {
    const std::size_t j = i + rng.next_below(n - i);
    std::swap(idx[i], idx[j]);
    const std::size_t cand = idx[i];
    if (best == n || population[cand].fitness < population[best].fitness ||
        (population[cand].fitness == population[best].fitness && cand < best)) {
      best = cand;
    }
  }
  return best;
}

std::pair<ThetaVector, ThetaVector> uniform_crossover(const ThetaVector& a, const ThetaVector& b,
                                                      double crossover_rate, Rng& rng) {
  ThetaVector c1 = a;
  ThetaVector c2 = b;
  if (rng.next_bernoulli(crossover_rate)) {
    for (std::size_t i = 0; i < c1.size(); ++i) {
      if (rng.next_bernoulli(0.5)) std::swap(c1.bits[i], c2.bits[i]);
    }
  }
  return {std::move(c1), std::move(c2)};
}

void mutate(ThetaVector& theta, double mutation_rate, Rng& rng) {
  for (auto& b : theta.bits) {
    if (rng.next_bernoulli(mutation_rate)) b ^= 1;
  }
}

GAResult run_ga(const FitnessFn& fitness, int z, const GAConfig& cfg,
                const std::vector<ThetaVector>& warm_starts) {
  cfg.validate();
  if (z < 1) throw std::invalid_argument("search space is empty (Z = 0)");

  Rng rng(derive_seed(cfg.seed, "ga"));
  CachedFitness cached(fitness);
  const double mutation_rate = cfg.effective_mutation_rate(z);

  GAResult result;
  std::vector<Individual> pop;
  pop.reserve(cfg.population_size);
  for (auto& theta : init_population(z, cfg, rng, warm_starts)) {
    Individual ind;
    ind.fitness = cached(theta);
    ind.theta = std::move(theta);
    pop.push_back(std::move(ind));
  }
  result.evaluations_count += static_cast<std::uint64_t>(cfg.population_size);

  auto order_by_fitness = [&pop]() {
    std::vector<std::size_t> idx(pop.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&pop](std::size_t a, std::size_t b) {
      return pop[a].fitness < pop[b].fitness;
    });
    return idx;
  };

  auto record_generation = [&]() {
    const auto idx = order_by_fitness();
    const Individual& best = pop[idx[0]];
    double mean = 0;
    for (const auto& ind : pop) mean += ind.fitness;
    mean /= static_cast<double>(pop.size());
    result.history.push_back(best.fitness);
    result.mean_history.push_back(mean);
    result.best_popcount.push_back(best.theta.popcount());
    return idx;
  };

  auto idx = record_generation();
  result.best = pop[idx[0]];
  int stall = 0;

  for (int gen = 1; gen <= cfg.max_generations; ++gen) {
    std::vector<Individual> next;
    next.reserve(cfg.population_size);
    for (int e = 0; e < cfg.elite_count; ++e) next.push_back(pop[idx[e]]);
    while (static_cast<int>(next.size()) < cfg.population_size) {
      const Individual& p1 = pop[tournament_select(pop, cfg.tournament_size, rng)];
      const Individual& p2 = pop[tournament_select(pop, cfg.tournament_size, rng)];
      auto [c1, c2] = uniform_crossover(p1.theta, p2.theta, cfg.crossover_rate, rng);
      mutate(c1, mutation_rate, rng);
      mutate(c2, mutation_rate, rng);
      next.push_back(Individual{std::move(c1), 0});
      if (static_cast<int>(next.size()) < cfg.population_size) {
        next.push_back(Individual{std::move(c2), 0});
      }
    }
    for (auto& ind : next) ind.fitness = cached(ind.theta);
    result.evaluations_count += static_cast<std::uint64_t>(cfg.population_size);
    pop = std::move(next);

    const double prev_best = result.history.back();
    idx = record_generation();
    if (pop[idx[0]].fitness < result.best.fitness) result.best = pop[idx[0]];
    stall = result.history.back() < prev_best ? 0 : stall + 1;
    if (stall >= cfg.stall_generations) break;
  }

  result.generations_run = static_cast<int>(result.history.size());
  return result;
}

GAResult optimize(const SearchSpace& space, const OperandDistribution& dist,
                  const ObjectiveConfig& obj_cfg, const GAConfig& ga_cfg) {
  if (space.z() == 0) {
    throw std::invalid_argument("search space has no candidate terms (Z = 0)");
  }
  ObjectiveEvaluator evaluator(space, dist, obj_cfg);
  std::vector<ThetaVector> warm_starts;
  if (auto ha = half_adder_theta(space)) warm_starts.push_back(std::move(*ha));
  FitnessFn fitness = [&evaluator](const ThetaVector& theta) {
    return evaluator.objective(theta);
  };
  return run_ga(fitness, space.z(), ga_cfg, warm_starts);
}

nlohmann::json ga_config_to_json(const GAConfig& cfg) {
  return {{"population_size", cfg.population_size},
          {"max_generations", cfg.max_generations},
          {"crossover_rate", cfg.crossover_rate},
          {"mutation_rate", cfg.mutation_rate},
          {"tournament_size", cfg.tournament_size},
          {"elite_count", cfg.elite_count},
          {"seed", cfg.seed},
          {"stall_generations", cfg.stall_generations}};
}

GAConfig ga_config_from_json(const nlohmann::json& j) {
  GAConfig cfg;
  if (j.contains("population_size")) cfg.population_size = j.at("population_size").get<int>();
  if (j.contains("max_generations")) cfg.max_generations = j.at("max_generations").get<int>();
  if (j.contains("crossover_rate")) cfg.crossover_rate = j.at("crossover_rate").get<double>();
  if (j.contains("mutation_rate")) cfg.mutation_rate = j.at("mutation_rate").get<double>();
  if (j.contains("tournament_size")) cfg.tournament_size = j.at("tournament_size").get<int>();
  if (j.contains("elite_count")) cfg.elite_count = j.at("elite_count").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("stall_generations")) cfg.stall_generations = j.at("stall_generations").get<int>();
  cfg.validate();
  return cfg;
}

std::string ga_history_csv(const GAResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "generation,best_fitness,mean_fitness,best_popcount\n";
  for (std::size_t g = 0; g < result.history.size(); ++g) {
    out << g << "," << result.history[g] << "," << result.mean_history[g] << ","
        << result.best_popcount[g] << "\n";
  }
  return out.str();
}

}  // namespace apxmul
