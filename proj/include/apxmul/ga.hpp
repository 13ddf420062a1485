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
#ifndef APXMUL_GA_HPP_
#define APXMUL_GA_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "apxmul/objective.hpp"
#include "apxmul/ppmatrix.hpp"
#include "apxmul/rng.hpp"

namespace apxmul {

struct GAConfig {
  int population_size = 100;
  int max_generations = 300;
  double crossover_rate = 0.9;
  double mutation_rate = -1.0;  // < 0 means the 1/Z default
  int tournament_size = 3;
  int elite_count = 2;
  std::uint64_t seed = 0;
  int stall_generations = 50;

  void validate() const;  // throws std::invalid_argument
  double effective_mutation_rate(int z) const;
};

struct Individual {
  ThetaVector theta;
  double fitness = 0;
};

struct GAResult {
  Individual best;
  std::vector<double> history;       // per-generation best fitness, non-increasing
  std::vector<double> mean_history;  // per-generation population mean
  std::vector<int> best_popcount;    // popcount of the best theta per generation
  int generations_run = 0;
  std::uint64_t evaluations_count = 0;
};

using FitnessFn = std::function<double(const ThetaVector&)>;

// Minimizes Eq.-style fitness over binary vectors of length z. Warm starts:
// individual 0 is all-zeros and, when supplied, individual 1 is warm_start.
// Deterministic for a fixed seed; history is non-increasing by elitism.
GAResult run_ga(const FitnessFn& fitness, int z, const GAConfig& cfg,
                const std::vector<ThetaVector>& warm_starts = {});

// Full pipeline: builds an ObjectiveEvaluator over (space, dist, obj_cfg) and
// runs the GA with the all-zeros and half-adder warm starts. Throws
// std::invalid_argument when space.z() == 0.
GAResult optimize(const SearchSpace& space, const OperandDistribution& dist,
                  const ObjectiveConfig& obj_cfg, const GAConfig& ga_cfg);

// Building blocks, exposed for direct testing.
std::vector<ThetaVector> init_population(int z, const GAConfig& cfg, Rng& rng,
                                         const std::vector<ThetaVector>& warm_starts);
// Lowest fitness of k uniform draws; ties go to the lower population index.
std::size_t tournament_select(const std::vector<Individual>& population, int k, Rng& rng);
// With probability crossover_rate swaps each bit pair with probability 0.5,
// otherwise the children are clones of the parents.
std::pair<ThetaVector, ThetaVector> uniform_crossover(const ThetaVector& a, const ThetaVector& b,
                                                      double crossover_rate, Rng& rng);
// Flips each bit independently with probability mutation_rate.
void mutate(ThetaVector& theta, double mutation_rate, Rng& rng);

nlohmann::json ga_config_to_json(const GAConfig& cfg);
GAConfig ga_config_from_json(const nlohmann::json& j);
// Per-generation best/mean fitness and best-theta popcount, for plotting.
std::string ga_history_csv(const GAResult& result);

}  // namespace apxmul

#endif  // APXMUL_GA_HPP_
