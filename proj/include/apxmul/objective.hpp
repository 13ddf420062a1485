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
#ifndef APXMUL_OBJECTIVE_HPP_
#define APXMUL_OBJECTIVE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "apxmul/distribution.hpp"
#include "apxmul/ppmatrix.hpp"
#include "apxmul/rng.hpp"

namespace apxmul {

struct ObjectiveConfig {
  enum class Mode { Exhaustive, Sampled };

  double lambda1 = 1.0;
  Mode mode = Mode::Exhaustive;
  std::uint64_t sample_count = std::uint64_t{1} << 17;
  std::uint64_t seed = 0;
};

// (xy - f(x, y | theta))^2
double squared_error(const SearchSpace& space, const ThetaVector& theta,
                     std::uint32_t x, std::uint32_t y);

// Exhaustive expectation over every operand pair, x-major order, Kahan
// compensated. Throws std::invalid_argument on width mismatch.
double expected_error(const SearchSpace& space, const ThetaVector& theta,
                      const OperandDistribution& dist);

double penalty(const ThetaVector& theta, double lambda1);

// expected_error (or its sampled estimate) plus the term-count penalty.
double objective(const SearchSpace& space, const ThetaVector& theta,
                 const OperandDistribution& dist, const ObjectiveConfig& cfg);

// Monte-Carlo estimate from sample_count i.i.d. pairs. Deterministic given
// the seed; throws std::invalid_argument when sample_count == 0.
double sampled_expected_error(const SearchSpace& space, const ThetaVector& theta,
                              const OperandDistribution& dist,
                              std::uint64_t sample_count, std::uint64_t seed);

// O(1) discrete sampling (Vose alias method) over a fixed weight vector.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights);
  std::size_t sample(Rng& rng) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

// Draws sample_count operand pairs from dist; the one sampling routine shared
// by sampled_expected_error and the evaluator below, so both see the same
// sequence for a given seed.
std::vector<std::pair<std::uint32_t, std::uint32_t>> draw_operand_pairs(
    const OperandDistribution& dist, std::uint64_t sample_count, std::uint64_t seed);

// Precomputed-table evaluator for repeated objective calls on one
// (space, dist, cfg) triple; the GA hot path. Results match the free
// functions: f is accumulated in exact integer arithmetic per cell, so a
// reconstruction with zero error scores exactly 0.
//
// Candidate terms sharing a (group, op) pair compute the same bit function;
// only 3A distinct functions exist, tabulated once as byte planes. A theta
// evaluation collapses its selected terms into per-function weights and
// streams the planes.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const SearchSpace& space, const OperandDistribution& dist,
                     const ObjectiveConfig& cfg);

  double expected_error(const ThetaVector& theta);
  double objective(const ThetaVector& theta);

  const ObjectiveConfig& config() const { return cfg_; }
  std::size_t cell_count() const { return cells_; }

 private:
  void build_cells(const SearchSpace& space, const OperandDistribution& dist);

  ObjectiveConfig cfg_;
  int z_ = 0;
  std::size_t cells_ = 0;
  int func_count_ = 0;
  std::vector<int> term_func_;            // term index -> plane index
  std::vector<std::int64_t> term_weight_; // term index -> 2^column
  std::vector<std::uint8_t> planes_;      // func_count_ x cells_
  std::vector<std::int64_t> residual_;    // xy - (uncompressed + singles)
  std::vector<double> cell_weight_;       // p(x,y), or 1/S for samples
  std::vector<std::int64_t> fbuf_;
  std::vector<std::int64_t> func_weight_;
};

}  // namespace apxmul

#endif  // APXMUL_OBJECTIVE_HPP_
