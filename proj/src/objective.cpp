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
#include "apxmul/objective.hpp"

#include <algorithm>
#include <stdexcept>

namespace apxmul {

namespace {

// Compensated accumulation; inputs here are non-negative, so plain Kahan is
// enough to keep the 2^(n+m)-cell grid sum accurate.
struct KahanSum {
  double sum = 0;
  double c = 0;

  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

void check_dist_match(const SearchSpace& space, const OperandDistribution& dist) {
  if (dist.n() != space.n || dist.m() != space.m) {
    throw std::invalid_argument("distribution widths do not match search space");
  }
}

inline int bit_of(std::uint32_t v, int idx) { return (v >> idx) & 1u; }

inline int group_func_value(const BitGroup& g, TermOp op, std::uint32_t x, std::uint32_t y) {
  const int a = bit_of(x, g.members[0].col) & bit_of(y, g.members[0].row);
  const int b = bit_of(x, g.members[1].col) & bit_of(y, g.members[1].row);
  switch (op) {
    case TermOp::And: return a & b;
    case TermOp::Or: return a | b;
    case TermOp::Xor: return a ^ b;
  }
  return 0;
}

// theta-independent part of f: uncompressed rows plus 1-bit groups.
std::uint64_t base_value(const SearchSpace& space, std::uint32_t x, std::uint32_t y) {
  std::uint64_t f = uncompressed_sum(space.n, space.m, space.grouping.compressed_rows, x, y);
  for (const auto& g : space.grouping.groups) {
    if (g.is_pair()) continue;
    if (bit_of(x, g.members[0].col) & bit_of(y, g.members[0].row)) {
      f += std::uint64_t{1} << g.base_column;
    }
  }
  return f;
}

constexpr std::size_t kMaxExhaustiveCells = std::size_t{1} << 24;

}  // namespace

double squared_error(const SearchSpace& space, const ThetaVector& theta,
                     std::uint32_t x, std::uint32_t y) {
  const double d = static_cast<double>(exact_multiply(x, y)) -
                   static_cast<double>(evaluate(space, theta, x, y));
  return d * d;
}

double expected_error(const SearchSpace& space, const ThetaVector& theta,
                      const OperandDistribution& dist) {
  check_dist_match(space, dist);
  const std::uint32_t nx = std::uint32_t{1} << space.n;
  const std::uint32_t ny = std::uint32_t{1} << space.m;
  KahanSum acc;
  for (std::uint32_t x = 0; x < nx; ++x) {
    for (std::uint32_t y = 0; y < ny; ++y) {
      acc.add(squared_error(space, theta, x, y) * dist.probability(x, y));
    }
  }
  return acc.sum;
}

double penalty(const ThetaVector& theta, double lambda1) {
  if (lambda1 < 0) throw std::invalid_argument("lambda1 must be non-negative");
  return lambda1 * static_cast<double>(theta.popcount());
}

double objective(const SearchSpace& space, const ThetaVector& theta,
                 const OperandDistribution& dist, const ObjectiveConfig& cfg) {
  const double e = cfg.mode == ObjectiveConfig::Mode::Exhaustive
                       ? expected_error(space, theta, dist)
                       : sampled_expected_error(space, theta, dist, cfg.sample_count, cfg.seed);
  return e + penalty(theta, cfg.lambda1);
}

double sampled_expected_error(const SearchSpace& space, const ThetaVector& theta,
                              const OperandDistribution& dist,
                              std::uint64_t sample_count, std::uint64_t seed) {
  check_dist_match(space, dist);
  const auto pairs = draw_operand_pairs(dist, sample_count, seed);
  const double inv_s = 1.0 / static_cast<double>(sample_count);
  KahanSum acc;
  for (const auto& [x, y] : pairs) {
    acc.add(squared_error(space, theta, x, y) * inv_s);
  }
  return acc.sum;
}

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t size = weights.size();
  if (size == 0) throw std::invalid_argument("alias table needs at least one weight");
  double total = 0;
  for (double w : weights) {
    if (w < 0) throw std::invalid_argument("alias weights must be non-negative");
    total += w;
  }
  if (total <= 0) throw std::invalid_argument("alias weights sum to zero");

  prob_.assign(size, 0.0);
  alias_.assign(size, 0);
  std::vector<double> scaled(size);
  for (std::size_t i = 0; i < size; ++i) {
    scaled[i] = weights[i] * static_cast<double>(size) / total;
  }
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < size; ++i) {
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    large.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::uint32_t i : large) prob_[i] = 1.0;
  for (std::uint32_t i : small) prob_[i] = 1.0;  // numerical leftovers
}

std::size_t AliasTable::sample(Rng& rng) const {
  const std::size_t slot = static_cast<std::size_t>(rng.next_below(prob_.size()));
  return rng.next_double() < prob_[slot] ? slot : alias_[slot];
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> draw_operand_pairs(
    const OperandDistribution& dist, std::uint64_t sample_count, std::uint64_t seed) {
  if (sample_count == 0) throw std::invalid_argument("sample_count must be >= 1");
  Rng rng(derive_seed(seed, "objective.sample"));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(sample_count);
  switch (dist.kind()) {
    case OperandDistribution::Kind::Uniform: {
      for (std::uint64_t s = 0; s < sample_count; ++s) {
        const auto x = static_cast<std::uint32_t>(rng.next_below(dist.x_count()));
        const auto y = static_cast<std::uint32_t>(rng.next_below(dist.y_count()));
        pairs.emplace_back(x, y);
      }
      break;
    }
    case OperandDistribution::Kind::Product: {
      AliasTable tx(dist.product_px());
      AliasTable ty(dist.product_py());
      for (std::uint64_t s = 0; s < sample_count; ++s) {
        const auto x = static_cast<std::uint32_t>(tx.sample(rng));
        const auto y = static_cast<std::uint32_t>(ty.sample(rng));
        pairs.emplace_back(x, y);
      }
      break;
    }
    case OperandDistribution::Kind::Joint: {
      std::vector<double> w(dist.x_count() * dist.y_count());
      for (std::uint32_t x = 0; x < dist.x_count(); ++x) {
        for (std::uint32_t y = 0; y < dist.y_count(); ++y) {
          w[(static_cast<std::size_t>(x) << dist.m()) | y] = dist.probability(x, y);
        }
      }
      AliasTable t(w);
      for (std::uint64_t s = 0; s < sample_count; ++s) {
        const std::size_t idx = t.sample(rng);
        pairs.emplace_back(static_cast<std::uint32_t>(idx >> dist.m()),
                           static_cast<std::uint32_t>(idx & (dist.y_count() - 1)));
      }
      break;
    }
  }
  return pairs;
}

ObjectiveEvaluator::ObjectiveEvaluator(const SearchSpace& space, const OperandDistribution& dist,
                                       const ObjectiveConfig& cfg)
    : cfg_(cfg), z_(space.z()) {
  check_dist_match(space, dist);

  // Map terms onto distinct (pair group, op) bit functions.
  std::vector<int> group_slot(space.grouping.groups.size(), -1);
  int slot = 0;
  for (const auto& g : space.grouping.groups) {
    if (g.is_pair()) group_slot[g.id] = slot++;
  }
  func_count_ = slot * 3;
  term_func_.resize(z_);
  term_weight_.resize(z_);
  for (int i = 0; i < z_; ++i) {
    const auto& t = space.terms[i];
    term_func_[i] = group_slot[t.group_id] * 3 + static_cast<int>(t.op);
    term_weight_[i] = std::int64_t{1} << t.column;
  }

  // Enumerate cells: the full grid, or the pinned sample list.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> cells;
  if (cfg_.mode == ObjectiveConfig::Mode::Exhaustive) {
    const std::size_t total = (std::size_t{1} << space.n) * (std::size_t{1} << space.m);
    if (total > kMaxExhaustiveCells) {
      throw std::invalid_argument("operand grid too large for exhaustive mode; use sampling");
    }
    cells.reserve(total);
    for (std::uint32_t x = 0; x < (std::uint32_t{1} << space.n); ++x) {
      for (std::uint32_t y = 0; y < (std::uint32_t{1} << space.m); ++y) {
        cells.emplace_back(x, y);
      }
    }
  } else {
    cells = draw_operand_pairs(dist, cfg_.sample_count, cfg_.seed);
  }
  cells_ = cells.size();

  residual_.resize(cells_);
  cell_weight_.resize(cells_);
  const double inv_s = 1.0 / static_cast<double>(cells_);
  for (std::size_t i = 0; i < cells_; ++i) {
    const auto [x, y] = cells[i];
    residual_[i] = static_cast<std::int64_t>(exact_multiply(x, y)) -
                   static_cast<std::int64_t>(base_value(space, x, y));
    cell_weight_[i] = cfg_.mode == ObjectiveConfig::Mode::Exhaustive
                          ? dist.probability(x, y)
                          : inv_s;
  }

  planes_.assign(static_cast<std::size_t>(func_count_) * cells_, 0);
  for (const auto& g : space.grouping.groups) {
    if (!g.is_pair()) continue;
    for (TermOp op : {TermOp::And, TermOp::Or, TermOp::Xor}) {
      const int func = group_slot[g.id] * 3 + static_cast<int>(op);
      std::uint8_t* plane = planes_.data() + static_cast<std::size_t>(func) * cells_;
      for (std::size_t i = 0; i < cells_; ++i) {
        const auto [x, y] = cells[i];
        plane[i] = static_cast<std::uint8_t>(group_func_value(g, op, x, y));
      }
    }
  }

  fbuf_.resize(cells_);
  func_weight_.resize(func_count_);
}

double ObjectiveEvaluator::expected_error(const ThetaVector& theta) {
  if (theta.size() != static_cast<std::size_t>(z_)) {
    throw std::invalid_argument("theta length does not match search space");
  }
  std::fill(func_weight_.begin(), func_weight_.end(), 0);
  for (int i = 0; i < z_; ++i) {
    if (theta.bits[i]) func_weight_[term_func_[i]] += term_weight_[i];
  }
  std::fill(fbuf_.begin(), fbuf_.end(), 0);
  for (int k = 0; k < func_count_; ++k) {
    const std::int64_t w = func_weight_[k];
    if (w == 0) continue;
    const std::uint8_t* plane = planes_.data() + static_cast<std::size_t>(k) * cells_;
    std::int64_t* f = fbuf_.data();
    for (std::size_t i = 0; i < cells_; ++i) f[i] += w * plane[i];
  }
  KahanSum acc;
  for (std::size_t i = 0; i < cells_; ++i) {
    const double e = static_cast<double>(residual_[i] - fbuf_[i]);
    acc.add(cell_weight_[i] * (e * e));  // same products as the reference path
  }
  return acc.sum;
}

double ObjectiveEvaluator::objective(const ThetaVector& theta) {
  return expected_error(theta) + penalty(theta, cfg_.lambda1);
}

}  // namespace apxmul
