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
#ifndef APXMUL_DISTRIBUTION_HPP_
#define APXMUL_DISTRIBUTION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace apxmul {

// Operand value counts for one 2^bit_width alphabet.
struct Histogram {
  int bit_width = 0;
  std::vector<std::uint64_t> counts;

  static Histogram zeros(int bit_width);
  std::uint64_t total() const;
  void add(std::uint32_t value, std::uint64_t count = 1);
  void merge(const Histogram& other);
};

// Argmax of the counts; the lowest value wins ties.
std::uint32_t histogram_mode(const Histogram& h);

nlohmann::json histogram_to_json(const Histogram& h);
Histogram histogram_from_json(const nlohmann::json& j);
std::string histogram_to_csv(const Histogram& h);

// Joint probability p(x, y) over operand pairs of an n x m multiplier.
// Product keeps smoothed marginals of two histograms; Joint keeps a full
// x-major probability matrix. Immutable once built.
class OperandDistribution {
 public:
  enum class Kind { Uniform, Product, Joint };

  static OperandDistribution uniform(int n, int m);
  // Laplace smoothing: every count gets +alpha before normalization. Throws
  // std::invalid_argument when a histogram is empty and alpha == 0.
  static OperandDistribution product_joint(const Histogram& px, const Histogram& py,
                                           double alpha);
  // Non-negative weights (x-major, size 2^n * 2^m), normalized internally.
  static OperandDistribution joint(int n, int m, std::vector<double> weights);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int m() const { return m_; }
  std::size_t x_count() const { return std::size_t{1} << n_; }
  std::size_t y_count() const { return std::size_t{1} << m_; }

  double probability(std::uint32_t x, std::uint32_t y) const;
  // Marginals; for Product these are exactly the smoothed input marginals.
  double marginal_x(std::uint32_t x) const;
  double marginal_y(std::uint32_t y) const;

  const std::vector<double>& product_px() const;
  const std::vector<double>& product_py() const;

 private:
  OperandDistribution() = default;

  Kind kind_ = Kind::Uniform;
  int n_ = 0;
  int m_ = 0;
  std::vector<double> px_;     // Product
  std::vector<double> py_;     // Product
  std::vector<double> joint_;  // Joint, x-major

  friend nlohmann::json distribution_to_json(const OperandDistribution& d);
  friend OperandDistribution distribution_from_json(const nlohmann::json& j);
};

nlohmann::json distribution_to_json(const OperandDistribution& d);
OperandDistribution distribution_from_json(const nlohmann::json& j);

}  // namespace apxmul

#endif  // APXMUL_DISTRIBUTION_HPP_
