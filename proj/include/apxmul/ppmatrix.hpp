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
#ifndef APXMUL_PPMATRIX_HPP_
#define APXMUL_PPMATRIX_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace apxmul {

// One bit of the partial-product matrix of an n x m unsigned multiplier:
// bit `col` of x AND bit `row` of y, arithmetic weight 2^(row+col).
struct PPBit {
  int row = 0;  // bit index into y
  int col = 0;  // bit index into x

  int matrix_column() const { return row + col; }
  friend bool operator==(const PPBit&, const PPBit&) = default;
};

// A compression unit of one or two partial-product bits. base_column is the
// matrix column the group sits on; under the default grouping both members
// share it, for custom groupings it is the minimum member column.
struct BitGroup {
  int id = 0;
  std::vector<PPBit> members;
  int base_column = 0;

  bool is_pair() const { return members.size() == 2; }
};

// Partition of the partial-product bits in the compressed rows.
struct GroupingPlan {
  int n = 0;
  int m = 0;
  std::vector<int> compressed_rows;  // sorted, unique
  std::vector<BitGroup> groups;

  int pair_group_count() const;
  // Throws std::invalid_argument if the groups do not partition exactly the
  // bits of the compressed rows or any member is out of range.
  void validate() const;
};

enum class TermOp { And, Or, Xor };

const char* term_op_name(TermOp op);
TermOp term_op_from_name(const std::string& name);

// A candidate compressed term: `op` over the two bits of group `group_id`,
// placed at `column` (weight 2^column).
struct CompressedTermSpec {
  TermOp op = TermOp::And;
  int group_id = 0;
  int column = 0;

  friend bool operator==(const CompressedTermSpec&, const CompressedTermSpec&) = default;
};

// The enumerated candidate-term set for one multiplier configuration.
// Term order is (group_id, op with And<Or<Xor, column), so indices into a
// selection vector stay stable across runs.
struct SearchSpace {
  int n = 0;
  int m = 0;
  GroupingPlan grouping;
  std::vector<int> allowed_columns;  // sorted, unique, within [0, n+m)
  std::vector<CompressedTermSpec> terms;

  int z() const { return static_cast<int>(terms.size()); }
  int result_width() const { return n + m; }
  std::uint64_t term_weight(int term_index) const;
};

// Binary selection over the candidate terms; one value per SearchSpace term.
struct ThetaVector {
  std::vector<std::uint8_t> bits;

  ThetaVector() = default;
  explicit ThetaVector(std::size_t z) : bits(z, 0) {}

  std::size_t size() const { return bits.size(); }
  int popcount() const;
  friend bool operator==(const ThetaVector&, const ThetaVector&) = default;
};

// Pairs same-column bits across consecutive compressed rows, scanning rows
// top-down; leftover bits become 1-bit groups. Groups are ordered by
// (base_column, first member row).
GroupingPlan default_grouping(int n, int m, const std::vector<int>& compressed_rows);

// Enumerates one term per (2-bit group, op, allowed column) triple, giving
// Z = 3 * A * B. Throws std::invalid_argument for columns outside [0, n+m)
// or a grouping that does not fit (n, m).
SearchSpace enumerate_search_space(int n, int m, GroupingPlan grouping,
                                   std::vector<int> allowed_columns);

// Value of one candidate term for the operand pair (x, y).
int term_value(const SearchSpace& space, int term_index, std::uint32_t x, std::uint32_t y);

// Sum of the partial-product rows that are not compressed.
std::uint64_t uncompressed_sum(int n, int m, const std::vector<int>& compressed_rows,
                               std::uint32_t x, std::uint32_t y);

// f(x, y | theta): uncompressed rows, plus every 1-bit group at its base
// column, plus the selected terms. No output clamping happens here.
std::uint64_t evaluate(const SearchSpace& space, const ThetaVector& theta,
                       std::uint32_t x, std::uint32_t y);

inline std::uint64_t exact_multiply(std::uint32_t x, std::uint32_t y) {
  return static_cast<std::uint64_t>(x) * static_cast<std::uint64_t>(y);
}

// The selection that adds XOR@c and AND@(c+1) for every 2-bit group at base
// column c, which reconstructs the exact product (b1 + b2 = xor + 2*and).
// Empty when some required column is missing from allowed_columns or a pair
// group spans two matrix columns.
std::optional<ThetaVector> half_adder_theta(const SearchSpace& space);

std::vector<int> all_columns(int n, int m);

nlohmann::json grouping_to_json(const GroupingPlan& plan);
GroupingPlan grouping_from_json(const nlohmann::json& j);
nlohmann::json space_to_json(const SearchSpace& space);
SearchSpace space_from_json(const nlohmann::json& j);
nlohmann::json theta_to_json(const ThetaVector& theta);
ThetaVector theta_from_json(const nlohmann::json& j);

}  // namespace apxmul

#endif  // APXMUL_PPMATRIX_HPP_
