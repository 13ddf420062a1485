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

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "apxmul/ppmatrix.hpp"

using namespace apxmul;

namespace {

// Independent pairing oracle: greedily pair same-column bits of the
// compressed rows, top-down; return canonical member sets.
std::set<std::vector<std::pair<int, int>>> oracle_pairing(int n, const std::vector<int>& rows) {
  std::map<int, std::vector<std::pair<int, int>>> by_col;
  std::vector<int> sorted_rows = rows;
  std::sort(sorted_rows.begin(), sorted_rows.end());
  for (int r : sorted_rows) {
    for (int c = 0; c < n; ++c) by_col[r + c].push_back({r, c});
  }
  std::set<std::vector<std::pair<int, int>>> groups;
  for (auto& [col, bits] : by_col) {
    std::size_t i = 0;
    for (; i + 1 < bits.size(); i += 2) groups.insert({bits[i], bits[i + 1]});
    if (i < bits.size()) groups.insert({bits[i]});
  }
  return groups;
}

std::set<std::vector<std::pair<int, int>>> canonical_members(const GroupingPlan& plan) {
  std::set<std::vector<std::pair<int, int>>> groups;
  for (const auto& g : plan.groups) {
    std::vector<std::pair<int, int>> members;
    for (const auto& b : g.members) members.push_back({b.row, b.col});
    std::sort(members.begin(), members.end());
    groups.insert(members);
  }
  return groups;
}

// 4x4 multiplier, all rows compressed, with every bit in a 2-bit group
// (pairs along rows), so the all-zero theta evaluates to 0 everywhere.
SearchSpace space_without_singles_4x4() {
  GroupingPlan plan;
  plan.n = 4;
  plan.m = 4;
  plan.compressed_rows = {0, 1, 2, 3};
  int id = 0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; c += 2) {
      BitGroup g;
      g.id = id++;
      g.members = {PPBit{r, c}, PPBit{r, c + 1}};
      g.base_column = r + c;
      plan.groups.push_back(g);
    }
  }
  return enumerate_search_space(4, 4, plan, all_columns(4, 4));
}

SearchSpace default_space(int n, int m, const std::vector<int>& rows) {
  return enumerate_search_space(n, m, default_grouping(n, m, rows), all_columns(n, m));
}

}  // namespace

TEST_CASE("default grouping splits a fully compressed 4x4 matrix into 10 groups") {
  const auto plan = default_grouping(4, 4, {0, 1, 2, 3});
  CHECK(plan.groups.size() == 10);
  CHECK(plan.pair_group_count() == 6);
  plan.validate();
  // members share their matrix column and base_column matches it
  for (const auto& g : plan.groups) {
    for (const auto& b : g.members) CHECK(b.matrix_column() == g.base_column);
  }
}

TEST_CASE("default grouping with no compressed rows is empty") {
  const auto plan = default_grouping(4, 4, {});
  CHECK(plan.groups.empty());
}

TEST_CASE("default grouping matches the independent pairing oracle") {
  for (const auto& rows : {std::vector<int>{0, 1, 2, 3}, std::vector<int>{0, 2, 5},
                           std::vector<int>{7}, std::vector<int>{1, 3}}) {
    const auto plan = default_grouping(8, 8, rows);
    plan.validate();
    CHECK(canonical_members(plan) == oracle_pairing(8, rows));
  }
}

TEST_CASE("search space size is 3 * A * B") {
  SUBCASE("two pair groups, four columns") {
    GroupingPlan plan;
    plan.n = 2;
    plan.m = 2;
    plan.compressed_rows = {0, 1};
    plan.groups.push_back(BitGroup{0, {PPBit{0, 1}, PPBit{1, 0}}, 1});
    plan.groups.push_back(BitGroup{1, {PPBit{0, 0}, PPBit{1, 1}}, 0});
    const auto space = enumerate_search_space(2, 2, plan, {0, 1, 2, 3});
    CHECK(space.z() == 24);
  }
  SUBCASE("no pair groups") {
    const auto space = default_space(4, 4, {});
    CHECK(space.z() == 0);
  }
  SUBCASE("8x8 preset, all 16 columns") {
    const auto plan = default_grouping(8, 8, {0, 1, 2, 3});
    const auto space = enumerate_search_space(8, 8, plan, all_columns(8, 8));
    CHECK(space.z() == 3 * plan.pair_group_count() * 16);
    CHECK(plan.pair_group_count() == 14);
  }
}

TEST_CASE("search space ordering is deterministic and terms are unique") {
  const auto space = default_space(8, 8, {0, 1, 2, 3});
  std::set<std::tuple<int, int, int>> seen;
  for (const auto& t : space.terms) {
    CHECK(seen.insert({t.group_id, static_cast<int>(t.op), t.column}).second);
  }
  auto sorted = space.terms;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::tuple{a.group_id, static_cast<int>(a.op), a.column} <
           std::tuple{b.group_id, static_cast<int>(b.op), b.column};
  });
  CHECK(sorted == space.terms);
}

TEST_CASE("enumerate rejects out-of-range columns") {
  auto plan = default_grouping(4, 4, {0, 1});
  CHECK_THROWS_AS(enumerate_search_space(4, 4, plan, {8}), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_search_space(4, 4, plan, {-1}), std::invalid_argument);
}

TEST_CASE("term value applies the group op to the two member bits") {
  GroupingPlan plan;
  plan.n = 2;
  plan.m = 2;
  plan.compressed_rows = {0, 1};
  plan.groups.push_back(BitGroup{0, {PPBit{0, 1}, PPBit{1, 0}}, 1});
  plan.groups.push_back(BitGroup{1, {PPBit{0, 0}, PPBit{1, 1}}, 0});
  const auto space = enumerate_search_space(2, 2, plan, {0});
  // x=2, y=1: x1&y0 = 1, x0&y1 = 0
  int and_v = -1, or_v = -1, xor_v = -1;
  for (int i = 0; i < space.z(); ++i) {
    if (space.terms[i].group_id != 0) continue;
    const int v = term_value(space, i, 2, 1);
    if (space.terms[i].op == TermOp::And) and_v = v;
    if (space.terms[i].op == TermOp::Or) or_v = v;
    if (space.terms[i].op == TermOp::Xor) xor_v = v;
  }
  CHECK(and_v == 0);
  CHECK(or_v == 1);
  CHECK(xor_v == 1);

  for (int i = 0; i < space.z(); ++i) {
    CHECK(term_value(space, i, 0, 3) == 0);  // x = 0 kills every member bit
  }
  CHECK_THROWS_AS(term_value(space, space.z(), 1, 1), std::out_of_range);
}

TEST_CASE("term value matches a naive bit-level reimplementation on all 4x4 pairs") {
  const auto space = default_space(4, 4, {0, 1, 2, 3});
  for (std::uint32_t x = 0; x < 16; ++x) {
    for (std::uint32_t y = 0; y < 16; ++y) {
      for (int i = 0; i < space.z(); ++i) {
        const auto& t = space.terms[i];
        const auto& g = space.grouping.groups[t.group_id];
        const int b1 = ((x >> g.members[0].col) & 1) & ((y >> g.members[0].row) & 1);
        const int b2 = ((x >> g.members[1].col) & 1) & ((y >> g.members[1].row) & 1);
        int expect = 0;
        if (t.op == TermOp::And) expect = b1 & b2;
        if (t.op == TermOp::Or) expect = b1 | b2;
        if (t.op == TermOp::Xor) expect = b1 ^ b2;
        REQUIRE(term_value(space, i, x, y) == expect);
      }
    }
  }
}

TEST_CASE("uncompressed sum") {
  SUBCASE("nothing compressed gives the exact product") {
    for (std::uint32_t x = 0; x < 16; ++x) {
      for (std::uint32_t y = 0; y < 16; ++y) {
        CHECK(uncompressed_sum(4, 4, {}, x, y) == exact_multiply(x, y));
      }
    }
  }
  SUBCASE("everything compressed gives zero") {
    CHECK(uncompressed_sum(4, 4, {0, 1, 2, 3}, 15, 15) == 0);
  }
  SUBCASE("8x8 with rows 0-3 compressed at x = y = 255") {
    CHECK(uncompressed_sum(8, 8, {0, 1, 2, 3}, 255, 255) == 61200);
  }
}

TEST_CASE("evaluate with the all-zero theta and no single-bit groups is zero") {
  const auto space = space_without_singles_4x4();
  const ThetaVector theta(space.z());
  for (std::uint32_t x = 0; x < 16; ++x) {
    for (std::uint32_t y = 0; y < 16; ++y) {
      CHECK(evaluate(space, theta, x, y) == 0);
    }
  }
}

TEST_CASE("half-adder theta reconstructs the exact product on the 8x8 preset") {
  const auto space = default_space(8, 8, {0, 1, 2, 3});
  const auto theta = half_adder_theta(space);
  REQUIRE(theta.has_value());
  CHECK(theta->popcount() == 2 * space.grouping.pair_group_count());
  for (std::uint32_t x = 0; x < 256; ++x) {
    for (std::uint32_t y = 0; y < 256; ++y) {
      REQUIRE(evaluate(space, *theta, x, y) == exact_multiply(x, y));
    }
  }
}

TEST_CASE("half-adder theta is unavailable when a required column is missing") {
  const auto plan = default_grouping(4, 4, {0, 1, 2, 3});
  const auto space = enumerate_search_space(4, 4, plan, {0, 1, 2});
  CHECK(!half_adder_theta(space).has_value());
}

TEST_CASE("evaluate is zero when either operand is zero") {
  const auto space = default_space(4, 4, {0, 1});
  ThetaVector theta(space.z());
  for (std::size_t i = 0; i < theta.size(); i += 3) theta.bits[i] = 1;
  for (std::uint32_t v = 0; v < 16; ++v) {
    CHECK(evaluate(space, theta, 0, v) == 0);
    CHECK(evaluate(space, theta, v, 0) == 0);
  }
}

TEST_CASE("unselected terms never change evaluate") {
  // The same grouping with a narrower column set is a subspace; theta
  // restricted to the common terms must agree with the superset space.
  const auto plan = default_grouping(4, 4, {0, 1, 2, 3});
  const auto small = enumerate_search_space(4, 4, plan, {2, 3});
  const auto big = enumerate_search_space(4, 4, plan, all_columns(4, 4));
  ThetaVector small_theta(small.z());
  for (std::size_t i = 0; i < small_theta.size(); i += 2) small_theta.bits[i] = 1;
  ThetaVector big_theta(big.z());
  for (int i = 0; i < small.z(); ++i) {
    if (!small_theta.bits[i]) continue;
    const auto& t = small.terms[i];
    for (int jj = 0; jj < big.z(); ++jj) {
      if (big.terms[jj] == t) big_theta.bits[jj] = 1;
    }
  }
  REQUIRE(small_theta.popcount() == big_theta.popcount());
  for (std::uint32_t x = 0; x < 16; ++x) {
    for (std::uint32_t y = 0; y < 16; ++y) {
      CHECK(evaluate(small, small_theta, x, y) == evaluate(big, big_theta, x, y));
    }
  }
}

TEST_CASE("evaluate rejects a theta of the wrong length") {
  const auto space = default_space(4, 4, {0, 1});
  CHECK_THROWS_AS(evaluate(space, ThetaVector(space.z() + 1), 1, 1), std::invalid_argument);
}

TEST_CASE("grouping validation rejects broken partitions") {
  GroupingPlan plan;
  plan.n = 2;
  plan.m = 2;
  plan.compressed_rows = {0};
  plan.groups.push_back(BitGroup{0, {PPBit{0, 0}, PPBit{0, 0}}, 0});
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);

  plan.groups.clear();
  plan.groups.push_back(BitGroup{0, {PPBit{0, 0}}, 0});
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);  // bit (0,1) uncovered

  plan.groups.push_back(BitGroup{1, {PPBit{1, 1}}, 2});
  CHECK_THROWS_AS(plan.validate(), std::invalid_argument);  // row 1 not compressed
}

TEST_CASE("grouping, space, and theta survive a JSON round-trip") {
  const auto plan = default_grouping(8, 8, {0, 1, 2, 3});
  const auto restored = grouping_from_json(grouping_to_json(plan));
  CHECK(canonical_members(restored) == canonical_members(plan));
  CHECK(restored.compressed_rows == plan.compressed_rows);

  const auto space = enumerate_search_space(8, 8, plan, all_columns(8, 8));
  const auto space2 = space_from_json(space_to_json(space));
  CHECK(space2.terms == space.terms);
  CHECK(space2.allowed_columns == space.allowed_columns);

  ThetaVector theta(space.z());
  theta.bits[0] = theta.bits[7] = theta.bits[100] = 1;
  CHECK(theta_from_json(theta_to_json(theta)) == theta);
}
