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
#include "apxmul/ppmatrix.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace apxmul {

namespace {

void check_widths(int n, int m) {
  if (n < 1 || m < 1 || n > 16 || m > 16) {
    throw std::invalid_argument("operand widths must be in [1, 16]");
  }
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline int bit_of(std::uint32_t v, int idx) { return (v >> idx) & 1u; }

inline int pp_bit_value(const PPBit& b, std::uint32_t x, std::uint32_t y) {
  return bit_of(x, b.col) & bit_of(y, b.row);
}

inline int apply_op(TermOp op, int a, int b) {
  switch (op) {
    case TermOp::And: return a & b;
    case TermOp::Or: return a | b;
    case TermOp::Xor: return a ^ b;
  }
  return 0;
}

}  // namespace

int GroupingPlan::pair_group_count() const {
  int a = 0;
  for (const auto& g : groups) {
    if (g.is_pair()) ++a;
  }
  return a;
}

void GroupingPlan::validate() const {
  check_widths(n, m);
  std::set<int> rows(compressed_rows.begin(), compressed_rows.end());
  if (rows.size() != compressed_rows.size()) {
    throw std::invalid_argument("compressed_rows contains duplicates");
  }
  for (int r : compressed_rows) {
    if (r < 0 || r >= m) throw std::invalid_argument("compressed row out of range");
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& g : groups) {
    if (g.members.empty() || g.members.size() > 2) {
      throw std::invalid_argument("group must have 1 or 2 members");
    }
    for (const auto& b : g.members) {
      if (b.row < 0 || b.row >= m || b.col < 0 || b.col >= n) {
        throw std::invalid_argument("group member bit out of range");
      }
      if (rows.count(b.row) == 0) {
        throw std::invalid_argument("group member not in a compressed row");
      }
      if (!seen.insert({b.row, b.col}).second) {
        throw std::invalid_argument("partial-product bit appears in two groups");
      }
    }
    if (g.members.size() == 2 && g.members[0] == g.members[1]) {
      throw std::invalid_argument("group members must be distinct");
    }
  }
  // covering: every bit of every compressed row must be grouped
  const std::size_t expected = rows.size() * static_cast<std::size_t>(n);
  if (seen.size() != expected) {
    throw std::invalid_argument("groups do not cover all compressed-row bits");
  }
}

const char* term_op_name(TermOp op) {
  switch (op) {
    case TermOp::And: return "and";
    case TermOp::Or: return "or";
    case TermOp::Xor: return "xor";
  }
  return "?";
}

TermOp term_op_from_name(const std::string& name) {
  if (name == "and") return TermOp::And;
  if (name == "or") return TermOp::Or;
  if (name == "xor") return TermOp::Xor;
  throw std::invalid_argument("unknown term op: " + name);
}

std::uint64_t SearchSpace::term_weight(int term_index) const {
  return std::uint64_t{1} << terms.at(term_index).column;
}

int ThetaVector::popcount() const {
  int c = 0;
  for (auto b : bits) c += b ? 1 : 0;
  return c;
}

GroupingPlan default_grouping(int n, int m, const std::vector<int>& compressed_rows) {
  check_widths(n, m);
  GroupingPlan plan;
  plan.n = n;
  plan.m = m;
  plan.compressed_rows = sorted_unique(compressed_rows);
  for (int r : plan.compressed_rows) {
    if (r < 0 || r >= m) throw std::invalid_argument("compressed row out of range");
  }

  // Bits of each matrix column, rows top-down; adjacent bits pair up.
  std::map<int, std::vector<PPBit>> by_column;
  for (int r : plan.compressed_rows) {
    for (int c = 0; c < n; ++c) {
      by_column[r + c].push_back(PPBit{r, c});
    }
  }
  int next_id = 0;
  for (auto& [column, bits] : by_column) {
    std::size_t i = 0;
    for (; i + 1 < bits.size(); i += 2) {
      plan.groups.push_back(BitGroup{next_id++, {bits[i], bits[i + 1]}, column});
    }
    if (i < bits.size()) {
      plan.groups.push_back(BitGroup{next_id++, {bits[i]}, column});
    }
  }
  plan.validate();
  return plan;
}

SearchSpace enumerate_search_space(int n, int m, GroupingPlan grouping,
                                   std::vector<int> allowed_columns) {
  check_widths(n, m);
  if (grouping.n != n || grouping.m != m) {
    throw std::invalid_argument("grouping widths do not match search space");
  }
  grouping.validate();

  SearchSpace space;
  space.n = n;
  space.m = m;
  space.allowed_columns = sorted_unique(std::move(allowed_columns));
  for (int c : space.allowed_columns) {
    if (c < 0 || c >= n + m) {
      throw std::invalid_argument("allowed column outside result width");
    }
  }

  static constexpr TermOp kOps[] = {TermOp::And, TermOp::Or, TermOp::Xor};
  for (const auto& g : grouping.groups) {
    if (!g.is_pair()) continue;
    for (TermOp op : kOps) {
      for (int c : space.allowed_columns) {
        space.terms.push_back(CompressedTermSpec{op, g.id, c});
      }
    }
  }
  space.grouping = std::move(grouping);
  return space;
}

int term_value(const SearchSpace& space, int term_index, std::uint32_t x, std::uint32_t y) {
  const auto& term = space.terms.at(term_index);
  const auto& group = space.grouping.groups.at(term.group_id);
  const int a = pp_bit_value(group.members[0], x, y);
  const int b = pp_bit_value(group.members[1], x, y);
  return apply_op(term.op, a, b);
}

std::uint64_t uncompressed_sum(int n, int m, const std::vector<int>& compressed_rows,
                               std::uint32_t x, std::uint32_t y) {
  check_widths(n, m);
  std::uint64_t compressed_mask = 0;
  for (int r : compressed_rows) compressed_mask |= std::uint64_t{1} << r;
  std::uint64_t sum = 0;
  const std::uint64_t xm = x & ((std::uint32_t{1} << n) - 1);
  for (int r = 0; r < m; ++r) {
    if (compressed_mask & (std::uint64_t{1} << r)) continue;
    if (bit_of(y, r)) sum += xm << r;
  }
  return sum;
}

std::uint64_t evaluate(const SearchSpace& space, const ThetaVector& theta,
                       std::uint32_t x, std::uint32_t y) {
  if (theta.size() != static_cast<std::size_t>(space.z())) {
    throw std::invalid_argument("theta length does not match search space");
  }
  std::uint64_t f = uncompressed_sum(space.n, space.m, space.grouping.compressed_rows, x, y);
  for (const auto& g : space.grouping.groups) {
    if (g.is_pair()) continue;
    if (pp_bit_value(g.members[0], x, y)) f += std::uint64_t{1} << g.base_column;
  }
  for (int i = 0; i < space.z(); ++i) {
    if (!theta.bits[i]) continue;
    if (term_value(space, i, x, y)) f += std::uint64_t{1} << space.terms[i].column;
  }
  return f;
}

std::optional<ThetaVector> half_adder_theta(const SearchSpace& space) {
  struct Want {
    int group_id;
    TermOp op;
    int column;
  };
  std::vector<Want> wants;
  for (const auto& g : space.grouping.groups) {
    if (!g.is_pair()) continue;
    if (g.members[0].matrix_column() != g.members[1].matrix_column()) return std::nullopt;
    const int c = g.members[0].matrix_column();
    wants.push_back({g.id, TermOp::Xor, c});
    wants.push_back({g.id, TermOp::And, c + 1});
  }
  ThetaVector theta(space.z());
  for (const auto& w : wants) {
    bool found = false;
    for (int i = 0; i < space.z(); ++i) {
      const auto& t = space.terms[i];
      if (t.group_id == w.group_id && t.op == w.op && t.column == w.column) {
        theta.bits[i] = 1;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  return theta;
}

std::vector<int> all_columns(int n, int m) {
  std::vector<int> cols(n + m);
  for (int i = 0; i < n + m; ++i) cols[i] = i;
  return cols;
}

nlohmann::json grouping_to_json(const GroupingPlan& plan) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : plan.groups) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& b : g.members) members.push_back({b.row, b.col});
    groups.push_back({{"id", g.id}, {"members", members}, {"base_column", g.base_column}});
  }
  return {{"n", plan.n},
          {"m", plan.m},
          {"compressed_rows", plan.compressed_rows},
          {"groups", groups}};
}

GroupingPlan grouping_from_json(const nlohmann::json& j) {
  GroupingPlan plan;
  plan.n = j.at("n").get<int>();
  plan.m = j.at("m").get<int>();
  plan.compressed_rows = j.at("compressed_rows").get<std::vector<int>>();
  for (const auto& gj : j.at("groups")) {
    BitGroup g;
    g.id = gj.at("id").get<int>();
    g.base_column = gj.at("base_column").get<int>();
    for (const auto& mj : gj.at("members")) {
      if (!mj.is_array() || mj.size() != 2) {
        throw std::invalid_argument("group member must be a [row, col] pair");
      }
      g.members.push_back(PPBit{mj[0].get<int>(), mj[1].get<int>()});
    }
    plan.groups.push_back(std::move(g));
  }
  plan.validate();
  return plan;
}

nlohmann::json space_to_json(const SearchSpace& space) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : space.terms) {
    terms.push_back({{"op", term_op_name(t.op)}, {"group", t.group_id}, {"column", t.column}});
  }
  return {{"n", space.n},
          {"m", space.m},
          {"grouping", grouping_to_json(space.grouping)},
          {"allowed_columns", space.allowed_columns},
          {"terms", terms}};
}

SearchSpace space_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  GroupingPlan plan = grouping_from_json(j.at("grouping"));
  SearchSpace space = enumerate_search_space(n, m, std::move(plan),
                                             j.at("allowed_columns").get<std::vector<int>>());
  // The term list is re-derived; check the file agrees so stale files fail loud.
  if (j.contains("terms")) {
    const auto& terms = j.at("terms");
    if (terms.size() != static_cast<std::size_t>(space.z())) {
      throw std::invalid_argument("search-space file term count mismatch");
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
      CompressedTermSpec t{term_op_from_name(terms[i].at("op").get<std::string>()),
                           terms[i].at("group").get<int>(), terms[i].at("column").get<int>()};
      if (!(t == space.terms[i])) {
        throw std::invalid_argument("search-space file term order mismatch");
      }
    }
  }
  return space;
}

nlohmann::json theta_to_json(const ThetaVector& theta) {
  nlohmann::json bits = nlohmann::json::array();
  for (auto b : theta.bits) bits.push_back(static_cast<int>(b));
  return {{"z", theta.size()}, {"popcount", theta.popcount()}, {"bits", bits}};
}

ThetaVector theta_from_json(const nlohmann::json& j) {
  ThetaVector theta;
  for (const auto& b : j.at("bits")) {
    const int v = b.get<int>();
    if (v != 0 && v != 1) throw std::invalid_argument("theta bits must be 0 or 1");
    theta.bits.push_back(static_cast<std::uint8_t>(v));
  }
  if (j.contains("z") && j.at("z").get<std::size_t>() != theta.size()) {
    throw std::invalid_argument("theta length does not match declared z");
  }
  return theta;
}

}  // namespace apxmul
