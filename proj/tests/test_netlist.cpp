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

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "apxmul/lut.hpp"
#include "apxmul/netlist.hpp"
#include "apxmul/rng.hpp"

using namespace apxmul;

namespace {

SearchSpace default_space(int n, int m, const std::vector<int>& rows) {
  return enumerate_search_space(n, m, default_grouping(n, m, rows), all_columns(n, m));
}

void check_topological(const Netlist& net) {
  std::set<WireId> defined;
  defined.insert(net.const_zero());
  for (int i = 0; i < net.n; ++i) defined.insert(net.x_wire(i));
  for (int i = 0; i < net.m; ++i) defined.insert(net.y_wire(i));
  for (const auto& g : net.gates) {
    for (WireId w : g.inputs) REQUIRE(defined.count(w) == 1);
    for (WireId w : g.outputs) {
      REQUIRE(defined.count(w) == 0);
      defined.insert(w);
    }
  }
  for (WireId w : net.outputs) REQUIRE(defined.count(w) == 1);
}

void check_matches_lut(const SearchSpace& space, const ThetaVector& theta) {
  const auto net = emit_netlist(space, theta);
  check_topological(net);
  const auto lut = build_lut(space, theta);
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << space.n); ++x) {
    for (std::uint32_t y = 0; y < (std::uint32_t{1} << space.m); ++y) {
      REQUIRE(simulate_netlist(net, x, y) == lut.at(x, y));
    }
  }
}

}  // namespace

TEST_CASE("netlist of the uncompressed 4x4 space computes the exact product") {
  const auto space = default_space(4, 4, {});
  const auto net = emit_netlist(space, ThetaVector(0));
  check_topological(net);
  for (std::uint32_t x = 0; x < 16; ++x) {
    for (std::uint32_t y = 0; y < 16; ++y) {
      REQUIRE(simulate_netlist(net, x, y) == exact_multiply(x, y));
    }
  }
}

TEST_CASE("netlist of the 8x8 half-adder theta is exact on all pairs") {
  const auto space = default_space(8, 8, {0, 1, 2, 3});
  const auto ha = half_adder_theta(space);
  REQUIRE(ha.has_value());
  check_matches_lut(space, *ha);
}

TEST_CASE("all-zero theta without single-bit groups gives constant-zero outputs") {
  GroupingPlan plan;
  plan.n = 4;
  plan.m = 4;
  plan.compressed_rows = {0, 1, 2, 3};
  int id = 0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; c += 2) {
      plan.groups.push_back(BitGroup{id++, {PPBit{r, c}, PPBit{r, c + 1}}, r + c});
    }
  }
  const auto space = enumerate_search_space(4, 4, plan, all_columns(4, 4));
  const auto net = emit_netlist(space, ThetaVector(space.z()));
  CHECK(net.gates.empty());
  for (std::uint32_t x = 0; x < 16; ++x) {
    for (std::uint32_t y = 0; y < 16; ++y) {
      REQUIRE(simulate_netlist(net, x, y) == 0);
    }
  }
}

TEST_CASE("netlist equals LUT on random thetas, including saturating ones") {
  const auto space = default_space(6, 6, {0, 1, 2});
  Rng rng(404);
  bool saw_saturation = false;
  for (int trial = 0; trial < 6; ++trial) {
    ThetaVector theta(space.z());
    for (int i = 0; i < space.z(); ++i) theta.bits[i] = rng.next_bernoulli(0.4) ? 1 : 0;
    saw_saturation |= build_lut(space, theta).saturated;
    check_matches_lut(space, theta);
  }
  CHECK(saw_saturation);  // the sweep must actually exercise the clamp path
}

TEST_CASE("gate census matches the construction") {
  const auto space = default_space(8, 8, {0, 1, 2, 3});
  const auto ha = half_adder_theta(space);
  REQUIRE(ha.has_value());
  const auto net = emit_netlist(space, *ha);
  const auto report = cost_report(space, *ha, net);

  CHECK(report.selected_term_count == ha->popcount());
  CHECK(report.term_gate_count == ha->popcount());
  // half-adder theta selects one AND and one XOR per pair group
  int and_terms = 0, or_terms = 0, xor_terms = 0;
  for (int i = 0; i < space.z(); ++i) {
    if (!ha->bits[i]) continue;
    if (space.terms[i].op == TermOp::And) ++and_terms;
    if (space.terms[i].op == TermOp::Or) ++or_terms;
    if (space.terms[i].op == TermOp::Xor) ++xor_terms;
  }
  CHECK(or_terms == 0);
  // Gates before the first adder are exactly the pp ANDs plus one gate per
  // selected term; anything after the last adder is the saturation OR mask.
  std::size_t first_adder = net.gates.size(), last_adder = 0;
  for (std::size_t i = 0; i < net.gates.size(); ++i) {
    if (net.gates[i].kind == GateKind::HalfAdder || net.gates[i].kind == GateKind::FullAdder) {
      first_adder = std::min(first_adder, i);
      last_adder = i;
    }
  }
  int prefix_and = 0, prefix_or = 0, prefix_xor = 0;
  for (std::size_t i = 0; i < first_adder; ++i) {
    if (net.gates[i].kind == GateKind::And) ++prefix_and;
    if (net.gates[i].kind == GateKind::Or) ++prefix_or;
    if (net.gates[i].kind == GateKind::Xor) ++prefix_xor;
  }
  CHECK(prefix_and == report.pp_and_gate_count + and_terms);
  CHECK(prefix_or == or_terms);
  CHECK(prefix_xor == xor_terms);
  for (std::size_t i = last_adder + 1; i < net.gates.size(); ++i) {
    CHECK(net.gates[i].kind == GateKind::Or);  // saturation mask only
  }
  CHECK(report.pp_bit_count ==
        4 * 8 + 4 + ha->popcount());  // 4 uncompressed rows, 4 singles, terms
  CHECK(report.half_adder_count + report.full_adder_count > 0);
  CHECK(report.estimated_depth > 0);

  const auto j = cost_report_to_json(report);
  CHECK(j.at("term_gate_count").get<int>() == ha->popcount());
  CHECK(cost_report_to_csv(report).find("selected_term_count,28") != std::string::npos);
}

TEST_CASE("netlist JSON lists gates in topological order") {
  const auto space = default_space(4, 4, {0, 1});
  ThetaVector theta(space.z());
  theta.bits[0] = theta.bits[5] = 1;
  const auto net = emit_netlist(space, theta);
  const auto j = netlist_to_json(net);
  CHECK(j.at("n").get<int>() == 4);
  CHECK(j.at("gates").size() == net.gates.size());
  CHECK(j.at("outputs").size() == 8);
}

TEST_CASE("hdl emission matches the reviewed golden file for a 2x2 multiplier") {
  const auto space = default_space(2, 2, {0, 1});
  const auto ha = half_adder_theta(space);
  REQUIRE(ha.has_value());
  const auto net = emit_netlist(space, *ha);
  const auto hdl = emit_hdl(net, "mul2x2");

  const auto golden_path = std::filesystem::path(APXMUL_TEST_DATA_DIR) / "golden" / "mul2x2.v";
  std::ifstream in(golden_path);
  REQUIRE(in.good());
  const std::string golden((std::istreambuf_iterator<char>(in)), {});
  CHECK(hdl == golden);
}

TEST_CASE("hdl emission for an empty netlist drives constant outputs") {
  GroupingPlan plan;
  plan.n = 2;
  plan.m = 2;
  plan.compressed_rows = {0, 1};
  plan.groups.push_back(BitGroup{0, {PPBit{0, 0}, PPBit{0, 1}}, 0});
  plan.groups.push_back(BitGroup{1, {PPBit{1, 0}, PPBit{1, 1}}, 1});
  const auto space = enumerate_search_space(2, 2, plan, {0, 1, 2, 3});
  const auto net = emit_netlist(space, ThetaVector(space.z()));
  CHECK(net.gates.empty());
  const auto hdl = emit_hdl(net, "zero_mul");
  CHECK(hdl.find("assign p[0] = w0;") != std::string::npos);
  CHECK(hdl.find("assign p[3] = w0;") != std::string::npos);
}

TEST_CASE("hdl emission validates the module name") {
  const auto space = default_space(2, 2, {0, 1});
  const auto net = emit_netlist(space, ThetaVector(space.z()));
  CHECK_THROWS_AS(emit_hdl(net, ""), std::invalid_argument);
  CHECK_THROWS_AS(emit_hdl(net, "2bad"), std::invalid_argument);
  CHECK_THROWS_AS(emit_hdl(net, "has space"), std::invalid_argument);
  CHECK_NOTHROW(emit_hdl(net, "_ok_name3"));
}
