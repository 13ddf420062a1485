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
#ifndef APXMUL_NETLIST_HPP_
#define APXMUL_NETLIST_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "apxmul/ppmatrix.hpp"

namespace apxmul {

using WireId = std::uint32_t;

enum class GateKind { And, Or, Xor, Not, HalfAdder, FullAdder };

const char* gate_kind_name(GateKind kind);

struct Gate {
  GateKind kind;
  std::vector<WireId> inputs;
  std::vector<WireId> outputs;
};

// Combinational gate network. Wire 0 is the constant zero; x bits occupy
// wires 1..n and y bits wires n+1..n+m. Gates are stored in topological
// order: every gate input is wire 0, a primary input, or the output of an
// earlier gate.
struct Netlist {
  int n = 0;
  int m = 0;
  WireId wire_count = 0;
  std::vector<Gate> gates;
  std::vector<WireId> outputs;  // n+m wires, LSB first

  WireId const_zero() const { return 0; }
  WireId x_wire(int bit) const { return static_cast<WireId>(1 + bit); }
  WireId y_wire(int bit) const { return static_cast<WireId>(1 + n + bit); }
};

// Builds the multiplier structure for one theta: AND gates for the needed
// partial-product bits, one gate per selected term, Wallace-style 3:2/2:2
// column reduction into two rows, a ripple-carry finish, and a saturation
// OR-mask so outputs clamp at 2^(n+m) - 1 exactly like build_lut.
Netlist emit_netlist(const SearchSpace& space, const ThetaVector& theta);

std::uint64_t simulate_netlist(const Netlist& netlist, std::uint32_t x, std::uint32_t y);

// Structural Verilog, one assign or adder instance per gate. The module name
// must match [A-Za-z_][A-Za-z0-9_]*.
std::string emit_hdl(const Netlist& netlist, const std::string& module_name);

struct CostReport {
  int selected_term_count = 0;
  int pp_bit_count = 0;  // bits entering column reduction, incl. singles and uncompressed rows
  int term_gate_count = 0;     // one logic gate per selected term
  int pp_and_gate_count = 0;   // AND gates materializing partial-product bits
  std::map<std::string, int> gate_count;
  int half_adder_count = 0;
  int full_adder_count = 0;
  int estimated_depth = 0;  // gate levels on the longest input-to-output path
};

CostReport cost_report(const SearchSpace& space, const ThetaVector& theta, const Netlist& netlist);

nlohmann::json netlist_to_json(const Netlist& netlist);
nlohmann::json cost_report_to_json(const CostReport& report);
std::string cost_report_to_csv(const CostReport& report);

}  // namespace apxmul

#endif  // APXMUL_NETLIST_HPP_
