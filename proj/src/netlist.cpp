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
#include "apxmul/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace apxmul {

namespace {

class NetlistBuilder {
 public:
  NetlistBuilder(int n, int m) {
    net_.n = n;
    net_.m = m;
    net_.wire_count = static_cast<WireId>(1 + n + m);  // const0 + inputs
  }

  WireId gate2(GateKind kind, WireId a, WireId b) {
    const WireId out = fresh();
    net_.gates.push_back(Gate{kind, {a, b}, {out}});
    return out;
  }

  std::pair<WireId, WireId> half_adder(WireId a, WireId b) {
    const WireId sum = fresh();
    const WireId carry = fresh();
    net_.gates.push_back(Gate{GateKind::HalfAdder, {a, b}, {sum, carry}});
    return {sum, carry};
  }

  std::pair<WireId, WireId> full_adder(WireId a, WireId b, WireId cin) {
    const WireId sum = fresh();
    const WireId carry = fresh();
    net_.gates.push_back(Gate{GateKind::FullAdder, {a, b, cin}, {sum, carry}});
    return {sum, carry};
  }

  Netlist take() { return std::move(net_); }
  Netlist& net() { return net_; }

 private:
  WireId fresh() { return net_.wire_count++; }

  Netlist net_;
};

constexpr WireId kNoWire = static_cast<WireId>(-1);

}  // namespace

const char* gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::And: return "and";
    case GateKind::Or: return "or";
    case GateKind::Xor: return "xor";
    case GateKind::Not: return "not";
    case GateKind::HalfAdder: return "ha";
    case GateKind::FullAdder: return "fa";
  }
  return "?";
}

Netlist emit_netlist(const SearchSpace& space, const ThetaVector& theta) {
  if (theta.size() != static_cast<std::size_t>(space.z())) {
    throw std::invalid_argument("theta length does not match search space");
  }
  NetlistBuilder b(space.n, space.m);
  const Netlist& net = b.net();

  // Partial-product AND gates, created on first use.
  std::vector<WireId> pp(static_cast<std::size_t>(space.n) * space.m, kNoWire);
  auto pp_wire = [&](const PPBit& bit) {
    WireId& w = pp[static_cast<std::size_t>(bit.row) * space.n + bit.col];
    if (w == kNoWire) w = b.gate2(GateKind::And, net.x_wire(bit.col), net.y_wire(bit.row));
    return w;
  };

  std::vector<std::vector<WireId>> columns(space.n + space.m + 2);
  auto put = [&columns](int column, WireId w) {
    if (column >= static_cast<int>(columns.size())) columns.resize(column + 1);
    columns[column].push_back(w);
  };

  std::vector<bool> compressed(space.m, false);
  for (int r : space.grouping.compressed_rows) compressed[r] = true;
  for (int r = 0; r < space.m; ++r) {
    if (compressed[r]) continue;
    for (int c = 0; c < space.n; ++c) put(r + c, pp_wire(PPBit{r, c}));
  }
  for (const auto& g : space.grouping.groups) {
    if (!g.is_pair()) put(g.base_column, pp_wire(g.members[0]));
  }
  for (int i = 0; i < space.z(); ++i) {
    if (!theta.bits[i]) continue;
    const auto& term = space.terms[i];
    const auto& group = space.grouping.groups.at(term.group_id);
    GateKind kind = GateKind::And;
    if (term.op == TermOp::Or) kind = GateKind::Or;
    if (term.op == TermOp::Xor) kind = GateKind::Xor;
    put(term.column, b.gate2(kind, pp_wire(group.members[0]), pp_wire(group.members[1])));
  }

  // Wallace-style passes: 3:2 on triples, 2:2 on a leftover pair of any
  // column still above two rows; columns already at height <= 2 pass through.
  auto max_height = [&columns]() {
    std::size_t h = 0;
    for (const auto& col : columns) h = std::max(h, col.size());
    return h;
  };
  while (max_height() > 2) {
    std::vector<std::vector<WireId>> next(columns.size() + 1);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto& col = columns[c];
      if (col.size() <= 2) {
        for (WireId w : col) next[c].push_back(w);
        continue;
      }
      std::size_t i = 0;
      for (; col.size() - i >= 3; i += 3) {
        auto [sum, carry] = b.full_adder(col[i], col[i + 1], col[i + 2]);
        next[c].push_back(sum);
        next[c + 1].push_back(carry);
      }
      if (col.size() - i == 2) {
        auto [sum, carry] = b.half_adder(col[i], col[i + 1]);
        next[c].push_back(sum);
        next[c + 1].push_back(carry);
      } else if (col.size() - i == 1) {
        next[c].push_back(col[i]);
      }
    }
    while (next.size() > 1 && next.back().empty()) next.pop_back();
    columns = std::move(next);
  }

  // Ripple-carry finish over every remaining column, including the ones
  // beyond the output width; their sum bits drive the saturation mask.
  const int out_width = space.n + space.m;
  std::vector<WireId> raw(out_width, 0);  // default to the constant-zero wire
  std::vector<WireId> overflow_bits;
  WireId carry = kNoWire;
  for (std::size_t c = 0; c < columns.size() || carry != kNoWire; ++c) {
    std::vector<WireId> items;
    if (c < columns.size()) items = columns[c];
    if (carry != kNoWire) items.push_back(carry);
    carry = kNoWire;
    WireId sum = net.const_zero();
    if (items.size() == 1) {
      sum = items[0];
    } else if (items.size() == 2) {
      auto [s, cy] = b.half_adder(items[0], items[1]);
      sum = s;
      carry = cy;
    } else if (items.size() == 3) {
      auto [s, cy] = b.full_adder(items[0], items[1], items[2]);
      sum = s;
      carry = cy;
    }
    if (c < static_cast<std::size_t>(out_width)) {
      raw[c] = sum;
    } else if (sum != net.const_zero()) {
      overflow_bits.push_back(sum);
    }
  }

  Netlist result;
  if (overflow_bits.empty()) {
    result = b.take();
    result.outputs.assign(raw.begin(), raw.end());
    return result;
  }
  WireId sat = overflow_bits[0];
  for (std::size_t i = 1; i < overflow_bits.size(); ++i) {
    sat = b.gate2(GateKind::Or, sat, overflow_bits[i]);
  }
  std::vector<WireId> outs(out_width);
  for (int c = 0; c < out_width; ++c) {
    outs[c] = raw[c] == b.net().const_zero() ? sat : b.gate2(GateKind::Or, raw[c], sat);
  }
  result = b.take();
  result.outputs = std::move(outs);
  return result;
}

std::uint64_t simulate_netlist(const Netlist& netlist, std::uint32_t x, std::uint32_t y) {
  std::vector<std::uint8_t> value(netlist.wire_count, 0);
  for (int i = 0; i < netlist.n; ++i) value[netlist.x_wire(i)] = (x >> i) & 1u;
  for (int i = 0; i < netlist.m; ++i) value[netlist.y_wire(i)] = (y >> i) & 1u;
  for (const auto& g : netlist.gates) {
    switch (g.kind) {
      case GateKind::And:
        value[g.outputs[0]] = value[g.inputs[0]] & value[g.inputs[1]];
        break;
      case GateKind::Or:
        value[g.outputs[0]] = value[g.inputs[0]] | value[g.inputs[1]];
        break;
      case GateKind::Xor:
        value[g.outputs[0]] = value[g.inputs[0]] ^ value[g.inputs[1]];
        break;
      case GateKind::Not:
        value[g.outputs[0]] = value[g.inputs[0]] ^ 1u;
        break;
      case GateKind::HalfAdder: {
        const auto a = value[g.inputs[0]], bb = value[g.inputs[1]];
        value[g.outputs[0]] = a ^ bb;
        value[g.outputs[1]] = a & bb;
        break;
      }
      case GateKind::FullAdder: {
        const auto a = value[g.inputs[0]], bb = value[g.inputs[1]], c = value[g.inputs[2]];
        value[g.outputs[0]] = a ^ bb ^ c;
        value[g.outputs[1]] = static_cast<std::uint8_t>((a & bb) | (a & c) | (bb & c));
        break;
      }
    }
  }
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < netlist.outputs.size(); ++i) {
    out |= static_cast<std::uint64_t>(value[netlist.outputs[i]]) << i;
  }
  return out;
}

std::string emit_hdl(const Netlist& netlist, const std::string& module_name) {
  if (module_name.empty() ||
      (!std::isalpha(static_cast<unsigned char>(module_name[0])) && module_name[0] != '_')) {
    throw std::invalid_argument("invalid module name: " + module_name);
  }
  for (char c : module_name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
      throw std::invalid_argument("invalid module name: " + module_name);
    }
  }

  std::ostringstream out;
  out << "module " << module_name << " (\n";
  out << "  input  wire [" << netlist.n - 1 << ":0] x,\n";
  out << "  input  wire [" << netlist.m - 1 << ":0] y,\n";
  out << "  output wire [" << netlist.n + netlist.m - 1 << ":0] p\n";
  out << ");\n\n";
  out << "  wire w0;\n";
  out << "  assign w0 = 1'b0;\n";
  for (int i = 0; i < netlist.n; ++i) {
    out << "  wire w" << netlist.x_wire(i) << ";\n";
    out << "  assign w" << netlist.x_wire(i) << " = x[" << i << "];\n";
  }
  for (int i = 0; i < netlist.m; ++i) {
    out << "  wire w" << netlist.y_wire(i) << ";\n";
    out << "  assign w" << netlist.y_wire(i) << " = y[" << i << "];\n";
  }
  out << "\n";
  std::size_t adder_index = 0;
  for (const auto& g : netlist.gates) {
    for (WireId w : g.outputs) out << "  wire w" << w << ";\n";
    switch (g.kind) {
      case GateKind::And:
        out << "  assign w" << g.outputs[0] << " = w" << g.inputs[0] << " & w" << g.inputs[1]
            << ";\n";
        break;
      case GateKind::Or:
        out << "  assign w" << g.outputs[0] << " = w" << g.inputs[0] << " | w" << g.inputs[1]
            << ";\n";
        break;
      case GateKind::Xor:
        out << "  assign w" << g.outputs[0] << " = w" << g.inputs[0] << " ^ w" << g.inputs[1]
            << ";\n";
        break;
      case GateKind::Not:
        out << "  assign w" << g.outputs[0] << " = ~w" << g.inputs[0] << ";\n";
        break;
      case GateKind::HalfAdder:
        out << "  half_adder u_add" << adder_index++ << " (.a(w" << g.inputs[0] << "), .b(w"
            << g.inputs[1] << "), .s(w" << g.outputs[0] << "), .c(w" << g.outputs[1] << "));\n";
        break;
      case GateKind::FullAdder:
        out << "  full_adder u_add" << adder_index++ << " (.a(w" << g.inputs[0] << "), .b(w"
            << g.inputs[1] << "), .cin(w" << g.inputs[2] << "), .s(w" << g.outputs[0]
            << "), .cout(w" << g.outputs[1] << "));\n";
        break;
    }
  }
  out << "\n";
  for (std::size_t i = 0; i < netlist.outputs.size(); ++i) {
    out << "  assign p[" << i << "] = w" << netlist.outputs[i] << ";\n";
  }
  out << "endmodule\n\n";
  out << "module half_adder (input wire a, input wire b, output wire s, output wire c);\n";
  out << "  assign s = a ^ b;\n";
  out << "  assign c = a & b;\n";
  out << "endmodule\n\n";
  out << "module full_adder (input wire a, input wire b, input wire cin,\n";
  out << "                   output wire s, output wire cout);\n";
  out << "  assign s = a ^ b ^ cin;\n";
  out << "  assign cout = (a & b) | (a & cin) | (b & cin);\n";
  out << "endmodule\n";
  return out.str();
}

CostReport cost_report(const SearchSpace& space, const ThetaVector& theta,
                       const Netlist& netlist) {
  CostReport report;
  report.selected_term_count = theta.popcount();

  int uncompressed_rows = space.m - static_cast<int>(space.grouping.compressed_rows.size());
  int singles = 0;
  for (const auto& g : space.grouping.groups) {
    if (!g.is_pair()) ++singles;
  }
  report.pp_bit_count = uncompressed_rows * space.n + singles + report.selected_term_count;
  report.term_gate_count = report.selected_term_count;

  // Distinct partial-product bits the netlist materializes.
  std::set<std::pair<int, int>> needed;
  std::vector<bool> compressed(space.m, false);
  for (int r : space.grouping.compressed_rows) compressed[r] = true;
  for (int r = 0; r < space.m; ++r) {
    if (compressed[r]) continue;
    for (int c = 0; c < space.n; ++c) needed.insert({r, c});
  }
  for (const auto& g : space.grouping.groups) {
    if (!g.is_pair()) needed.insert({g.members[0].row, g.members[0].col});
  }
  for (int i = 0; i < space.z(); ++i) {
    if (!theta.bits[i]) continue;
    for (const auto& b : space.grouping.groups.at(space.terms[i].group_id).members) {
      needed.insert({b.row, b.col});
    }
  }
  report.pp_and_gate_count = static_cast<int>(needed.size());

  for (const auto& g : netlist.gates) {
    ++report.gate_count[gate_kind_name(g.kind)];
    if (g.kind == GateKind::HalfAdder) ++report.half_adder_count;
    if (g.kind == GateKind::FullAdder) ++report.full_adder_count;
  }

  std::vector<int> level(netlist.wire_count, 0);
  for (const auto& g : netlist.gates) {
    int in_level = 0;
    for (WireId w : g.inputs) in_level = std::max(in_level, level[w]);
    for (WireId w : g.outputs) level[w] = in_level + 1;
  }
  for (WireId w : netlist.outputs) report.estimated_depth = std::max(report.estimated_depth, level[w]);
  return report;
}

nlohmann::json netlist_to_json(const Netlist& netlist) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : netlist.gates) {
    gates.push_back({{"kind", gate_kind_name(g.kind)}, {"in", g.inputs}, {"out", g.outputs}});
  }
  return {{"n", netlist.n},
          {"m", netlist.m},
          {"wire_count", netlist.wire_count},
          {"const_zero_wire", 0},
          {"outputs", netlist.outputs},
          {"gates", gates}};
}

nlohmann::json cost_report_to_json(const CostReport& report) {
  return {{"selected_term_count", report.selected_term_count},
          {"pp_bit_count", report.pp_bit_count},
          {"term_gate_count", report.term_gate_count},
          {"pp_and_gate_count", report.pp_and_gate_count},
          {"gate_count", report.gate_count},
          {"half_adder_count", report.half_adder_count},
          {"full_adder_count", report.full_adder_count},
          {"estimated_depth", report.estimated_depth}};
}

std::string cost_report_to_csv(const CostReport& report) {
  std::ostringstream out;
  out << "metric,value\n";
  out << "selected_term_count," << report.selected_term_count << "\n";
  out << "pp_bit_count," << report.pp_bit_count << "\n";
  out << "term_gate_count," << report.term_gate_count << "\n";
  out << "pp_and_gate_count," << report.pp_and_gate_count << "\n";
  for (const auto& [kind, count] : report.gate_count) {
    out << "gates_" << kind << "," << count << "\n";
  }
  out << "half_adder_count," << report.half_adder_count << "\n";
  out << "full_adder_count," << report.full_adder_count << "\n";
  out << "estimated_depth," << report.estimated_depth << "\n";
  return out.str();
}

}  // namespace apxmul
