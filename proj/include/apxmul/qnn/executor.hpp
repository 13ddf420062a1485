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
#ifndef APXMUL_QNN_EXECUTOR_HPP_
#define APXMUL_QNN_EXECUTOR_HPP_

#include <cstdint>
#include <map>
#include <string>

#include "apxmul/distribution.hpp"
#include "apxmul/lut.hpp"
#include "apxmul/qnn/graph.hpp"
#include "apxmul/qnn/tensor.hpp"

namespace apxmul::qnn {

// The multiplication primitive of the datapath: exact integer product or a
// LUT lookup. Only the raw q*q products route through it; the zero-point
// correction sums stay exact.
class MulBackend {
 public:
  static MulBackend exact();
  static MulBackend lut(const MultiplierLUT& lut);  // must be 8x8

  std::uint32_t mul(std::uint8_t a, std::uint8_t b) const {
    if (table_.empty()) return static_cast<std::uint32_t>(a) * b;
    return table_[(static_cast<std::size_t>(a) << 8) | b];
  }
  bool is_lut() const { return !table_.empty(); }

 private:
  MulBackend() = default;
  std::vector<std::uint32_t> table_;
};

// Count sinks for the operand bytes fed to the multiplier.
struct MulRecord {
  std::uint64_t* input_counts = nullptr;   // 256 entries each, may be null
  std::uint64_t* weight_counts = nullptr;
  std::uint64_t* layer_input_counts = nullptr;
  std::uint64_t* layer_weight_counts = nullptr;

  void hit(std::uint8_t x, std::uint8_t w) const {
    if (input_counts) ++input_counts[x];
    if (weight_counts) ++weight_counts[w];
    if (layer_input_counts) ++layer_input_counts[x];
    if (layer_weight_counts) ++layer_weight_counts[w];
  }
};

// Operand histograms captured during execution, merged and per layer.
struct Recorder {
  Histogram inputs = Histogram::zeros(8);
  Histogram weights = Histogram::zeros(8);
  std::map<std::string, std::pair<Histogram, Histogram>> per_layer;

  MulRecord sinks_for(const std::string& layer_id);
};

struct ExecStats {
  std::size_t nodes_executed = 0;
  bool accumulator_saturated = false;
};

// acc[o] = sum mul(x, w) - Zw*sum(x) - Zx*sum(w) + Nk*Zx*Zw + bias[o].
// "Same" padding feeds Zx for the padded positions (so they pass through the
// multiplier and the sums like real pixels). Accumulation is 64-bit
// internally, saturated to int32 on store with *saturated flagged.
I32Tensor conv2d_q(const QTensor& input, const QTensor& weights,
                   const std::vector<std::int32_t>& bias, int stride_h, int stride_w,
                   Padding padding, const MulBackend& backend,
                   const MulRecord* record = nullptr, bool* saturated = nullptr);

I32Tensor dense_q(const QTensor& input, const QTensor& weights,
                  const std::vector<std::int32_t>& bias, const MulBackend& backend,
                  const MulRecord* record = nullptr, bool* saturated = nullptr);

// Runs the DAG in topological order with per-node memoization; every node
// executes exactly once. Throws std::invalid_argument on cycles, shape
// mismatches, or unresolved weight references.
QTensor execute(const GraphModel& model, const QTensor& input, const MulBackend& backend,
                Recorder* recorder = nullptr, ExecStats* stats = nullptr);

// Fraction of samples whose ArgMax output matches the label. limit == 0
// means the whole dataset.
double accuracy_eval(const GraphModel& model, const Dataset& dataset, const MulBackend& backend,
                     std::size_t limit = 0, Recorder* recorder = nullptr);

}  // namespace apxmul::qnn

#endif  // APXMUL_QNN_EXECUTOR_HPP_
