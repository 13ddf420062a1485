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
#ifndef APXMUL_QNN_GRAPH_HPP_
#define APXMUL_QNN_GRAPH_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "apxmul/qnn/archive.hpp"
#include "apxmul/qnn/tensor.hpp"

namespace apxmul::qnn {

enum class LayerKind { Input, Conv2D, Dense, ReLU, MaxPool2x2, Flatten, ArgMax };
enum class Padding { Valid, Same };

const char* layer_kind_name(LayerKind kind);
LayerKind layer_kind_from_name(const std::string& name);

struct LayerNode {
  std::string id;
  LayerKind kind = LayerKind::Input;
  std::vector<std::string> inputs;

  // Input
  std::vector<std::int64_t> input_shape;
  // Conv2D / Dense
  std::string weights;
  std::string bias;  // optional, empty = none
  QParams weight_qp;
  int stride_h = 1;
  int stride_w = 1;
  Padding padding = Padding::Valid;
  // Output quantization for Input / Conv2D / Dense.
  QParams out_qp;
};

// Quantized layer DAG plus its weight archive.
struct GraphModel {
  std::vector<LayerNode> nodes;
  std::string input_id;
  std::string output_id;
  TensorArchive tensors;

  const LayerNode& node(const std::string& id) const;
  // Structural checks: ids unique, referenced inputs exist, weights resolve,
  // input/output ids present. Cycles are caught by the executor's toposort.
  void validate() const;

  static GraphModel load(const std::filesystem::path& model_json_path);
};

struct Dataset {
  QTensor images;                   // [N, H, W, C] u8
  std::vector<std::int32_t> labels; // [N]

  std::size_t size() const { return labels.size(); }
  // Sample i as an [H, W, C] tensor carrying qp.
  QTensor sample(std::size_t i, const QParams& qp) const;

  static Dataset load(const std::filesystem::path& manifest_path);
};

}  // namespace apxmul::qnn

#endif  // APXMUL_QNN_GRAPH_HPP_
