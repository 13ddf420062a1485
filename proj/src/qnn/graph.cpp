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
#include "apxmul/qnn/graph.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace apxmul::qnn {

namespace {

QParams qparams_from_json(const nlohmann::json& j) {
  QParams qp;
  qp.scale = j.at("scale").get<double>();
  qp.zero_point = j.at("zero_point").get<int>();
  if (!(qp.scale > 0)) throw std::runtime_error("qparams scale must be positive");
  if (qp.zero_point < 0 || qp.zero_point > 255) {
    throw std::runtime_error("qparams zero_point must be in [0, 255]");
  }
  return qp;
}

}  // namespace

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::Input: return "input";
    case LayerKind::Conv2D: return "conv2d";
    case LayerKind::Dense: return "dense";
    case LayerKind::ReLU: return "relu";
    case LayerKind::MaxPool2x2: return "maxpool2x2";
    case LayerKind::Flatten: return "flatten";
    case LayerKind::ArgMax: return "argmax";
  }
  return "?";
}

LayerKind layer_kind_from_name(const std::string& name) {
  if (name == "input") return LayerKind::Input;
  if (name == "conv2d") return LayerKind::Conv2D;
  if (name == "dense") return LayerKind::Dense;
  if (name == "relu") return LayerKind::ReLU;
  if (name == "maxpool2x2") return LayerKind::MaxPool2x2;
  if (name == "flatten") return LayerKind::Flatten;
  if (name == "argmax") return LayerKind::ArgMax;
  throw std::runtime_error("unknown layer kind: " + name);
}

const LayerNode& GraphModel::node(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return n;
  }
  throw std::invalid_argument("no node with id " + id);
}

void GraphModel::validate() const {
  std::set<std::string> ids;
  for (const auto& n : nodes) {
    if (!ids.insert(n.id).second) throw std::invalid_argument("duplicate node id " + n.id);
  }
  for (const auto& n : nodes) {
    for (const auto& in : n.inputs) {
      if (ids.count(in) == 0) {
        throw std::invalid_argument("node " + n.id + " references unknown input " + in);
      }
    }
    if (n.kind == LayerKind::Conv2D || n.kind == LayerKind::Dense) {
      if (!tensors.contains(n.weights)) {
        throw std::invalid_argument("node " + n.id + " references unknown weights " + n.weights);
      }
      if (!n.bias.empty() && !tensors.contains(n.bias)) {
        throw std::invalid_argument("node " + n.id + " references unknown bias " + n.bias);
      }
    }
  }
  if (ids.count(input_id) == 0) throw std::invalid_argument("input node missing: " + input_id);
  if (ids.count(output_id) == 0) throw std::invalid_argument("output node missing: " + output_id);
}

GraphModel GraphModel::load(const std::filesystem::path& model_json_path) {
  std::ifstream in(model_json_path);
  if (!in) throw std::runtime_error("cannot open " + model_json_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad model file " + model_json_path.string() + ": " + e.what());
  }

  GraphModel model;
  try {
    if (j.at("format").get<std::string>() != "qnn-model-v1") {
      throw std::runtime_error("unsupported model format");
    }
    model.input_id = j.at("input").get<std::string>();
    model.output_id = j.at("output").get<std::string>();
    const auto manifest =
        model_json_path.parent_path() / j.at("tensor_manifest").get<std::string>();
    model.tensors = TensorArchive::load(manifest);

    for (const auto& nj : j.at("nodes")) {
      LayerNode n;
      n.id = nj.at("id").get<std::string>();
      n.kind = layer_kind_from_name(nj.at("kind").get<std::string>());
      if (nj.contains("inputs")) n.inputs = nj.at("inputs").get<std::vector<std::string>>();
      switch (n.kind) {
        case LayerKind::Input:
          n.input_shape = nj.at("shape").get<std::vector<std::int64_t>>();
          n.out_qp = qparams_from_json(nj.at("qparams"));
          break;
        case LayerKind::Conv2D:
          n.stride_h = nj.at("strides")[0].get<int>();
          n.stride_w = nj.at("strides")[1].get<int>();
          n.padding = nj.at("padding").get<std::string>() == "same" ? Padding::Same
                                                                    : Padding::Valid;
          [[fallthrough]];
        case LayerKind::Dense:
          n.weights = nj.at("weights").get<std::string>();
          if (nj.contains("bias")) n.bias = nj.at("bias").get<std::string>();
          n.weight_qp = qparams_from_json(nj.at("weight_qparams"));
          n.out_qp = qparams_from_json(nj.at("qparams"));
          break;
        default:
          break;
      }
      model.nodes.push_back(std::move(n));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad model file " + model_json_path.string() + ": " + e.what());
  }
  model.validate();
  return model;
}

QTensor Dataset::sample(std::size_t i, const QParams& qp) const {
  if (images.shape.size() != 4) throw std::invalid_argument("dataset images must be 4-D");
  const std::int64_t per = images.numel() / images.shape[0];
  QTensor t;
  t.shape = {images.shape[1], images.shape[2], images.shape[3]};
  t.qp = qp;
  t.data.assign(images.data.begin() + static_cast<std::int64_t>(i) * per,
                images.data.begin() + static_cast<std::int64_t>(i + 1) * per);
  return t;
}

Dataset Dataset::load(const std::filesystem::path& manifest_path) {
  TensorArchive archive = TensorArchive::load(manifest_path);
  Dataset ds;
  ds.images.shape = archive.info("images").shape;
  if (ds.images.shape.size() != 4) throw std::runtime_error("images tensor must be [N,H,W,C]");
  ds.images.data = archive.u8("images");
  ds.labels = archive.i32("labels");
  if (archive.info("labels").shape.size() != 1 ||
      archive.info("labels").shape[0] != ds.images.shape[0]) {
    throw std::runtime_error("labels tensor must be [N] matching images");
  }
  return ds;
}

}  // namespace apxmul::qnn
