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
#include "apxmul/qnn/executor.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace apxmul::qnn {

namespace {

std::int32_t saturate_i32(std::int64_t v, bool* flag) {
  if (v > std::numeric_limits<std::int32_t>::max()) {
    if (flag) *flag = true;
    return std::numeric_limits<std::int32_t>::max();
  }
  if (v < std::numeric_limits<std::int32_t>::min()) {
    if (flag) *flag = true;
    return std::numeric_limits<std::int32_t>::min();
  }
  return static_cast<std::int32_t>(v);
}

struct PadSpec {
  int out = 0;
  int before = 0;
};

PadSpec pad_spec(int in, int kernel, int stride, Padding padding) {
  PadSpec spec;
  if (padding == Padding::Valid) {
    if (in < kernel) throw std::invalid_argument("input smaller than kernel with valid padding");
    spec.out = (in - kernel) / stride + 1;
    spec.before = 0;
  } else {
    spec.out = (in + stride - 1) / stride;
    const int total = std::max((spec.out - 1) * stride + kernel - in, 0);
    spec.before = total / 2;
  }
  return spec;
}

}  // namespace

MulBackend MulBackend::exact() { return MulBackend(); }

MulBackend MulBackend::lut(const MultiplierLUT& lut) {
  if (lut.n != 8 || lut.m != 8) {
    throw std::invalid_argument("inference LUT must be 8x8");
  }
  MulBackend backend;
  backend.table_ = lut.entries;
  return backend;
}

MulRecord Recorder::sinks_for(const std::string& layer_id) {
  auto [it, inserted] = per_layer.try_emplace(layer_id, Histogram::zeros(8), Histogram::zeros(8));
  (void)inserted;
  MulRecord rec;
  rec.input_counts = inputs.counts.data();
  rec.weight_counts = weights.counts.data();
  rec.layer_input_counts = it->second.first.counts.data();
  rec.layer_weight_counts = it->second.second.counts.data();
  return rec;
}

I32Tensor conv2d_q(const QTensor& input, const QTensor& weights,
                   const std::vector<std::int32_t>& bias, int stride_h, int stride_w,
                   Padding padding, const MulBackend& backend, const MulRecord* record,
                   bool* saturated) {
  if (input.shape.size() != 3) throw std::invalid_argument("conv2d input must be [H,W,C]");
  if (weights.shape.size() != 4) {
    throw std::invalid_argument("conv2d weights must be [Kh,Kw,Cin,Cout]");
  }
  const int h = static_cast<int>(input.shape[0]);
  const int w = static_cast<int>(input.shape[1]);
  const int cin = static_cast<int>(input.shape[2]);
  const int kh = static_cast<int>(weights.shape[0]);
  const int kw = static_cast<int>(weights.shape[1]);
  const int cout = static_cast<int>(weights.shape[3]);
  if (weights.shape[2] != cin) {
    throw std::invalid_argument("conv2d channel mismatch between input and weights");
  }
  if (!bias.empty() && static_cast<int>(bias.size()) != cout) {
    throw std::invalid_argument("conv2d bias size mismatch");
  }
  if (stride_h < 1 || stride_w < 1) throw std::invalid_argument("conv2d strides must be >= 1");

  const PadSpec ph = pad_spec(h, kh, stride_h, padding);
  const PadSpec pw = pad_spec(w, kw, stride_w, padding);
  const auto zx = static_cast<std::uint8_t>(input.qp.zero_point);
  const std::int64_t zw = weights.qp.zero_point;
  const std::int64_t zx64 = input.qp.zero_point;
  const std::int64_t nk = static_cast<std::int64_t>(kh) * kw * cin;

  // Per-output-channel weight sums are theta-independent of the input.
  std::vector<std::int64_t> wsum(cout, 0);
  for (std::int64_t i = 0; i < weights.numel(); ++i) {
    wsum[i % cout] += weights.data[i];
  }

  I32Tensor out;
  out.shape = {ph.out, pw.out, cout};
  out.data.resize(static_cast<std::size_t>(ph.out) * pw.out * cout);

  auto in_at = [&](int iy, int ix, int ic) -> std::uint8_t {
    if (iy < 0 || iy >= h || ix < 0 || ix >= w) return zx;  // pad with the zero point
    return input.data[(static_cast<std::size_t>(iy) * w + ix) * cin + ic];
  };

  std::size_t out_idx = 0;
  for (int oy = 0; oy < ph.out; ++oy) {
    for (int ox = 0; ox < pw.out; ++ox) {
      std::vector<std::int64_t> mulsum(cout, 0);
      std::int64_t xsum = 0;
      for (int ky = 0; ky < kh; ++ky) {
        for (int kx = 0; kx < kw; ++kx) {
          const int iy = oy * stride_h - ph.before + ky;
          const int ix = ox * stride_w - pw.before + kx;
          for (int ic = 0; ic < cin; ++ic) {
            const std::uint8_t xv = in_at(iy, ix, ic);
            xsum += xv;
            const std::size_t wbase =
                ((static_cast<std::size_t>(ky) * kw + kx) * cin + ic) * cout;
            for (int oc = 0; oc < cout; ++oc) {
              const std::uint8_t wv = weights.data[wbase + oc];
              mulsum[oc] += backend.mul(xv, wv);
              if (record) record->hit(xv, wv);
            }
          }
        }
      }
      for (int oc = 0; oc < cout; ++oc) {
        std::int64_t acc = mulsum[oc] - zw * xsum - zx64 * wsum[oc] + nk * zx64 * zw;
        if (!bias.empty()) acc += bias[oc];
        out.data[out_idx++] = saturate_i32(acc, saturated);
      }
    }
  }
  return out;
}

I32Tensor dense_q(const QTensor& input, const QTensor& weights,
                  const std::vector<std::int32_t>& bias, const MulBackend& backend,
                  const MulRecord* record, bool* saturated) {
  if (input.shape.size() != 1) throw std::invalid_argument("dense input must be flat");
  if (weights.shape.size() != 2) throw std::invalid_argument("dense weights must be [K,Out]");
  const auto k = static_cast<std::size_t>(input.shape[0]);
  const auto out_n = static_cast<std::size_t>(weights.shape[1]);
  if (static_cast<std::size_t>(weights.shape[0]) != k) {
    throw std::invalid_argument("dense weight rows must match input length");
  }
  if (!bias.empty() && bias.size() != out_n) throw std::invalid_argument("dense bias size mismatch");

  const std::int64_t zw = weights.qp.zero_point;
  const std::int64_t zx = input.qp.zero_point;

  std::int64_t xsum = 0;
  for (auto v : input.data) xsum += v;
  std::vector<std::int64_t> wsum(out_n, 0);
  std::vector<std::int64_t> mulsum(out_n, 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint8_t xv = input.data[i];
    const std::size_t wbase = i * out_n;
    for (std::size_t o = 0; o < out_n; ++o) {
      const std::uint8_t wv = weights.data[wbase + o];
      wsum[o] += wv;
      mulsum[o] += backend.mul(xv, wv);
      if (record) record->hit(xv, wv);
    }
  }

  I32Tensor out;
  out.shape = {static_cast<std::int64_t>(out_n)};
  out.data.resize(out_n);
  for (std::size_t o = 0; o < out_n; ++o) {
    std::int64_t acc = mulsum[o] - zw * xsum - zx * wsum[o] +
                       static_cast<std::int64_t>(k) * zx * zw;
    if (!bias.empty()) acc += bias[o];
    out.data[o] = saturate_i32(acc, saturated);
  }
  return out;
}

namespace {

QTensor run_relu(const QTensor& in) {
  QTensor out = in;
  const auto zp = static_cast<std::uint8_t>(in.qp.zero_point);
  for (auto& v : out.data) v = std::max(v, zp);
  return out;
}

QTensor run_maxpool2x2(const QTensor& in) {
  if (in.shape.size() != 3) throw std::invalid_argument("maxpool input must be [H,W,C]");
  const int h = static_cast<int>(in.shape[0]);
  const int w = static_cast<int>(in.shape[1]);
  const int c = static_cast<int>(in.shape[2]);
  QTensor out;
  out.qp = in.qp;
  out.shape = {h / 2, w / 2, c};
  out.data.resize(static_cast<std::size_t>(h / 2) * (w / 2) * c);
  std::size_t idx = 0;
  for (int oy = 0; oy < h / 2; ++oy) {
    for (int ox = 0; ox < w / 2; ++ox) {
      for (int ic = 0; ic < c; ++ic) {
        auto at = [&](int dy, int dx) {
          return in.data[(static_cast<std::size_t>(2 * oy + dy) * w + (2 * ox + dx)) * c + ic];
        };
        out.data[idx++] = std::max(std::max(at(0, 0), at(0, 1)), std::max(at(1, 0), at(1, 1)));
      }
    }
  }
  return out;
}

QTensor run_argmax(const QTensor& in) {
  if (in.data.empty()) throw std::invalid_argument("argmax input is empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < in.data.size(); ++i) {
    if (in.data[i] > in.data[best]) best = i;
  }
  QTensor out;
  out.shape = {1};
  out.qp = QParams{1.0, 0};
  out.data = {static_cast<std::uint8_t>(best)};
  return out;
}

}  // namespace

QTensor execute(const GraphModel& model, const QTensor& input, const MulBackend& backend,
                Recorder* recorder, ExecStats* stats) {
  model.validate();

  // Kahn toposort over node indices; cycles leave nodes unplaced.
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < model.nodes.size(); ++i) index[model.nodes[i].id] = i;
  std::vector<int> pending(model.nodes.size(), 0);
  std::vector<std::vector<std::size_t>> consumers(model.nodes.size());
  for (std::size_t i = 0; i < model.nodes.size(); ++i) {
    pending[i] = static_cast<int>(model.nodes[i].inputs.size());
    for (const auto& in : model.nodes[i].inputs) consumers[index.at(in)].push_back(i);
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < model.nodes.size(); ++i) {
    if (pending[i] == 0) order.push_back(i);
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (std::size_t next : consumers[order[head]]) {
      if (--pending[next] == 0) order.push_back(next);
    }
  }
  if (order.size() != model.nodes.size()) {
    throw std::invalid_argument("model graph contains a cycle");
  }

  std::unordered_map<std::string, QTensor> memo;
  for (std::size_t pos : order) {
    const LayerNode& node = model.nodes[pos];
    const QTensor* src = nullptr;
    if (!node.inputs.empty()) src = &memo.at(node.inputs[0]);

    QTensor result;
    switch (node.kind) {
      case LayerKind::Input: {
        if (input.shape != node.input_shape) {
          throw std::invalid_argument("input tensor shape does not match model input");
        }
        result = input;
        result.qp = node.out_qp;
        break;
      }
      case LayerKind::Conv2D:
      case LayerKind::Dense: {
        if (src == nullptr) throw std::invalid_argument(node.id + " has no input");
        QTensor weights;
        weights.shape = model.tensors.info(node.weights).shape;
        weights.data = model.tensors.u8(node.weights);
        weights.qp = node.weight_qp;
        std::vector<std::int32_t> bias;
        if (!node.bias.empty()) bias = model.tensors.i32(node.bias);
        MulRecord rec;
        if (recorder) rec = recorder->sinks_for(node.id);
        bool sat = false;
        I32Tensor acc =
            node.kind == LayerKind::Conv2D
                ? conv2d_q(*src, weights, bias, node.stride_h, node.stride_w, node.padding,
                           backend, recorder ? &rec : nullptr, &sat)
                : dense_q(*src, weights, bias, backend, recorder ? &rec : nullptr, &sat);
        if (stats && sat) stats->accumulator_saturated = true;
        const double eff = src->qp.scale * node.weight_qp.scale / node.out_qp.scale;
        result = requantize_tensor(acc, eff, node.out_qp);
        break;
      }
      case LayerKind::ReLU:
        result = run_relu(*src);
        break;
      case LayerKind::MaxPool2x2:
        result = run_maxpool2x2(*src);
        break;
      case LayerKind::Flatten: {
        result = *src;
        result.shape = {result.numel()};
        break;
      }
      case LayerKind::ArgMax:
        result = run_argmax(*src);
        break;
    }
    if (stats) ++stats->nodes_executed;
    memo.emplace(node.id, std::move(result));
  }
  return memo.at(model.output_id);
}

double accuracy_eval(const GraphModel& model, const Dataset& dataset, const MulBackend& backend,
                     std::size_t limit, Recorder* recorder) {
  const QParams in_qp = model.node(model.input_id).out_qp;
  const std::size_t count =
      limit == 0 ? dataset.size() : std::min<std::size_t>(limit, dataset.size());
  if (count == 0) throw std::invalid_argument("dataset is empty");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const QTensor sample = dataset.sample(i, in_qp);
    const QTensor out = execute(model, sample, backend, recorder);
    if (static_cast<std::int32_t>(out.data.at(0)) == dataset.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(count);
}

}  // namespace apxmul::qnn
