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
#ifndef APXMUL_QNN_TENSOR_HPP_
#define APXMUL_QNN_TENSOR_HPP_

#include <cstdint>
#include <numeric>
#include <vector>

namespace apxmul::qnn {

// Affine quantization parameters: real = scale * (q - zero_point).
struct QParams {
  double scale = 1.0;
  int zero_point = 0;
};

struct QTensor {
  std::vector<std::int64_t> shape;
  std::vector<std::uint8_t> data;
  QParams qp;

  std::int64_t numel() const {
    std::int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }
};

// 32-bit accumulator tensor produced by the integer conv/dense kernels.
struct I32Tensor {
  std::vector<std::int64_t> shape;
  std::vector<std::int32_t> data;
};

// A positive real scale as an int32 multiplier in [2^30, 2^31) and a base-2
// exponent: scale = multiplier * 2^(exponent - 31).
struct FixedPointScale {
  std::int32_t multiplier = 0;
  int exponent = 0;
};

FixedPointScale quantize_multiplier(double scale);

// clamp(round_half_away_from_zero(acc * scale) + zero_point, 0, 255), with
// the product realized as (acc * multiplier) >> (31 - exponent).
std::uint8_t requantize_value(std::int32_t acc, const FixedPointScale& scale, int out_zero_point);

QTensor requantize_tensor(const I32Tensor& acc, double effective_scale, QParams out_qp);

}  // namespace apxmul::qnn

#endif  // APXMUL_QNN_TENSOR_HPP_
