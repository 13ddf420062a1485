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
#include "apxmul/qnn/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace apxmul::qnn {

FixedPointScale quantize_multiplier(double scale) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    throw std::invalid_argument("scale must be positive and finite");
  }
  int exponent = 0;
  const double fraction = std::frexp(scale, &exponent);  // in [0.5, 1)
  auto multiplier = static_cast<std::int64_t>(std::llround(fraction * (1ll << 31)));
  if (multiplier == (1ll << 31)) {
    multiplier >>= 1;
    ++exponent;
  }
  return FixedPointScale{static_cast<std::int32_t>(multiplier), exponent};
}

std::uint8_t requantize_value(std::int32_t acc, const FixedPointScale& scale,
                              int out_zero_point) {
  const std::int64_t prod = static_cast<std::int64_t>(acc) * scale.multiplier;
  const int shift = 31 - scale.exponent;
  std::int64_t scaled;
  if (shift <= 0) {
    scaled = prod << (-shift);
  } else if (shift > 62) {
    scaled = 0;  // |prod| < 2^62, rounds to zero
  } else {
    const std::int64_t bias = std::int64_t{1} << (shift - 1);
    scaled = prod >= 0 ? (prod + bias) >> shift : -((-prod + bias) >> shift);
  }
  const std::int64_t shifted = scaled + out_zero_point;
  if (shifted < 0) return 0;
  if (shifted > 255) return 255;
  return static_cast<std::uint8_t>(shifted);
}

QTensor requantize_tensor(const I32Tensor& acc, double effective_scale, QParams out_qp) {
  const FixedPointScale fp = quantize_multiplier(effective_scale);
  QTensor out;
  out.shape = acc.shape;
  out.qp = out_qp;
  out.data.resize(acc.data.size());
  for (std::size_t i = 0; i < acc.data.size(); ++i) {
    out.data[i] = requantize_value(acc.data[i], fp, out_qp.zero_point);
  }
  return out;
}

}  // namespace apxmul::qnn
