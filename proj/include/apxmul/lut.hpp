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
#ifndef APXMUL_LUT_HPP_
#define APXMUL_LUT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "apxmul/distribution.hpp"
#include "apxmul/ppmatrix.hpp"

namespace apxmul {

// Tabulated multiplier outputs for every operand pair, x-major. Entries are
// clamped to 2^(n+m) - 1; `saturated` records whether the clamp ever fired
// while building (in-memory metadata only, not persisted).
struct MultiplierLUT {
  int n = 0;
  int m = 0;
  std::vector<std::uint32_t> entries;
  bool saturated = false;

  std::uint32_t max_entry() const {
    return static_cast<std::uint32_t>((std::uint64_t{1} << (n + m)) - 1);
  }
  std::size_t index(std::uint32_t x, std::uint32_t y) const {
    return (static_cast<std::size_t>(x) << m) | y;
  }
  std::uint32_t at(std::uint32_t x, std::uint32_t y) const { return entries[index(x, y)]; }
};

MultiplierLUT build_lut(const SearchSpace& space, const ThetaVector& theta);
MultiplierLUT exact_lut(int n, int m);

// Error metrics of a LUT against the exact product, weighted by dist:
// expected squared error, mean absolute error, the probability of a nonzero
// error, and the maximum absolute error over pairs with nonzero probability.
struct LutErrorStats {
  double expected_sq_error = 0;
  double mean_abs_error = 0;
  double error_rate = 0;
  double max_abs_error = 0;
};

LutErrorStats error_stats(const MultiplierLUT& lut, const OperandDistribution& dist);

// Binary layout: 16-byte header [magic "AMLUT1\0\0", u8 n, u8 m,
// u16 entry_bits LE, 4 zero bytes], then 2^n * 2^m little-endian entries of
// ceil((n+m)/8) bytes each, x-major.
void save_lut(const MultiplierLUT& lut, const std::filesystem::path& path);
// Throws std::runtime_error on bad magic, bad header fields, or truncation.
MultiplierLUT load_lut(const std::filesystem::path& path);

}  // namespace apxmul

#endif  // APXMUL_LUT_HPP_
