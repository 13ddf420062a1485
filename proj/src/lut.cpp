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
#include "apxmul/lut.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace apxmul {

namespace {

constexpr std::array<char, 8> kMagic = {'A', 'M', 'L', 'U', 'T', '1', '\0', '\0'};

struct KahanSum {
  double sum = 0;
  double c = 0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

MultiplierLUT build_lut(const SearchSpace& space, const ThetaVector& theta) {
  MultiplierLUT lut;
  lut.n = space.n;
  lut.m = space.m;
  const std::uint64_t bound = lut.max_entry();
  lut.entries.resize(std::size_t{1} << (space.n + space.m));
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << space.n); ++x) {
    for (std::uint32_t y = 0; y < (std::uint32_t{1} << space.m); ++y) {
      std::uint64_t f = evaluate(space, theta, x, y);
      if (f > bound) {
        f = bound;
        lut.saturated = true;
      }
      lut.entries[lut.index(x, y)] = static_cast<std::uint32_t>(f);
    }
  }
  return lut;
}

MultiplierLUT exact_lut(int n, int m) {
  if (n < 1 || m < 1 || n > 16 || m > 16) {
    throw std::invalid_argument("operand widths must be in [1, 16]");
  }
  MultiplierLUT lut;
  lut.n = n;
  lut.m = m;
  lut.entries.resize(std::size_t{1} << (n + m));
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << n); ++x) {
    for (std::uint32_t y = 0; y < (std::uint32_t{1} << m); ++y) {
      lut.entries[lut.index(x, y)] = static_cast<std::uint32_t>(exact_multiply(x, y));
    }
  }
  return lut;
}

LutErrorStats error_stats(const MultiplierLUT& lut, const OperandDistribution& dist) {
  if (dist.n() != lut.n || dist.m() != lut.m) {
    throw std::invalid_argument("distribution widths do not match LUT");
  }
  LutErrorStats stats;
  KahanSum sq, abs_sum, rate;
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << lut.n); ++x) {
    for (std::uint32_t y = 0; y < (std::uint32_t{1} << lut.m); ++y) {
      const double p = dist.probability(x, y);
      const double e = static_cast<double>(exact_multiply(x, y)) -
                       static_cast<double>(lut.at(x, y));
      const double ae = std::abs(e);
      sq.add(p * e * e);
      abs_sum.add(p * ae);
      if (ae != 0 && p > 0) {
        rate.add(p);
        stats.max_abs_error = std::max(stats.max_abs_error, ae);
      }
    }
  }
  stats.expected_sq_error = sq.sum;
  stats.mean_abs_error = abs_sum.sum;
  stats.error_rate = rate.sum;
  return stats;
}

void save_lut(const MultiplierLUT& lut, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  const auto n8 = static_cast<unsigned char>(lut.n);
  const auto m8 = static_cast<unsigned char>(lut.m);
  out.put(static_cast<char>(n8));
  out.put(static_cast<char>(m8));
  const std::uint16_t entry_bits = static_cast<std::uint16_t>(lut.n + lut.m);
  out.put(static_cast<char>(entry_bits & 0xff));
  out.put(static_cast<char>(entry_bits >> 8));
  for (int i = 0; i < 4; ++i) out.put('\0');
  const std::size_t entry_bytes = (static_cast<std::size_t>(entry_bits) + 7) / 8;
  for (std::uint32_t v : lut.entries) {
    for (std::size_t b = 0; b < entry_bytes; ++b) {
      out.put(static_cast<char>((v >> (8 * b)) & 0xff));
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

MultiplierLUT load_lut(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 16> header{};
  in.read(header.data(), header.size());
  if (in.gcount() != 16) throw std::runtime_error("truncated LUT header: " + path.string());
  if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
    throw std::runtime_error("bad LUT magic: " + path.string());
  }
  MultiplierLUT lut;
  lut.n = static_cast<unsigned char>(header[8]);
  lut.m = static_cast<unsigned char>(header[9]);
  const std::uint16_t entry_bits =
      static_cast<std::uint16_t>(static_cast<unsigned char>(header[10]) |
                                 (static_cast<unsigned char>(header[11]) << 8));
  if (lut.n < 1 || lut.n > 16 || lut.m < 1 || lut.m > 16 ||
      entry_bits != static_cast<std::uint16_t>(lut.n + lut.m)) {
    throw std::runtime_error("bad LUT header fields: " + path.string());
  }
  const std::size_t entry_bytes = (static_cast<std::size_t>(entry_bits) + 7) / 8;
  const std::size_t count = std::size_t{1} << (lut.n + lut.m);
  std::vector<char> payload(count * entry_bytes);
  in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (static_cast<std::size_t>(in.gcount()) != payload.size()) {
    throw std::runtime_error("truncated LUT payload: " + path.string());
  }
  in.peek();
  if (!in.eof()) throw std::runtime_error("trailing bytes after LUT payload: " + path.string());
  lut.entries.resize(count);
  const std::uint64_t bound = lut.max_entry();
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t v = 0;
    for (std::size_t b = 0; b < entry_bytes; ++b) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(payload[i * entry_bytes + b]))
           << (8 * b);
    }
    if (v > bound) throw std::runtime_error("LUT entry exceeds output width: " + path.string());
    lut.entries[i] = v;
  }
  return lut;
}

}  // namespace apxmul
