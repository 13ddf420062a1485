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
#include "apxmul/distribution.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace apxmul {

namespace {

void check_width(int bit_width) {
  if (bit_width < 1 || bit_width > 16) {
    throw std::invalid_argument("bit width must be in [1, 16]");
  }
}

std::vector<double> smoothed_marginal(const Histogram& h, double alpha) {
  if (alpha < 0) throw std::invalid_argument("alpha must be non-negative");
  const std::size_t size = h.counts.size();
  const double denom = static_cast<double>(h.total()) + alpha * static_cast<double>(size);
  if (denom <= 0) {
    throw std::invalid_argument("empty histogram with alpha = 0 has no distribution");
  }
  std::vector<double> p(size);
  for (std::size_t i = 0; i < size; ++i) {
    p[i] = (static_cast<double>(h.counts[i]) + alpha) / denom;
  }
  return p;
}

}  // namespace

Histogram Histogram::zeros(int bit_width) {
  check_width(bit_width);
  Histogram h;
  h.bit_width = bit_width;
  h.counts.assign(std::size_t{1} << bit_width, 0);
  return h;
}

std::uint64_t Histogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

void Histogram::add(std::uint32_t value, std::uint64_t count) {
  counts.at(value) += count;
}

void Histogram::merge(const Histogram& other) {
  if (other.bit_width != bit_width) {
    throw std::invalid_argument("cannot merge histograms of different widths");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

std::uint32_t histogram_mode(const Histogram& h) {
  if (h.counts.empty()) throw std::invalid_argument("empty histogram");
  std::size_t best = 0;
  for (std::size_t i = 1; i < h.counts.size(); ++i) {
    if (h.counts[i] > h.counts[best]) best = i;
  }
  return static_cast<std::uint32_t>(best);
}

nlohmann::json histogram_to_json(const Histogram& h) {
  return {{"bit_width", h.bit_width}, {"counts", h.counts}};
}

Histogram histogram_from_json(const nlohmann::json& j) {
  Histogram h;
  h.bit_width = j.at("bit_width").get<int>();
  check_width(h.bit_width);
  const auto& counts = j.at("counts");
  if (counts.size() != (std::size_t{1} << h.bit_width)) {
    throw std::invalid_argument("histogram counts length must be 2^bit_width");
  }
  for (const auto& c : counts) {
    if (c.is_number_integer() && c.get<std::int64_t>() < 0) {
      throw std::invalid_argument("histogram counts must be non-negative");
    }
    h.counts.push_back(c.get<std::uint64_t>());
  }
  return h;
}

std::string histogram_to_csv(const Histogram& h) {
  std::ostringstream out;
  out << "value,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << i << "," << h.counts[i] << "\n";
  }
  return out.str();
}

OperandDistribution OperandDistribution::uniform(int n, int m) {
  check_width(n);
  check_width(m);
  OperandDistribution d;
  d.kind_ = Kind::Uniform;
  d.n_ = n;
  d.m_ = m;
  return d;
}

OperandDistribution OperandDistribution::product_joint(const Histogram& px, const Histogram& py,
                                                       double alpha) {
  OperandDistribution d;
  d.kind_ = Kind::Product;
  d.n_ = px.bit_width;
  d.m_ = py.bit_width;
  check_width(d.n_);
  check_width(d.m_);
  d.px_ = smoothed_marginal(px, alpha);
  d.py_ = smoothed_marginal(py, alpha);
  return d;
}

OperandDistribution OperandDistribution::joint(int n, int m, std::vector<double> weights) {
  check_width(n);
  check_width(m);
  const std::size_t expected = (std::size_t{1} << n) * (std::size_t{1} << m);
  if (weights.size() != expected) {
    throw std::invalid_argument("joint weight matrix has the wrong size");
  }
  double sum = 0;
  for (double w : weights) {
    if (w < 0 || !std::isfinite(w)) {
      throw std::invalid_argument("joint weights must be finite and non-negative");
    }
    sum += w;
  }
  if (sum <= 0) throw std::invalid_argument("joint weights sum to zero");
  for (double& w : weights) w /= sum;
  OperandDistribution d;
  d.kind_ = Kind::Joint;
  d.n_ = n;
  d.m_ = m;
  d.joint_ = std::move(weights);
  return d;
}

double OperandDistribution::probability(std::uint32_t x, std::uint32_t y) const {
  switch (kind_) {
    case Kind::Uniform:
      return 1.0 / (static_cast<double>(x_count()) * static_cast<double>(y_count()));
    case Kind::Product:
      return px_.at(x) * py_.at(y);
    case Kind::Joint:
      return joint_.at((static_cast<std::size_t>(x) << m_) | y);
  }
  return 0;
}

double OperandDistribution::marginal_x(std::uint32_t x) const {
  switch (kind_) {
    case Kind::Uniform:
      return 1.0 / static_cast<double>(x_count());
    case Kind::Product:
      return px_.at(x);
    case Kind::Joint: {
      double s = 0;
      for (std::size_t y = 0; y < y_count(); ++y) {
        s += joint_[(static_cast<std::size_t>(x) << m_) | y];
      }
      return s;
    }
  }
  return 0;
}

double OperandDistribution::marginal_y(std::uint32_t y) const {
  switch (kind_) {
    case Kind::Uniform:
      return 1.0 / static_cast<double>(y_count());
    case Kind::Product:
      return py_.at(y);
    case Kind::Joint: {
      double s = 0;
      for (std::size_t x = 0; x < x_count(); ++x) {
        s += joint_[(x << m_) | y];
      }
      return s;
    }
  }
  return 0;
}

const std::vector<double>& OperandDistribution::product_px() const {
  if (kind_ != Kind::Product) throw std::logic_error("not a product distribution");
  return px_;
}

const std::vector<double>& OperandDistribution::product_py() const {
  if (kind_ != Kind::Product) throw std::logic_error("not a product distribution");
  return py_;
}

nlohmann::json distribution_to_json(const OperandDistribution& d) {
  switch (d.kind()) {
    case OperandDistribution::Kind::Uniform:
      return {{"kind", "uniform"}, {"n", d.n()}, {"m", d.m()}};
    case OperandDistribution::Kind::Product:
      return {{"kind", "product"}, {"n", d.n()}, {"m", d.m()},
              {"px", d.px_}, {"py", d.py_}};
    case OperandDistribution::Kind::Joint:
      return {{"kind", "joint"}, {"n", d.n()}, {"m", d.m()}, {"probs", d.joint_}};
  }
  throw std::logic_error("unreachable");
}

OperandDistribution distribution_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  if (kind == "uniform") return OperandDistribution::uniform(n, m);
  if (kind == "joint") {
    return OperandDistribution::joint(n, m, j.at("probs").get<std::vector<double>>());
  }
  if (kind == "product") {
    // Stored marginals are already smoothed probabilities; rebuild via joint
    // of the outer product to revalidate, then keep the product form.
    auto px = j.at("px").get<std::vector<double>>();
    auto py = j.at("py").get<std::vector<double>>();
    if (px.size() != (std::size_t{1} << n) || py.size() != (std::size_t{1} << m)) {
      throw std::invalid_argument("product marginal size mismatch");
    }
    OperandDistribution d;
    d.kind_ = OperandDistribution::Kind::Product;
    d.n_ = n;
    d.m_ = m;
    double sx = 0, sy = 0;
    for (double v : px) {
      if (v < 0 || !std::isfinite(v)) throw std::invalid_argument("bad marginal value");
      sx += v;
    }
    for (double v : py) {
      if (v < 0 || !std::isfinite(v)) throw std::invalid_argument("bad marginal value");
      sy += v;
    }
    if (std::abs(sx - 1.0) > 1e-9 || std::abs(sy - 1.0) > 1e-9) {
      throw std::invalid_argument("product marginals must sum to 1");
    }
    d.px_ = std::move(px);
    d.py_ = std::move(py);
    return d;
  }
  throw std::invalid_argument("unknown distribution kind: " + kind);
}

}  // namespace apxmul
