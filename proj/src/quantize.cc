// Copyright 2026 The PANN Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pann/quantize.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "pann/errors.h"

namespace pann {

void DenseLayer::Validate() const {
  if (weights.rows == 0 || weights.cols == 0) {
    throw ValidationError("layer has an empty weight matrix");
  }
  if (weights.data.size() != weights.rows * weights.cols) {
    throw ValidationError("weight storage does not match its shape");
  }
  if (bias.size() != weights.rows) {
    throw ValidationError(fmt::format("bias has {} entries, layer has {} outputs",
                                      bias.size(), weights.rows));
  }
}

std::vector<double> DenseLayer::PreActivation(std::span<const double> x) const {
  if (x.size() != inputs()) {
    throw ContractViolation(fmt::format("input has {} entries, layer expects {}",
                                        x.size(), inputs()));
  }
  std::vector<double> y(outputs());
  for (std::size_t o = 0; o < outputs(); ++o) {
    double acc = 0;
    const auto w = weights.row(o);
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
    y[o] = acc + bias[o];
  }
  return y;
}

std::vector<double> DenseLayer::Apply(std::span<const double> x) const {
  std::vector<double> y = PreActivation(x);
  if (relu) {
    for (double& v : y) v = std::max(v, 0.0);
  }
  return y;
}

SplitLayer SplitSigns(const DenseLayer& layer) {
  SplitLayer s;
  s.relu = layer.relu;
  s.w_plus = Matrix(layer.weights.rows, layer.weights.cols);
  s.w_minus = Matrix(layer.weights.rows, layer.weights.cols);
  for (std::size_t i = 0; i < layer.weights.data.size(); ++i) {
    const double w = layer.weights.data[i];
    s.w_plus.data[i] = std::max(w, 0.0);
    s.w_minus.data[i] = std::max(-w, 0.0);
  }
  for (double b : layer.bias) {
    s.b_plus.push_back(std::max(b, 0.0));
    s.b_minus.push_back(std::max(-b, 0.0));
  }
  return s;
}

SplitOutputs ApplySplit(const SplitLayer& layer, std::span<const double> x) {
  if (x.size() != layer.w_plus.cols) {
    throw ContractViolation("input length does not match the split layer");
  }
  for (double v : x) {
    if (v < 0) throw ContractViolation("unsigned paths need non-negative inputs");
  }
  SplitOutputs out;
  out.y_plus.resize(layer.w_plus.rows);
  out.y_minus.resize(layer.w_plus.rows);
  for (std::size_t o = 0; o < layer.w_plus.rows; ++o) {
    double p = 0;
    double m = 0;
    const auto wp = layer.w_plus.row(o);
    const auto wm = layer.w_minus.row(o);
    for (std::size_t i = 0; i < x.size(); ++i) {
      p += wp[i] * x[i];
      m += wm[i] * x[i];
    }
    out.y_plus[o] = p + layer.b_plus[o];
    out.y_minus[o] = m + layer.b_minus[o];
  }
  return out;
}

std::vector<double> Recombine(std::span<const double> y_plus,
                              std::span<const double> y_minus) {
  if (y_plus.size() != y_minus.size()) {
    throw ContractViolation(fmt::format("recombine of lengths {} and {}",
                                        y_plus.size(), y_minus.size()));
  }
  std::vector<double> y(y_plus.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = y_plus[i] - y_minus[i];
  return y;
}

std::vector<double> QuantizedTensor::Dequantized() const {
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = Dequantize(i);
  return out;
}

std::int64_t QuantizedTensor::MaxAbs() const {
  std::int64_t m = 0;
  for (std::int64_t v : q) m = std::max(m, std::abs(v));
  return m;
}

std::int64_t RoundHalfAway(double v) { return std::llround(v); }

namespace {

double L1(std::span<const double> w) {
  double s = 0;
  for (double v : w) s += std::abs(v);
  return s;
}

QuantizedTensor QuantizeWithStep(std::span<const double> w, double gamma) {
  QuantizedTensor t;
  t.gamma = gamma;
  t.shape = {w.size()};
  t.q.reserve(w.size());
  std::int64_t l1 = 0;
  for (double v : w) {
    const std::int64_t q = RoundHalfAway(v / gamma);
    t.q.push_back(q);
    l1 += std::abs(q);
    if (v < 0) t.is_signed = true;
  }
  t.addition_factor = static_cast<double>(l1) / static_cast<double>(w.size());
  return t;
}

void CheckR(double r) {
  if (!(r > 0) || !std::isfinite(r)) {
    throw ContractViolation(fmt::format("addition factor must be > 0, got {}", r));
  }
}

}  // namespace

QuantizedTensor PannQuantizeWeights(std::span<const double> w, double r) {
  CheckR(r);
  const double l1 = L1(w);
  if (w.empty() || l1 == 0) {
    throw DegenerateInput("cannot quantize an all-zero weight vector");
  }
  return QuantizeWithStep(w, l1 / (r * static_cast<double>(w.size())));
}

std::vector<QuantizedTensor> PannQuantizeRows(const Matrix& w, double r,
                                              QuantScope scope) {
  CheckR(r);
  std::vector<QuantizedTensor> rows;
  rows.reserve(w.rows);
  if (scope == QuantScope::kPerNeuron) {
    for (std::size_t o = 0; o < w.rows; ++o) {
      // A dead neuron keeps q = 0 rather than failing the whole layer.
      if (L1(w.row(o)) == 0) {
        rows.push_back(QuantizeWithStep(w.row(o), 1.0));
      } else {
        rows.push_back(PannQuantizeWeights(w.row(o), r));
      }
    }
    return rows;
  }
  const double l1 = L1(w.data);
  if (l1 == 0) throw DegenerateInput("cannot quantize an all-zero layer");
  const double gamma = l1 / (r * static_cast<double>(w.data.size()));
  for (std::size_t o = 0; o < w.rows; ++o) {
    rows.push_back(QuantizeWithStep(w.row(o), gamma));
  }
  return rows;
}

QuantizedTensor RuqQuantize(std::span<const double> x, int bits, double lo,
                            double hi) {
  if (bits < 1 || bits > 62) {
    throw ContractViolation(fmt::format("RUQ bits must be in [1, 62], got {}", bits));
  }
  if (!(lo < hi)) {
    throw ContractViolation(fmt::format("RUQ range needs lo < hi, got [{}, {}]", lo, hi));
  }
  const std::int64_t top = (std::int64_t{1} << bits) - 1;
  QuantizedTensor t;
  t.gamma = (hi - lo) / std::ldexp(1.0, bits);
  t.offset = lo;
  t.shape = {x.size()};
  t.q.reserve(x.size());
  for (double v : x) {
    t.q.push_back(std::clamp(RoundHalfAway((v - lo) / t.gamma),
                             std::int64_t{0}, top));
  }
  return t;
}

QuantizedTensor RuqQuantizeSymmetric(std::span<const double> w, int bits,
                                     double max_abs) {
  if (!(max_abs > 0)) {
    throw DegenerateInput("symmetric RUQ needs a positive range");
  }
  QuantizedTensor t = RuqQuantize(w, bits, -max_abs, max_abs);
  const std::int64_t half = std::int64_t{1} << (bits - 1);
  std::int64_t l1 = 0;
  for (std::int64_t& q : t.q) {
    q -= half;
    l1 += std::abs(q);
  }
  // -max_abs + gamma * (q + half) == gamma * q since gamma * half == max_abs.
  t.offset = 0;
  t.is_signed = true;
  t.addition_factor = w.empty() ? 0 : static_cast<double>(l1) / w.size();
  return t;
}

std::int64_t MulViaAdditions(std::int64_t q_w, std::int64_t q_x) {
  if (q_w < 0) {
    throw ContractViolation(fmt::format(
        "repeated addition needs a non-negative count, got {}", q_w));
  }
  std::int64_t acc = 0;
  for (std::int64_t i = 0; i < q_w; ++i) acc += q_x;
  return acc;
}

int BitsForMagnitude(std::int64_t max_abs) {
  if (max_abs < 0) max_abs = -max_abs;
  return std::max(1, static_cast<int>(
                         std::bit_width(static_cast<std::uint64_t>(max_abs))));
}

StorageReport MakeStorageReport(std::int64_t max_abs_q, int b_x_baseline,
                                int bx_tilde, double r) {
  if (b_x_baseline < 1 || bx_tilde < 1) {
    throw ContractViolation("bit widths must be positive");
  }
  StorageReport s;
  s.b_r = BitsForMagnitude(max_abs_q);
  s.activation_mem_factor = static_cast<double>(bx_tilde) / b_x_baseline;
  s.weight_mem_factor = static_cast<double>(s.b_r) / b_x_baseline;
  s.latency_factor = r;
  return s;
}

StorageReport MakeStorageReport(const QuantizedTensor& qt, int b_x_baseline,
                                int bx_tilde, double r) {
  return MakeStorageReport(qt.MaxAbs(), b_x_baseline, bx_tilde, r);
}

}  // namespace pann
