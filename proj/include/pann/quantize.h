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

#ifndef PANN_QUANTIZE_H_
#define PANN_QUANTIZE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pann {

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
};

// y = W x + b, optionally followed by ReLU. W is (outputs x inputs).
struct DenseLayer {
  Matrix weights;
  std::vector<double> bias;
  bool relu = false;

  std::size_t inputs() const { return weights.cols; }
  std::size_t outputs() const { return weights.rows; }
  // Throws ValidationError on shape mismatch.
  void Validate() const;
  std::vector<double> Apply(std::span<const double> x) const;
  std::vector<double> PreActivation(std::span<const double> x) const;
};

// W = W+ - W-, b = b+ - b-, with disjoint non-negative parts.
struct SplitLayer {
  Matrix w_plus;
  Matrix w_minus;
  std::vector<double> b_plus;
  std::vector<double> b_minus;
  bool relu = false;
};

SplitLayer SplitSigns(const DenseLayer& layer);

struct SplitOutputs {
  std::vector<double> y_plus;
  std::vector<double> y_minus;
};
// Pre-activation outputs of the two unsigned paths. x must be non-negative.
SplitOutputs ApplySplit(const SplitLayer& layer, std::span<const double> x);
// Throws ContractViolation on a length mismatch.
std::vector<double> Recombine(std::span<const double> y_plus,
                              std::span<const double> y_minus);

// Integer tensor with real scale: value_i = offset + gamma * q_i.
struct QuantizedTensor {
  std::vector<std::int64_t> q;
  double gamma = 1.0;
  double offset = 0.0;
  bool is_signed = false;
  std::vector<std::size_t> shape;
  double addition_factor = 0.0;  // ||q||_1 / d, meaningful for weights

  double Dequantize(std::size_t i) const { return offset + gamma * q[i]; }
  std::vector<double> Dequantized() const;
  std::int64_t MaxAbs() const;
};

// Rounding used by every quantizer in the library: half away from zero.
std::int64_t RoundHalfAway(double v);

// gamma = ||w||_1 / (r d), q = round(w / gamma). Throws DegenerateInput on an
// all-zero w and ContractViolation on r <= 0.
QuantizedTensor PannQuantizeWeights(std::span<const double> w, double r);

enum class QuantScope { kPerNeuron, kPerLayer };

// One tensor per output row. kPerLayer shares a single gamma computed from
// the whole matrix.
std::vector<QuantizedTensor> PannQuantizeRows(const Matrix& w, double r,
                                              QuantScope scope);

// step = (hi - lo) / 2^bits, q = clamp(round((x - lo) / step), 0, 2^bits - 1).
QuantizedTensor RuqQuantize(std::span<const double> x, int bits, double lo,
                            double hi);

// Signed weights over [-max_abs, max_abs]; q is shifted into
// [-2^(bits-1), 2^(bits-1) - 1] so that value = gamma * q.
QuantizedTensor RuqQuantizeSymmetric(std::span<const double> w, int bits,
                                     double max_abs);

// q_w-fold sum of q_x computed with an explicit loop. Throws
// ContractViolation on q_w < 0.
std::int64_t MulViaAdditions(std::int64_t q_w, std::int64_t q_x);

struct StorageReport {
  int b_r = 1;
  double activation_mem_factor = 0;
  double weight_mem_factor = 0;
  double latency_factor = 0;
};

// ceil(log2(m + 1)), at least 1.
int BitsForMagnitude(std::int64_t max_abs);

StorageReport MakeStorageReport(std::int64_t max_abs_q, int b_x_baseline,
                                int bx_tilde, double r);
StorageReport MakeStorageReport(const QuantizedTensor& qt, int b_x_baseline,
                                int bx_tilde, double r);

}  // namespace pann

#endif  // PANN_QUANTIZE_H_
