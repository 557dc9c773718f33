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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "pann/errors.h"
#include "pann/quantize.h"

using namespace pann;

namespace {

DenseLayer MakeLayer(std::size_t out, std::size_t in, std::vector<double> w, std::vector<double> b) {
  DenseLayer l;
  l.weights = Matrix(out, in);
  l.weights.data = std::move(w);
  l.bias = std::move(b);
  return l;
}

}  // namespace

TEST_CASE("split of a small signed layer") {
  const SplitLayer s = SplitSigns(MakeLayer(1, 2, {1, -2}, {-3}));
  CHECK(s.w_plus.data == std::vector<double>{1, 0});
  CHECK(s.w_minus.data == std::vector<double>{0, 2});
  CHECK(s.b_plus == std::vector<double>{0});
  CHECK(s.b_minus == std::vector<double>{3});
}

TEST_CASE("split of an all-positive layer has an empty negative part") {
  const SplitLayer s = SplitSigns(MakeLayer(2, 2, {1, 2, 3, 4}, {1, 1}));
  for (double v : s.w_minus.data) CHECK(v == 0);
}

TEST_CASE("split invariants hold on random layers") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 100; ++t) {
    DenseLayer l = MakeLayer(5, 7, std::vector<double>(35), std::vector<double>(5));
    for (double& v : l.weights.data) v = n(rng);
    for (double& v : l.bias) v = n(rng);
    const SplitLayer s = SplitSigns(l);
    for (std::size_t i = 0; i < l.weights.data.size(); ++i) {
      REQUIRE(s.w_plus.data[i] - s.w_minus.data[i] == l.weights.data[i]);
      REQUIRE(s.w_plus.data[i] * s.w_minus.data[i] == 0);
      REQUIRE(s.w_plus.data[i] >= 0);
    }
    for (std::size_t i = 0; i < l.bias.size(); ++i) {
      REQUIRE(s.b_plus[i] - s.b_minus[i] == l.bias[i]);
    }
  }
}

TEST_CASE("recombine") {
  const std::vector<double> y{1.5, -2, 3};
  CHECK(Recombine(y, std::vector<double>(3, 0.0)) == y);
  CHECK_THROWS_AS(Recombine(y, std::vector<double>(2, 0.0)), ContractViolation);
}

TEST_CASE("split then recombine is exact on small integer layers") {
  // Every 1x2 layer with 3-bit signed weights and bias, every 2-bit input.
  for (int w0 = -4; w0 < 4; ++w0) {
    for (int w1 = -4; w1 < 4; ++w1) {
      for (int b = -4; b < 4; ++b) {
        const DenseLayer l = MakeLayer(1, 2, {double(w0), double(w1)}, {double(b)});
        const SplitLayer s = SplitSigns(l);
        for (int x0 = 0; x0 < 4; ++x0) {
          for (int x1 = 0; x1 < 4; ++x1) {
            const std::vector<double> x{double(x0), double(x1)};
            const SplitOutputs o = ApplySplit(s, x);
            REQUIRE(Recombine(o.y_plus, o.y_minus)[0] == double(w0 * x0 + w1 * x1 + b));
          }
        }
      }
    }
  }
}

TEST_CASE("split then recombine on float layers is within 1e-9 relative") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    DenseLayer l = MakeLayer(8, 16, std::vector<double>(128), std::vector<double>(8));
    for (double& v : l.weights.data) v = n(rng);
    for (double& v : l.bias) v = n(rng);
    std::vector<double> x(16);
    for (double& v : x) v = u(rng);
    const std::vector<double> direct = l.PreActivation(x);
    const SplitOutputs o = ApplySplit(SplitSigns(l), x);
    const std::vector<double> y = Recombine(o.y_plus, o.y_minus);
    double norm = 0;
    for (double v : direct) norm = std::max(norm, std::abs(v));
    for (std::size_t i = 0; i < y.size(); ++i) {
      REQUIRE(std::abs(y[i] - direct[i]) <= 1e-9 * norm);
    }
  }
}

TEST_CASE("split paths reject negative inputs") {
  const SplitLayer s = SplitSigns(MakeLayer(1, 2, {1, -2}, {0}));
  CHECK_THROWS_AS(ApplySplit(s, std::vector<double>{1, -1}), ContractViolation);
}

TEST_CASE("pann quantizer on the grid") {
  const double g = 0.37;
  const std::vector<double> w{g, 2 * g, 3 * g};
  const QuantizedTensor q = PannQuantizeWeights(w, 2.0);
  CHECK(q.q == std::vector<std::int64_t>{1, 2, 3});
  CHECK(q.addition_factor == 2.0);
  CHECK(q.gamma == doctest::Approx(g));
  CHECK(std::abs(q.addition_factor - 2.0) <= double(q.MaxAbs()) / w.size());
}

TEST_CASE("pann quantizer symmetric case") {
  const QuantizedTensor q = PannQuantizeWeights(std::vector<double>{-0.5, 0.5}, 1.0);
  CHECK(q.gamma == 0.5);
  CHECK(q.q == std::vector<std::int64_t>{-1, 1});
  CHECK(q.is_signed);
}

TEST_CASE("pann quantizer errors") {
  CHECK_THROWS_AS(PannQuantizeWeights(std::vector<double>{0, 0, 0}, 1.0), DegenerateInput);
  CHECK_THROWS_AS(PannQuantizeWeights(std::vector<double>{1, 2}, 0.0), ContractViolation);
}

TEST_CASE("pann addition factor on uniform weights") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> w(1024);
  for (double& v : w) v = u(rng);
  const QuantizedTensor q = PannQuantizeWeights(w, 2.0);
  CHECK(q.addition_factor >= 1.9);
  CHECK(q.addition_factor <= 2.1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(q.Dequantize(i) == doctest::Approx(q.gamma * q.q[i]));
  }
}

TEST_CASE("addition factor stays within the rounding slack and converges") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (double r : {1.0, 2.0, 2.5, 4.0, 7.0}) {
    double mean_gap = 0;
    const int reps = 50;
    for (int t = 0; t < reps; ++t) {
      std::vector<double> w(4096);
      for (double& v : w) v = u(rng);
      const QuantizedTensor q = PannQuantizeWeights(w, r);
      CHECK(std::abs(q.addition_factor - r) <= 0.5);
      mean_gap += (q.addition_factor - r) / reps;
    }
    INFO("R = " << r);
    CHECK(std::abs(mean_gap) <= 0.02 * r);
  }
}

TEST_CASE("pann weight error is uniform over half a step") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> w(1 << 16);
  for (double& v : w) v = n(rng);
  for (double r : {1.0, 2.0, 4.0}) {
    const QuantizedTensor q = PannQuantizeWeights(w, r);
    double m2 = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double e = w[i] - q.gamma * q.q[i];
      REQUIRE(std::abs(e) <= q.gamma / 2 + 1e-12);
      m2 += e * e;
    }
    m2 /= w.size();
    CHECK(std::abs(m2 - q.gamma * q.gamma / 12) <= 0.10 * q.gamma * q.gamma / 12);
  }
}

TEST_CASE("per-layer scope shares one step") {
  Matrix m(2, 2);
  m.data = {1, 2, 3, 4};
  const auto rows = PannQuantizeRows(m, 1.0, QuantScope::kPerLayer);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].gamma == rows[1].gamma);
  CHECK(rows[0].gamma == doctest::Approx(10.0 / 4));
  const auto neuron = PannQuantizeRows(m, 1.0, QuantScope::kPerNeuron);
  CHECK(neuron[0].gamma == doctest::Approx(1.5));
  CHECK(neuron[1].gamma == doctest::Approx(3.5));
  Matrix dead(2, 2);
  dead.data = {0, 0, 1, 1};
  CHECK(PannQuantizeRows(dead, 1.0, QuantScope::kPerNeuron)[0].MaxAbs() == 0);
}

TEST_CASE("ruq boundary and regression vectors") {
  CHECK(RuqQuantize(std::vector<double>{1.0}, 4, 0, 1).q[0] == 15);
  const QuantizedTensor t = RuqQuantize(std::vector<double>{0.4}, 1, 0, 1);
  CHECK(t.q[0] == 1);
  CHECK(t.Dequantize(0) == 0.5);
  CHECK(RuqQuantize(std::vector<double>{-3.0}, 3, -1, 1).q[0] == 0);
  CHECK_THROWS_AS(RuqQuantize(std::vector<double>{0.0}, 4, 1, 1), ContractViolation);
  CHECK_THROWS_AS(RuqQuantize(std::vector<double>{0.0}, 0, 0, 1), ContractViolation);
}

TEST_CASE("ruq error on uniform data") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(400000);
  for (double& v : x) v = u(rng);
  const int bits = 4;
  const QuantizedTensor t = RuqQuantize(x, bits, 0, 1);
  const double s = t.gamma;
  double interior = 0, all = 0;
  std::size_t n_interior = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = x[i] - t.Dequantize(i);
    all += e * e;
    if (t.q[i] > 0 && t.q[i] < 15) {
      interior += e * e;
      ++n_interior;
    }
  }
  interior /= n_interior;
  all /= x.size();
  CHECK(std::abs(interior - s * s / 12) <= 0.05 * s * s / 12);
  // Half-width bottom cell, 1.5-wide top cell: second moment 38/384 s^2.
  CHECK(std::abs(all - 38.0 / 384 * s * s) <= 0.02 * 38.0 / 384 * s * s);
}

TEST_CASE("symmetric ruq") {
  const std::vector<double> w{-1.0, -0.3, 0.0, 0.49, 1.0};
  const QuantizedTensor t = RuqQuantizeSymmetric(w, 3, 1.0);
  CHECK(t.gamma == 0.25);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(t.q[i] >= -4);
    CHECK(t.q[i] <= 3);
    CHECK(t.Dequantize(i) == t.gamma * t.q[i]);
  }
  CHECK(t.q.front() == -4);
  CHECK(t.q.back() == 3);
}

TEST_CASE("multiplication by repeated addition") {
  CHECK(MulViaAdditions(3, 7) == 21);
  CHECK(MulViaAdditions(0, 12345) == 0);
  for (std::int64_t a = 0; a < 64; ++a) {
    for (std::int64_t b = -128; b < 128; ++b) REQUIRE(MulViaAdditions(a, b) == a * b);
  }
  CHECK_THROWS_AS(MulViaAdditions(-1, 3), ContractViolation);
}

TEST_CASE("pann dot product equals the integer inner product") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0, 1);
  std::uniform_int_distribution<std::int64_t> xd(0, 63);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> w(64);
    for (double& v : w) v = n(rng);
    const QuantizedTensor q = PannQuantizeWeights(w, 3.0);
    std::int64_t direct = 0, plus = 0, minus = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::int64_t x = xd(rng);
      direct += q.q[i] * x;
      if (q.q[i] >= 0) {
        plus += MulViaAdditions(q.q[i], x);
      } else {
        minus += MulViaAdditions(-q.q[i], x);
      }
    }
    REQUIRE(plus - minus == direct);
  }
}

TEST_CASE("storage report") {
  const StorageReport a = MakeStorageReport(7, 2, 6, 1.16);
  CHECK(a.b_r == 3);
  CHECK(a.activation_mem_factor == 3);
  CHECK(a.weight_mem_factor == 1.5);
  CHECK(a.latency_factor == 1.16);
  CHECK(MakeStorageReport(1, 2, 6, 1).b_r == 1);
  CHECK(MakeStorageReport(7, 4, 7, 2.9).activation_mem_factor == 1.75);
  CHECK(BitsForMagnitude(0) == 1);
  CHECK(BitsForMagnitude(8) == 4);
  CHECK(BitsForMagnitude(-15) == 4);
  QuantizedTensor qt;
  qt.q = {1, -5, 2};
  CHECK(MakeStorageReport(qt, 2, 2, 1).b_r == 3);
}
