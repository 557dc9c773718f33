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

#include "pann/toggle_sim.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "pann/errors.h"
#include "pann/rng.h"

namespace pann {

// Core widths above this would overflow the 2*core-bit product scratch.
constexpr int kMaxCoreWidth = 31;

std::string_view ToString(MultiplierKind kind) {
  return kind == MultiplierKind::kBoothRadix2 ? "booth" : "serial";
}

std::string_view ToString(Distribution dist) {
  return dist == Distribution::kUniform ? "uniform" : "gaussian";
}

ToggleTally& ToggleTally::operator+=(const ToggleTally& o) {
  mult_input_a += o.mult_input_a;
  mult_input_b += o.mult_input_b;
  mult_internal += o.mult_internal;
  acc_input += o.acc_input;
  acc_sum += o.acc_sum;
  ff += o.ff;
  return *this;
}

ToggleReport ToggleReport::FromTally(const ToggleTally& t,
                                     std::uint64_t ops) {
  ToggleReport r;
  r.operations = ops;
  if (ops == 0) return r;
  const double n = static_cast<double>(ops);
  r.mult_input_a = t.mult_input_a / n;
  r.mult_input_b = t.mult_input_b / n;
  r.mult_internal = t.mult_internal / n;
  r.acc_input = t.acc_input / n;
  r.acc_sum = t.acc_sum / n;
  r.ff = t.ff / n;
  r.mult_total = (t.mult_input_a + t.mult_input_b + t.mult_internal) / n;
  r.acc_total = (t.acc_input + t.acc_sum + t.ff) / n;
  r.total = t.total() / n;
  return r;
}

RippleSum RippleCarryAdd(std::uint64_t a, std::uint64_t b, int width) {
  RippleSum out;
  std::uint64_t carry = 0;
  for (int i = 0; i < width; ++i) {
    const std::uint64_t ai = (a >> i) & 1u;
    const std::uint64_t bi = (b >> i) & 1u;
    out.sum |= (ai ^ bi ^ carry) << i;
    carry = (ai & bi) | (ai & carry) | (bi & carry);
    out.carries |= carry << i;
  }
  return out;
}

std::vector<int> BoothDigits(std::int64_t y, int width) {
  std::vector<int> d(width);
  std::int64_t prev = 0;
  for (int i = 0; i < width; ++i) {
    const std::int64_t yi = (y >> i) & 1;
    d[i] = static_cast<int>(prev - yi);
    prev = yi;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Accumulator

Accumulator::Accumulator(int width, bool is_signed)
    : width_(width), is_signed_(is_signed) {
  input_ = EncodeWord(0, width, is_signed);
  reg_ = input_;
}

ToggleTally Accumulator::Drive(const Word& addend) {
  if (addend.is_signed != is_signed_) {
    throw ContractViolation("accumulator addend signedness mismatch");
  }
  const Word ext = ExtendWord(addend, width_);
  ToggleTally t;
  t.acc_input = HammingToggles(input_, ext);
  input_ = ext;
  return t;
}

ToggleTally Accumulator::Add() {
  const std::uint64_t next = (reg_.bits + input_.bits) & WidthMask(width_);
  ToggleTally t;
  t.acc_sum = Popcount(reg_.bits ^ next);
  t.ff = t.acc_sum;
  reg_.bits = next;
  return t;
}

ToggleTally Accumulator::Step(const Word& addend) {
  ToggleTally t = Drive(addend);
  t += Add();
  return t;
}

ToggleTally Accumulator::Clear() {
  ToggleTally t;
  t.ff = Popcount(reg_.bits);
  reg_.bits = 0;
  return t;
}

// ---------------------------------------------------------------------------
// MacUnit

MacUnit::MacUnit(MultiplierKind kind, int b_w, int b_x, int acc_width,
                 bool is_signed)
    : kind_(kind),
      b_w_(b_w),
      b_x_(b_x),
      core_(std::max(b_w, b_x)),
      is_signed_(is_signed),
      acc_(acc_width, is_signed) {
  if (b_w < 1 || b_x < 1 || core_ > kMaxCoreWidth) {
    throw ContractViolation(fmt::format(
        "multiplier widths must be in [1, {}], got b_w={} b_x={}",
        kMaxCoreWidth, b_w, b_x));
  }
  if (acc_width < b_w + b_x) {
    throw ContractViolation(fmt::format(
        "accumulator width {} cannot hold a {}-bit product", acc_width,
        b_w + b_x));
  }
  prev_a_ = EncodeWord(0, b_w, is_signed);
  prev_b_ = EncodeWord(0, b_x, is_signed);
  rows_.assign(core_, 0);
}

void MacUnit::CheckOperand(const Word& w, int width, const char* name) const {
  if (w.width != width || w.is_signed != is_signed_) {
    throw ContractViolation(fmt::format(
        "operand {} is a {}-bit {} word, unit expects {}-bit {}", name,
        w.width, w.is_signed ? "signed" : "unsigned", width,
        is_signed_ ? "signed" : "unsigned"));
  }
  if (!is_signed_ && w.value() >= (std::int64_t{1} << (core_ - 1))) {
    throw ContractViolation(fmt::format(
        "unsigned operand {}={} must lie in [0, 2^{}) on a {}-bit core", name,
        w.value(), core_ - 1, core_));
  }
}

// Multiplier digit for partial-product row `row`, from the core-width
// two's-complement pattern of y.
std::int64_t MacUnit::Digit(std::int64_t y, int row) const {
  const std::int64_t yi = (y >> row) & 1;
  if (kind_ == MultiplierKind::kBoothRadix2) {
    const std::int64_t prev = row == 0 ? 0 : (y >> (row - 1)) & 1;
    return prev - yi;
  }
  // Long multiplication; the MSB of a two's-complement multiplier weighs
  // -2^(core-1).
  return row == core_ - 1 ? -yi : yi;
}

MacUnit::Product MacUnit::Multiply(const Word& a, const Word& b) {
  CheckOperand(a, b_w_, "a");
  CheckOperand(b, b_x_, "b");
  const std::int64_t av = a.value();
  const std::int64_t yv = b.value();

  Product out;
  out.tally.mult_input_a = HammingToggles(prev_a_, a);
  out.tally.mult_input_b = HammingToggles(prev_b_, b);
  prev_a_ = a;
  prev_b_ = b;

  const int pp_width = core_ + 1;
  const int sum_width = 2 * core_;
  const std::uint64_t sum_mask = WidthMask(sum_width);
  std::uint64_t running = 0;
  std::uint64_t internal = 0;
  for (int i = 0; i < core_; ++i) {
    const std::int64_t pp = Digit(yv, i) * av;
    const std::uint64_t row = static_cast<std::uint64_t>(pp) &
                              WidthMask(pp_width);
    internal += Popcount(row ^ rows_[i]);
    rows_[i] = row;
    const std::uint64_t shifted =
        (static_cast<std::uint64_t>(pp) << i) & sum_mask;
    running = i == 0 ? shifted : RippleCarryAdd(running, shifted, sum_width).sum;
  }
  out.tally.mult_internal = internal;

  Word full;
  full.bits = running;
  full.width = sum_width;
  full.is_signed = true;
  out.value = EncodeWord(full.value(), product_width(), is_signed_);
  return out;
}

ToggleTally MacUnit::Accumulate(const Word& addend) {
  return acc_.Step(addend);
}

ToggleTally MacUnit::Mac(const Word& a, const Word& b) {
  Product p = Multiply(a, b);
  p.tally += Accumulate(p.value);
  return p.tally;
}

// ---------------------------------------------------------------------------
// Streams

void StreamConfig::Validate() const {
  if (n_samples < 2) {
    throw ContractViolation(
        "n_samples ≥ 2 required: toggles are counted between consecutive "
        "operations");
  }
  if (b_w < 1 || b_x < 1 || std::max(b_w, b_x) > kMaxCoreWidth) {
    throw ContractViolation(fmt::format(
        "operand widths must be in [1, {}], got b_w={} b_x={}", kMaxCoreWidth,
        b_w, b_x));
  }
  if (acc_width < b_w + b_x || acc_width > kMaxWordWidth) {
    throw ContractViolation(fmt::format(
        "accumulator width B={} must be in [b_w+b_x={}, {}]", acc_width,
        b_w + b_x, kMaxWordWidth));
  }
}

std::vector<Word> GenerateWords(Distribution dist, int width, bool is_signed,
                                std::uint64_t n, std::uint64_t seed,
                                std::uint64_t stream, UnsignedRange range) {
  const bool full = !is_signed && range == UnsignedRange::kFull;
  const std::int64_t lo = is_signed ? MinValue(width, true) : 0;
  const std::int64_t hi = full ? MaxValue(width, false)
                               : (std::int64_t{1} << (width - 1)) - 1;
  Rng rng = MakeRng(seed, stream);
  std::vector<Word> out;
  out.reserve(n);
  if (dist == Distribution::kUniform) {
    std::uniform_int_distribution<std::int64_t> u(lo, hi);
    for (std::uint64_t i = 0; i < n; ++i) {
      out.push_back(EncodeWord(u(rng), width, is_signed));
    }
    return out;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(n);
  double peak = 0;
  for (double& v : z) {
    v = normal(rng);
    peak = std::max(peak, std::abs(v));
  }
  if (peak == 0) peak = 1;
  const double scale = std::ldexp(1.0, full ? width : width - 1);
  for (double v : z) {
    double s = v / peak * scale;
    if (!is_signed) s = std::abs(s);
    const auto q = static_cast<std::int64_t>(std::round(s));
    out.push_back(EncodeWord(std::clamp(q, lo, hi), width, is_signed));
  }
  return out;
}

std::vector<Word> GenerateWords(const StreamConfig& cfg, Operand which) {
  cfg.Validate();
  const int width = which == Operand::kWeight ? cfg.b_w : cfg.b_x;
  return GenerateWords(cfg.distribution, width, cfg.is_signed, cfg.n_samples,
                       cfg.seed, static_cast<std::uint64_t>(which));
}

ToggleReport RunMacStream(const StreamConfig& cfg) {
  cfg.Validate();
  const std::vector<Word> a = GenerateWords(cfg, Operand::kWeight);
  const std::vector<Word> b = GenerateWords(cfg, Operand::kActivation);
  MacUnit unit(cfg.multiplier, cfg.b_w, cfg.b_x, cfg.acc_width,
               cfg.is_signed);
  ToggleTally tally;
  for (std::uint64_t i = 0; i < cfg.n_samples; ++i) tally += unit.Mac(a[i], b[i]);
  return ToggleReport::FromTally(tally, cfg.n_samples);
}

PannStreamResult RunPannStream(std::span<const std::int64_t> weights_q,
                               std::span<const Word> activations,
                               int bx_tilde, int acc_width) {
  if (weights_q.size() != activations.size()) {
    throw ContractViolation(fmt::format(
        "{} weights but {} activations", weights_q.size(),
        activations.size()));
  }
  if (acc_width < bx_tilde) {
    throw ContractViolation("accumulator narrower than the activations");
  }
  Accumulator acc(acc_width, false);
  ToggleTally tally;
  for (std::size_t i = 0; i < weights_q.size(); ++i) {
    const std::int64_t q = weights_q[i];
    if (q < 0) {
      throw ContractViolation(fmt::format(
          "quantized weight {} at index {} is negative; split signs first", q,
          i));
    }
    const Word& x = activations[i];
    if (x.width != bx_tilde || x.is_signed) {
      throw ContractViolation(fmt::format(
          "activation {} must be an unsigned {}-bit word", i, bx_tilde));
    }
    tally += acc.Drive(x);
    for (std::int64_t j = 0; j < q; ++j) tally += acc.Add();
  }
  return {ToggleReport::FromTally(tally, weights_q.size()), acc.value()};
}

}  // namespace pann
