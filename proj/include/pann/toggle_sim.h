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

#ifndef PANN_TOGGLE_SIM_H_
#define PANN_TOGGLE_SIM_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pann/word.h"

namespace pann {

enum class MultiplierKind { kBoothRadix2, kSerialShiftAdd };
enum class Distribution { kUniform, kClippedGaussian };

std::string_view ToString(MultiplierKind kind);
std::string_view ToString(Distribution dist);

// Raw bit-flip counts, summed over however many operations were simulated.
struct ToggleTally {
  std::uint64_t mult_input_a = 0;
  std::uint64_t mult_input_b = 0;
  std::uint64_t mult_internal = 0;
  std::uint64_t acc_input = 0;
  std::uint64_t acc_sum = 0;
  std::uint64_t ff = 0;

  std::uint64_t total() const {
    return mult_input_a + mult_input_b + mult_internal + acc_input +
           acc_sum + ff;
  }
  ToggleTally& operator+=(const ToggleTally& o);
  friend bool operator==(const ToggleTally&, const ToggleTally&) = default;
};

// Per-operation averages of a tally.
struct ToggleReport {
  double mult_input_a = 0;
  double mult_input_b = 0;
  double mult_internal = 0;
  double acc_input = 0;
  double acc_sum = 0;
  double ff = 0;
  double mult_total = 0;
  double acc_total = 0;
  double total = 0;
  std::uint64_t operations = 0;

  static ToggleReport FromTally(const ToggleTally& t, std::uint64_t ops);
  friend bool operator==(const ToggleReport&, const ToggleReport&) = default;
};

// Ripple-carry addition of two `width`-bit patterns. `carries` holds the
// carry-out of every full adder (bit i = carry out of stage i).
struct RippleSum {
  std::uint64_t sum = 0;
  std::uint64_t carries = 0;
};
RippleSum RippleCarryAdd(std::uint64_t a, std::uint64_t b, int width);

// Radix-2 Booth digits d_i = y_(i-1) - y_i of the `width`-bit two's-complement
// pattern of y, LSB first. sum(d_i 2^i) == y.
std::vector<int> BoothDigits(std::int64_t y, int width);

// B-bit accumulator: input bus, adder, and the FF holding the running sum.
// Addends are sign- or zero-extended to B bits on the bus. Overflow wraps.
class Accumulator {
 public:
  Accumulator(int width, bool is_signed);

  // Puts `addend` on the input bus. Counts acc_input toggles only.
  ToggleTally Drive(const Word& addend);
  // Adds the word currently on the bus into the register.
  ToggleTally Add();
  ToggleTally Step(const Word& addend);
  // Resets the register to zero; the FF flips are booked under ff.
  ToggleTally Clear();

  const Word& input() const { return input_; }
  const Word& value() const { return reg_; }
  int width() const { return width_; }

 private:
  int width_;
  bool is_signed_;
  Word input_;
  Word reg_;
};

// Multiply-accumulate unit with persistent node state. The multiplier core is
// max(b_w, b_x) bits square; the narrower operand is extended. Unsigned
// operands run on the same two's-complement core and must stay below
// 2^(core-1).
class MacUnit {
 public:
  MacUnit(MultiplierKind kind, int b_w, int b_x, int acc_width,
          bool is_signed);

  struct Product {
    Word value;  // b_w + b_x bits
    ToggleTally tally;
  };

  // `a` is the weight (b_w bits), `b` the activation (b_x bits).
  Product Multiply(const Word& a, const Word& b);
  ToggleTally Accumulate(const Word& addend);
  ToggleTally Mac(const Word& a, const Word& b);

  int core_width() const { return core_; }
  int product_width() const { return b_w_ + b_x_; }
  // Internal node count: one (core+1)-bit partial product per row.
  int internal_node_count() const { return core_ * (core_ + 1); }
  const Accumulator& accumulator() const { return acc_; }

 private:
  void CheckOperand(const Word& w, int width, const char* name) const;
  std::int64_t Digit(std::int64_t y, int row) const;

  MultiplierKind kind_;
  int b_w_;
  int b_x_;
  int core_;
  bool is_signed_;
  Word prev_a_;
  Word prev_b_;
  std::vector<std::uint64_t> rows_;
  Accumulator acc_;
};

enum class UnsignedRange {
  kMultiplierSafe,  // [0, 2^(b-1)), fits a signed core of the same width
  kFull,            // [0, 2^b)
};

struct StreamConfig {
  Distribution distribution = Distribution::kUniform;
  bool is_signed = true;
  std::uint64_t n_samples = 36000;
  std::uint64_t seed = 1;
  int b_w = 4;
  int b_x = 4;
  int acc_width = 32;
  MultiplierKind multiplier = MultiplierKind::kBoothRadix2;

  // Throws ContractViolation on n_samples < 2, bad widths, or an accumulator
  // narrower than the product.
  void Validate() const;
};

// Seeded operand generator. `stream` picks an independent substream.
std::vector<Word> GenerateWords(Distribution dist, int width, bool is_signed,
                                std::uint64_t n, std::uint64_t seed,
                                std::uint64_t stream = 0,
                                UnsignedRange range =
                                    UnsignedRange::kMultiplierSafe);

enum class Operand : std::uint64_t { kWeight = 1, kActivation = 2 };
std::vector<Word> GenerateWords(const StreamConfig& cfg, Operand which);

ToggleReport RunMacStream(const StreamConfig& cfg);

// Multiplier-free stream: element i is put on the accumulator bus once and
// added weights_q[i] times. Averages are per element.
struct PannStreamResult {
  ToggleReport report;
  Word final_sum;
};
PannStreamResult RunPannStream(std::span<const std::int64_t> weights_q,
                               std::span<const Word> activations,
                               int bx_tilde, int acc_width = 32);

}  // namespace pann

#endif  // PANN_TOGGLE_SIM_H_
